//! Library side of the `ffquat` command line driver: the persisted
//! class-set store and the verification suite, shared between the binary
//! and its integration tests.

pub mod cache;
pub mod checks;
