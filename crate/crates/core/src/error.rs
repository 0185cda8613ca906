//! Crate-wide error type.
//!
//! Two failure families matter downstream: `Domain` errors are precondition
//! violations a caller can fix (bad input, unsupported configuration), while
//! `Internal` errors mean a cross-check that must hold mathematically did not,
//! i.e. the library caught itself producing inconsistent results. Binaries map
//! the former to exit code 2 and the latter to exit code 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero polynomial")]
    DivisionByZero,

    #[error("element of F_{got} used where F_{expected} was required")]
    FieldMismatch { expected: u64, got: u64 },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Precondition violation: the request is outside the supported domain.
    #[error("{0}")]
    Domain(String),

    /// A mathematical identity that certifies correctness failed to hold.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
