//! Exact arithmetic for the arithmetic of function fields F_q(t): imaginary
//! quadratic extensions and their class groups, definite quaternion orders
//! with their ideal classes and Brandt matrices, Gross points and class-group
//! actions on them, supersingular Drinfeld modules, and Rankin-Selberg
//! L-values built from all of the above.
//!
//! Everything upstream of the final floating-point spectral steps is exact
//! integer/polynomial arithmetic; floats only enter where eigenvalues and
//! L-function roots genuinely live in R or C, and the crate checks those
//! against exact invariants wherever one exists.

pub mod error;
mod modq;
pub mod parse;
pub mod poly;
pub mod quat;
pub mod lattice;
pub mod classes;
pub mod brandt;
pub mod irred;
pub mod drinfeld;
pub mod field;
pub mod gross;
pub mod lseries;
pub mod pic;
pub mod rankin;
pub mod roots;

pub use error::{Error, Result};
pub use poly::Poly;
