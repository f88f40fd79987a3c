//! Numerical building blocks shared by the distribution, coverage and
//! calibration code.

pub mod quad;
pub mod roots;

pub use quad::adaptive_simpson;
pub use roots::{bracketed_root, Root, RootOptions};
