//! Numerical laboratory for Hardy-Sobolev quotients with boundary-singular potentials.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod error;
pub mod funcspace;
pub mod functionals;
pub mod limits;
pub mod minimize;
pub mod params;
pub mod quadrature;
pub mod scalings;
pub mod transforms;

pub use error::{Error, Result};
