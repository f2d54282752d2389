//! Scattering theory for two-dimensional quantum walks with a finitely supported coin perturbation.

// `!(a <= tol)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod error;
pub mod green;
pub mod lattice;
pub mod smatrix;

pub use error::{Error, Result};
