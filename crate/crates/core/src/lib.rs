//! Trace functionals of Hermitian and positive-definite matrices, randomized
//! checks of the convexity and trace inequalities they satisfy, and a
//! variational solver for the associated maximization problems.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the checks and the CLI use.

pub mod error;
pub mod functionals;
pub mod matrix;
pub mod scalar;
pub mod variational;
pub mod verifiers;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, ContractionTuple, Hermitian, MatrixJson, PositiveDefinite, RngSeed};
pub use scalar::Real;

pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type HermitianMatrix = Hermitian<f64>;
pub type PositiveDefiniteMatrix = PositiveDefinite<f64>;
pub type ContractionTuple64 = ContractionTuple<f64>;
pub type MultiInstance64 = functionals::MultiInstance<f64>;
