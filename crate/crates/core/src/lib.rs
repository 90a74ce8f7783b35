//! Birman-Schwinger operators for non-self-adjoint perturbations: exact
//! finite-dimensional checks, Nyström-discretized resolvent kernels for
//! Schrödinger operators on the line, in R^3 and in hyperbolic space, and
//! closed-form Dirac enclosures.

pub mod error;
pub mod numerics;

pub use error::{Error, Result};
pub mod abstract_lab;
pub mod certificate;
pub mod dirac;
pub mod euclid3d;
pub mod hyperbolic3d;
pub mod schrodinger1d;
pub mod spectral;
