//! Dense complex linear algebra and quadrature.

pub mod complex;
pub mod linalg;
pub mod nystrom;
pub mod quadrature;
pub mod random;

pub use complex::{c, principal_sqrt_minus, C0, C1, CI};
pub use linalg::{
    general_eig, hermitian_eig, inverse, operator_norm, psd_power, CMatrix, GeneralEigen, HermitianEigen, Lu,
};
pub use quadrature::{gauss_legendre, Domain, QuadratureGrid};
