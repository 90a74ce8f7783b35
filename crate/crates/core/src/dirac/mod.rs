//! Matrix-valued potentials for the Dirac operator in R^3: polar
//! decomposition, the norm profile `v(x) = ||V(x)||` and the closed-form
//! strip where no eigenvalue can lie.

mod enclosure;
mod polar;

pub use enclosure::{
    dirac_constants, enclosure_region, kato_sufficiency_check, kato_threshold, ExclusionKind, EnclosureRegion,
};
pub use polar::{matrix_polar, norms_from_samples, MatrixPotentialSample, Polar, SampleNorms, DIM, POLAR_TOL};
