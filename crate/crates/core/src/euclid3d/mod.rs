//! Certificates for radial potentials on `R^3`: the `L^{3/2}` condition with
//! the sharp Sobolev constant, the Rollnik norm, the norm of
//! `L = |V|^{1/2} (-Delta)^{-1} |V|^{1/2}` and the form-subordination
//! constant, together with the implications between them.
//!
//! Operators are discretized in the s-wave sector `u = r psi`, where
//! `-Delta` becomes `-d^2/dr^2` on the half-line with a Dirichlet condition.
//! The kernel of `L` is positive, so its norm is attained on radial functions.

mod chain;
mod kernel;
mod montecarlo;
mod potential;
mod rollnik;

pub use chain::{
    critical_amplitudes, gamma_sweep, hardy_extrapolation, implication_chain, ChainReport, CriticalAmplitudes,
    HardyExtrapolation,
};
pub use kernel::{fkv_subordination, frank_condition, frank_threshold, green3d, green3d_free, kato_L_norm, l_matrix};
pub use montecarlo::{rollnik_monte_carlo, McEstimate, CHUNK};
pub use potential::{RadialNorms, RadialPotential, RadialProfile, TAIL_TOL};
pub use rollnik::{rollnik_norm, rollnik_quadrature, sphere_pair_integral};
