//! Schrödinger operators on hyperbolic space `H^3` with radial complex
//! potentials. The free operator has spectrum `[1, inf)`; in the radial
//! sector `u = sinh(rho) psi` it becomes `-d^2/drho^2 + 1` on the half-line.
//!
//! A potential subordinated to the shifted kinetic form with constant
//! `c < 1` keeps `||K(z)|| <= c` for every `z` off `[1, inf)`, so the scan
//! and the eigenvalue hunt here are the finite checks of that statement.

mod hunt;
mod kernel;
mod potential;
mod scan;

pub use hunt::{eigenvalue_hunt_h3, fd_oracle_h3, h3_search, k_norms_at};
pub use kernel::{assemble_k_h3, certify, green_h3, kappa, subordination_certificate, Subordination, EPSILON};
pub use potential::{HyperbolicProfile, HyperbolicRadialPotential, TAIL_TOL};
pub use scan::{default_h3_zgrid, h3_zgrid, stability_scan, H3StabilityReport, SCAN_TOL, SPECTRAL_GAP_NOTE};
