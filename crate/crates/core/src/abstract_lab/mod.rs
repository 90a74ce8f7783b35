//! Exact finite-dimensional Birman-Schwinger checks.
//!
//! In finite dimension the pseudo-Friedrichs extension is `H0 + B*A` and
//! every form identity becomes a matrix identity, so each statement can be
//! checked to rounding error on concrete matrices.

mod batch;
mod conditions;
mod principle;
mod stability;
mod system;

pub use batch::{check_system, run_lab, LabReport, TrialSummary};
pub use conditions::{
    kato_smoothness_sup, lemma1_conditions, minimal_b, relative_bound_holds, sandwich_norm, ConditionVerdict,
    LemmaReport, RelativeBound,
};
pub use principle::{
    bs_roots, minus_one_eigenvector, principle_backward, principle_forward, round_trip, simple_eigenpairs,
    spectrum_correspondence, CorrespondenceReport, Direction, PrincipleCheckReport, EMBEDDED_CUTOFF, MATCH_TOL,
};
pub use stability::{decoupled, stability_scan, StabilityClass, StabilityReport, ZGrid, NEIGHBOUR_VARIATION};
pub use system::{scalar_coupling, unperturbed, FactorizedSystem, GeneratorConfig};
