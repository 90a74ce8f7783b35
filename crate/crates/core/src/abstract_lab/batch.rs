use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::principle::{round_trip, simple_eigenpairs, spectrum_correspondence};
use super::system::{FactorizedSystem, GeneratorConfig};
use crate::error::{Error, Result};
use crate::numerics::linalg::operator_norm;
use crate::numerics::c;

/// Thresholds of the batch checks.
pub const FORWARD_TOL: f64 = 1e-7;
pub const BACKWARD_TOL: f64 = 1e-7;
pub const ROUND_TRIP_TOL: f64 = 1e-8;
pub const IDENTITY_TOL: f64 = 1e-10;
pub const NORM_FLOOR: f64 = 1.0 - 1e-6;

/// Worst values seen on one system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub direct_eigenvalues: usize,
    pub bs_roots: usize,
    pub mismatches: usize,
    pub max_forward: f64,
    pub max_backward: f64,
    pub max_round_trip: f64,
    /// `||H_V - (H0 + B*A)|| / (||H0|| + ||B*A||)`.
    pub pseudo_friedrichs: f64,
    /// Resolvent residual over its scale, maximized over the z samples.
    pub resolvent: f64,
    /// Difference between the two forms of the resolvent identity.
    pub resolvent_forms: f64,
    /// `max_delta max_ij |K_delta - K_0|`, relative to `max |K_0|`.
    pub delta_shift: f64,
    /// `| ||K*_lambda|| - ||K_lambda|| |`, relative.
    pub adjoint_norm: f64,
    /// `min ||K(lambda)||` over eigenvalues off `sigma(H0)`, if any.
    pub min_k_norm_at_eigenvalue: Option<f64>,
}

impl TrialSummary {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
            && self.max_forward <= FORWARD_TOL
            && self.max_backward <= BACKWARD_TOL
            && self.max_round_trip <= ROUND_TRIP_TOL
            && self.pseudo_friedrichs <= IDENTITY_TOL
            && self.resolvent <= IDENTITY_TOL
            && self.delta_shift <= IDENTITY_TOL
            && self.adjoint_norm <= IDENTITY_TOL
            && self.min_k_norm_at_eigenvalue.is_none_or(|k| k >= NORM_FLOOR)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabReport {
    pub trials: u64,
    pub dim_max: usize,
    pub seed: u64,
    pub z_per_system: usize,
    pub passed: bool,
    pub failures: Vec<u64>,
    pub worst: TrialSummary,
    pub per_trial: Vec<TrialSummary>,
}

/// Every finite-dimensional check on one system.
pub fn check_system(sys: &FactorizedSystem, trial: u64, z_samples: usize) -> Result<TrialSummary> {
    let corr = spectrum_correspondence(sys)?;
    let (mut max_forward, mut max_backward, mut max_round_trip) = (0.0f64, 0.0f64, 0.0f64);
    for (l, psi) in simple_eigenpairs(sys)? {
        let (f, b, rt) = round_trip(sys, l, &psi)?;
        max_forward = max_forward.max(f.residual);
        max_backward = max_backward.max(b.residual);
        max_round_trip = max_round_trip.max(rt);
    }

    let hv = sys.pseudo_friedrichs()?;
    let pf = operator_norm(&(&hv - sys.direct_sum())) / (sys.h0_norm() + sys.v_norm()).max(f64::MIN_POSITIVE);

    let seed = sys.seed().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0FFEE);
    let r = sys.h0_norm() + sys.v_norm() + 1.0;
    let (mut resolvent, mut resolvent_forms, mut delta_shift, mut adjoint_norm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut done = 0;
    while done < z_samples {
        let z = c(rng.gen_range(-r..r), rng.gen_range(-r..r));
        if sys.dist_to_free_spectrum(z) < 1e-3 || sys.dist_to_perturbed_spectrum(z) < 1e-3 {
            continue;
        }
        done += 1;
        let s1 = sys.second_resolvent_residual(z)?;
        let s2 = sys.kato_resolvent_residual(z)?;
        let scale = sys.resolvent_scale(z)?;
        resolvent = resolvent.max(s1 / scale).max(s2 / scale);
        resolvent_forms = resolvent_forms.max((s1 - s2).abs() / scale);

        let k0 = sys.bs_operator(z)?;
        let kmax = k0.max_abs().max(f64::MIN_POSITIVE);
        for delta in [1.0, 10.0] {
            let kd = sys.bs_operator_shifted(z, delta)?;
            delta_shift = delta_shift.max((&kd - &k0).max_abs() / kmax);
        }
        let a = operator_norm(&sys.adjoint_bs(z)?);
        let b = operator_norm(&sys.bs_operator(z)?);
        if a.max(b) > 0.0 {
            adjoint_norm = adjoint_norm.max((a - b).abs() / a.max(b));
        }
    }

    let mut min_k = f64::INFINITY;
    for &l in &corr.direct {
        min_k = min_k.min(operator_norm(&sys.bs_operator(l)?));
    }

    Ok(TrialSummary {
        trial,
        seed,
        n: sys.n(),
        m: sys.m(),
        direct_eigenvalues: corr.direct.len(),
        bs_roots: corr.roots.len(),
        mismatches: corr.mismatches(),
        max_forward,
        max_backward,
        max_round_trip,
        pseudo_friedrichs: pf,
        resolvent,
        resolvent_forms,
        delta_shift,
        adjoint_norm,
        min_k_norm_at_eigenvalue: min_k.is_finite().then_some(min_k),
    })
}

/// Runs the checks on `trials` seeded random systems.
pub fn run_lab(trials: u64, dim_max: usize, seed: u64, z_per_system: usize) -> Result<LabReport> {
    if trials < 1 {
        return Err(Error::Usage("trials must be at least 1".into()));
    }
    if dim_max < 2 {
        return Err(Error::Usage(format!("dim_max must be at least 2, got {dim_max}")));
    }
    let gen = GeneratorConfig { dim_max, ..GeneratorConfig::default() };
    let per_trial: Vec<TrialSummary> = (0..trials)
        .into_par_iter()
        .map(|t| check_system(&gen.system(seed, t)?, t, z_per_system))
        .collect::<Result<_>>()?;
    let failures: Vec<u64> = per_trial.iter().filter(|s| !s.passed()).map(|s| s.trial).collect();
    let worst = per_trial.iter().fold(
        TrialSummary {
            trial: 0,
            seed,
            n: 0,
            m: 0,
            direct_eigenvalues: 0,
            bs_roots: 0,
            mismatches: 0,
            max_forward: 0.0,
            max_backward: 0.0,
            max_round_trip: 0.0,
            pseudo_friedrichs: 0.0,
            resolvent: 0.0,
            resolvent_forms: 0.0,
            delta_shift: 0.0,
            adjoint_norm: 0.0,
            min_k_norm_at_eigenvalue: None,
        },
        |w, s| TrialSummary {
            trial: w.trial.max(s.trial),
            n: w.n.max(s.n),
            m: w.m.max(s.m),
            direct_eigenvalues: w.direct_eigenvalues + s.direct_eigenvalues,
            bs_roots: w.bs_roots + s.bs_roots,
            mismatches: w.mismatches + s.mismatches,
            max_forward: w.max_forward.max(s.max_forward),
            max_backward: w.max_backward.max(s.max_backward),
            max_round_trip: w.max_round_trip.max(s.max_round_trip),
            pseudo_friedrichs: w.pseudo_friedrichs.max(s.pseudo_friedrichs),
            resolvent: w.resolvent.max(s.resolvent),
            resolvent_forms: w.resolvent_forms.max(s.resolvent_forms),
            delta_shift: w.delta_shift.max(s.delta_shift),
            adjoint_norm: w.adjoint_norm.max(s.adjoint_norm),
            min_k_norm_at_eigenvalue: match (w.min_k_norm_at_eigenvalue, s.min_k_norm_at_eigenvalue) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
            ..w
        },
    );
    Ok(LabReport { trials, dim_max, seed, z_per_system, passed: failures.is_empty(), failures, worst, per_trial })
}
