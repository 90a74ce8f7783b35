use std::f64::consts::PI;

use faer::c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{assemble_k_h3, subordination_certificate, EPSILON};
use super::potential::HyperbolicRadialPotential;
use crate::abstract_lab::{StabilityClass, ZGrid, NEIGHBOUR_VARIATION};
use crate::error::{Error, Result};
use crate::numerics::linalg::operator_norm;
use crate::numerics::quadrature::QuadratureGrid;
use crate::numerics::c;

/// Allowed excess of a sampled `||K(z)||` over the subordination constant.
pub const SCAN_TOL: f64 = 1e-3;

/// What a finite scan cannot show.
pub const SPECTRAL_GAP_NOTE: &str = "a finite scan bounds ||K(z)|| on the samples and excludes eigenvalues \
     from the searched region only; it does not show that the spectrum is purely continuous";

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n.max(2) - 1) as f64)).collect()
}

/// Geometric toward 0 on `[1e-3, 0.25]` (`n_log` points), then steps of
/// `step` up to `max`.
fn graded(n_log: usize, step: f64, max: f64) -> Vec<f64> {
    let mut v = logspace(1e-3, 0.25, n_log);
    let mut x = 0.25 + step;
    while x <= max + 1e-12 {
        v.push(x);
        x += step;
    }
    v
}

/// Samples around the cut `[1, inf)`: a lattice over `[0, lambda_max]` at
/// heights `+-[1e-3, 2]`, graded toward the edge `1` and toward the axis
/// (one lattice per half-plane; half steps below the edge and in height); `n_rays` rays `1 + t exp(i theta)` with `t`
/// in `[1e-3, 1e3]`; a ring of `n_ring` points at radius `ring`.
pub fn h3_zgrid(lambda_max: f64, step: f64, n_rays: usize, n_ray: usize, ring: f64, n_ring: usize) -> ZGrid {
    let mut g = ZGrid::default();
    let mut xs: Vec<f64> = graded(12, 0.5 * step, 1.0).into_iter().rev().map(|d| 1.0 - d).collect();
    xs.extend(graded(12, step, lambda_max - 1.0).into_iter().map(|d| 1.0 + d));
    let ys = graded(12, 0.5 * step, 2.0);
    let n_re = xs.len();
    for sign in [1.0, -1.0] {
        let base = g.points.len();
        for (j, y) in ys.iter().enumerate() {
            for (i, x) in xs.iter().enumerate() {
                g.points.push(c(*x, sign * y));
                let k = base + j * n_re + i;
                if i > 0 {
                    g.neighbours.push((k - 1, k));
                }
                if j > 0 {
                    g.neighbours.push((k - n_re, k));
                }
            }
        }
    }
    let ts = logspace(1e-3, 1e3, n_ray);
    for r in 0..n_rays {
        let th = 2.0 * PI * (r as f64 + 0.5) / n_rays as f64;
        let base = g.points.len();
        for (k, t) in ts.iter().enumerate() {
            g.points.push(c(1.0, 0.0) + c64::from_polar(*t, th));
            if k > 0 {
                g.neighbours.push((base + k - 1, base + k));
            }
        }
    }
    let base = g.points.len();
    for t in 0..n_ring {
        g.points.push(c64::from_polar(ring, 2.0 * PI * (t as f64 + 0.5) / n_ring as f64));
        if t > 0 {
            g.neighbours.push((base + t - 1, base + t));
        }
    }
    g
}

/// 3092 samples: lattice over `[0, 6]` with steps of 0.125 below the edge
/// and 0.25 above it, 8 rays of 60 and a ring of 64 at `|z| = 1e3`.
pub fn default_h3_zgrid() -> ZGrid {
    h3_zgrid(6.0, 0.25, 8, 60, 1e3, 64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct H3StabilityReport {
    pub subordination: f64,
    pub sup_norm: f64,
    pub argmax: c64,
    pub samples: usize,
    /// `||K(1 - epsilon^2)||`, the bound the scan reduces to.
    pub reference: f64,
    /// Samples with `||K(z)|| > subordination + SCAN_TOL`.
    pub exceedances: Vec<(c64, f64)>,
    /// Samples with `||K(z)|| > reference + SCAN_TOL`.
    pub above_reference: Vec<(c64, f64)>,
    /// Largest change between neighbouring samples, relative to `sup_norm`.
    pub max_variation: f64,
    pub verdict: StabilityClass,
    pub note: String,
    /// `||K(z)||` at each sample, in grid order; not serialized.
    #[serde(skip)]
    pub norms: Vec<f64>,
}

impl H3StabilityReport {
    pub fn holds(&self) -> bool {
        self.exceedances.is_empty() && self.above_reference.is_empty()
    }
}

/// `sup ||K(z)||` over `zgrid`, compared with the subordination constant.
pub fn stability_scan(p: &HyperbolicRadialPotential, grid: &QuadratureGrid, zgrid: &ZGrid) -> Result<H3StabilityReport> {
    if zgrid.points.is_empty() {
        return Err(Error::Usage("empty z grid".into()));
    }
    let c_sub = match p.subordination {
        Some(c) => c,
        None => subordination_certificate(p, grid)?.constant(),
    };
    if c_sub >= 1.0 {
        return Err(Error::AssumptionViolated(format!("subordination constant {c_sub} is not below 1")));
    }
    let norm = |z: c64| -> Result<f64> {
        if p.is_zero() {
            return Ok(0.0);
        }
        Ok(operator_norm(&assemble_k_h3(p, grid, z)?))
    };
    let reference = norm(c(1.0 - EPSILON * EPSILON, 0.0))?;
    let norms: Vec<f64> = zgrid.points.par_iter().map(|&z| norm(z)).collect::<Result<_>>()?;
    let mut sup = 0.0f64;
    let mut argmax = zgrid.points[0];
    let mut exceedances = vec![];
    let mut above_reference = vec![];
    for (&z, &n) in zgrid.points.iter().zip(&norms) {
        if n > sup {
            sup = n;
            argmax = z;
        }
        if n > c_sub + SCAN_TOL {
            exceedances.push((z, n));
        }
        if n > reference + SCAN_TOL {
            above_reference.push((z, n));
        }
    }
    // Changes are measured against the sup: a coarse grid matters where it
    // can hide a peak, not where the norm is already small.
    let mut max_variation = 0.0f64;
    if sup > 0.0 {
        for &(i, j) in &zgrid.neighbours {
            max_variation = max_variation.max((norms[i] - norms[j]).abs() / sup);
        }
    }
    let verdict = if sup >= 1.0 {
        StabilityClass::NotCertified
    } else if max_variation > NEIGHBOUR_VARIATION {
        StabilityClass::RefinementNeeded
    } else {
        StabilityClass::Certified
    };
    Ok(H3StabilityReport {
        subordination: c_sub,
        sup_norm: sup,
        argmax,
        samples: zgrid.points.len(),
        reference,
        exceedances,
        above_reference,
        max_variation,
        verdict,
        note: SPECTRAL_GAP_NOTE.to_string(),
        norms,
    })
}
