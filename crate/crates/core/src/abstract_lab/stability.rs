use faer::c64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::system::FactorizedSystem;
use crate::error::{Error, Result};
use crate::numerics::linalg::{operator_norm, CMatrix};
use crate::numerics::random::random_matrix;
use crate::numerics::c;
use crate::spectral::hausdorff;

/// Relative change of `||K_z||` between neighbouring samples above which the
/// grid is considered too coarse.
pub const NEIGHBOUR_VARIATION: f64 = 0.1;

/// Sample points with a neighbour graph for the coarseness check.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZGrid {
    pub points: Vec<c64>,
    pub neighbours: Vec<(usize, usize)>,
}

impl ZGrid {
    /// `nx x ny` lattice over `[re_lo, re_hi] x [-im_max, im_max]` plus a
    /// ring of `n_ring` points at radius `ring`.
    pub fn rectangle_and_ring(re_lo: f64, re_hi: f64, im_max: f64, nx: usize, ny: usize, ring: f64, n_ring: usize) -> Self {
        let mut g = ZGrid::default();
        for j in 0..ny {
            for i in 0..nx {
                let x = re_lo + (re_hi - re_lo) * i as f64 / (nx.max(2) - 1) as f64;
                let y = -im_max + 2.0 * im_max * j as f64 / (ny.max(2) - 1) as f64;
                g.points.push(c(x, y));
                let k = j * nx + i;
                if i > 0 {
                    g.neighbours.push((k - 1, k));
                }
                if j > 0 {
                    g.neighbours.push((k - nx, k));
                }
            }
        }
        let base = g.points.len();
        for t in 0..n_ring {
            let th = 2.0 * std::f64::consts::PI * (t as f64 + 0.5) / n_ring as f64;
            g.points.push(c64::from_polar(ring, th));
            if t > 0 {
                g.neighbours.push((base + t - 1, base + t));
            }
        }
        if n_ring > 2 {
            g.neighbours.push((base, base + n_ring - 1));
        }
        g
    }

    /// Default grid for a system: the rectangle covers `sigma(H0)` padded by
    /// one unit, the ring sits at `2 (||H0|| + ||V|| + 1)`.
    pub fn for_system(sys: &FactorizedSystem, nx: usize, ny: usize, n_ring: usize) -> Self {
        let s = sys.free_spectrum();
        let lo = s[0] - 1.0;
        let hi = s[s.len() - 1] + 1.0;
        let r = 2.0 * (sys.h0_norm() + sys.v_norm() + 1.0);
        Self::rectangle_and_ring(lo, hi, 1.0 + sys.v_norm(), nx, ny, r, n_ring)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityClass {
    /// `sup ||K_z|| < 1` on a resolved grid.
    Certified,
    /// The sampled norms reach 1; no stability claim.
    NotCertified,
    /// Neighbouring samples differ by more than 10%.
    RefinementNeeded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub sup_norm: f64,
    pub argmax: c64,
    pub samples: usize,
    pub skipped: usize,
    pub max_variation: f64,
    pub verdict: StabilityClass,
    /// Hausdorff distance between `sigma(H0)` and `sigma(H_V)`.
    pub hausdorff: f64,
    /// Largest distance from a point of `sigma(H0)` to `sigma(H_V)`.
    pub inclusion_gap: f64,
    /// Spectral checks passed (only asserted for certified grids).
    pub spectra_ok: bool,
}

/// `sup ||K_z||` over the grid and, when the bound is below 1, the spectral
/// equality it implies.
pub fn stability_scan(sys: &FactorizedSystem, grid: &ZGrid) -> Result<StabilityReport> {
    if grid.points.is_empty() {
        return Err(Error::Usage("empty z grid".into()));
    }
    let gap = 1e-8 * sys.h0_norm().max(1.0);
    let norms: Vec<Option<f64>> = grid
        .points
        .par_iter()
        .map(|&z| {
            if sys.dist_to_free_spectrum(z) < gap {
                None
            } else {
                sys.bs_operator(z).ok().map(|k| operator_norm(&k))
            }
        })
        .collect();
    let mut sup = 0.0f64;
    let mut argmax = grid.points[0];
    let mut skipped = 0;
    for (z, n) in grid.points.iter().zip(&norms) {
        match n {
            Some(v) if *v > sup => {
                sup = *v;
                argmax = *z;
            }
            Some(_) => {}
            None => skipped += 1,
        }
    }
    let mut max_variation = 0.0f64;
    for &(i, j) in &grid.neighbours {
        if let (Some(a), Some(b)) = (norms[i], norms[j]) {
            let m = a.max(b);
            if m > 0.0 {
                max_variation = max_variation.max((a - b).abs() / m);
            }
        }
    }
    let verdict = if sup >= 1.0 || skipped > 0 {
        StabilityClass::NotCertified
    } else if max_variation > NEIGHBOUR_VARIATION {
        StabilityClass::RefinementNeeded
    } else {
        StabilityClass::Certified
    };
    let free: Vec<c64> = sys.free_spectrum().iter().map(|&x| c(x, 0.0)).collect();
    let pert = sys.perturbed_spectrum();
    let hd = hausdorff(&free, pert);
    let inclusion_gap = free
        .iter()
        .map(|f| pert.iter().map(|p| (f - p).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let tol = 1e-6 * sys.h0_norm().max(1.0);
    let spectra_ok = verdict != StabilityClass::Certified || (hd <= tol && inclusion_gap <= tol);
    Ok(StabilityReport {
        sup_norm: sup,
        argmax,
        samples: grid.points.len(),
        skipped,
        max_variation,
        verdict,
        hausdorff: hd,
        inclusion_gap,
        spectra_ok,
    })
}

/// System with `K_z = 0` for all `z`: `H0 = diag(d)`, `A` acts on the first
/// `split` coordinates only and `B` on the rest. `H_V` is then block
/// triangular with the same spectrum as `H0`, although `V != 0`.
pub fn decoupled(d: &[f64], split: usize, m: usize, scale: f64, seed: u64) -> Result<FactorizedSystem> {
    let n = d.len();
    if split == 0 || split >= n {
        return Err(Error::Usage(format!("split must be in 1..{n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ra = random_matrix(m, n, scale, &mut rng);
    let rb = random_matrix(m, n, scale, &mut rng);
    let a = CMatrix::from_fn(m, n, |i, j| if j < split { ra.get(i, j) } else { c(0.0, 0.0) })?;
    let b = CMatrix::from_fn(m, n, |i, j| if j >= split { rb.get(i, j) } else { c(0.0, 0.0) })?;
    Ok(FactorizedSystem::new(CMatrix::from_real_diag(d), a, b)?.with_seed(seed))
}
