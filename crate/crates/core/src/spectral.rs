//! Eigenvalue hunting through zeros of `det(I + K(lambda))`.
//!
//! `-1` is an eigenvalue of `K(lambda)` exactly when the determinant
//! vanishes. For the continuum models `K` is trace class and the determinant
//! is a Fredholm determinant, so it stays bounded under grid refinement.

use faer::c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::EnclosureCertificate;
use crate::error::{Error, Result};
use crate::numerics::linalg::CMatrix;
use crate::numerics::{C0, C1};

/// Closed rectangle in the spectral plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchRect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let ok = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) && re_max > re_min && im_max >= im_min;
        if !ok {
            return Err(Error::Usage(format!("invalid search rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}]")));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    /// Parses `re_min,re_max,im_min,im_max`.
    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Usage(format!("search rectangle '{s}': {e}")))?;
        if v.len() != 4 {
            return Err(Error::Usage(format!("search rectangle '{s}' needs four numbers")));
        }
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn contains(&self, z: c64, pad: f64) -> bool {
        z.re >= self.re_min - pad && z.re <= self.re_max + pad && z.im >= self.im_min - pad && z.im <= self.im_max + pad
    }

    /// Distance from the rectangle to the ray `[edge, +inf)` on the real axis.
    pub fn distance_to_ray(&self, edge: f64) -> f64 {
        let dy = if self.im_min > 0.0 {
            self.im_min
        } else if self.im_max < 0.0 {
            -self.im_max
        } else {
            0.0
        };
        let dx = (edge - self.re_max).max(0.0);
        dx.hypot(dy)
    }

    /// Rectangle covering `points`, padded by `frac` of its extent (and at
    /// least `min_pad`).
    pub fn covering(points: &[c64], frac: f64, min_pad: f64) -> Self {
        let (mut a, mut b, mut c, mut d) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            a = a.min(p.re);
            b = b.max(p.re);
            c = c.min(p.im);
            d = d.max(p.im);
        }
        if points.is_empty() {
            (a, b, c, d) = (-1.0, 1.0, -1.0, 1.0);
        }
        let px = ((b - a) * frac).max(min_pad);
        let py = ((d - c) * frac).max(min_pad);
        Self { re_min: a - px, re_max: b + px, im_min: c - py, im_max: d + py }
    }

    /// `nx * ny` lattice including the boundary.
    pub fn lattice(&self, nx: usize, ny: usize) -> Vec<c64> {
        let mut pts = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                pts.push(c64::new(lerp(self.re_min, self.re_max, i, nx), lerp(self.im_min, self.im_max, j, ny)));
            }
        }
        pts
    }
}

fn lerp(a: f64, b: f64, i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.5 * (a + b)
    } else {
        a + (b - a) * i as f64 / (n - 1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BsRoot,
    FdOracle,
    DirectEig,
}

/// One eigenvalue approximation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenEstimate {
    pub lambda: c64,
    /// `|mu + 1|` for the eigenvalue `mu` of `K(lambda)` nearest `-1`
    /// (`bs_root`), or the resolution drift (`fd_oracle`).
    pub residual: f64,
    pub method: Method,
    pub grid_n: usize,
    /// Value at the refined resolution, when cross-validated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined: Option<c64>,
    /// Lower bound on `||K(lambda)||`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_norm: Option<f64>,
}

/// Eigenvalues, rejected candidates and the certificates attached to them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<EigenEstimate>,
    pub rejected: Vec<EigenEstimate>,
    pub certificates: Vec<EnclosureCertificate>,
}

impl SpectralReport {
    pub fn lambdas(&self) -> Vec<c64> {
        self.eigenvalues.iter().map(|e| e.lambda).collect()
    }

    pub fn sort(&mut self) {
        let key = |e: &EigenEstimate| (e.lambda.re, e.lambda.im);
        self.eigenvalues.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        self.rejected.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    }
}

/// Parameters of the determinant root search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HuntOptions {
    pub nx: usize,
    pub ny: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Roots closer than this are the same root.
    pub dedup: f64,
}

impl Default for HuntOptions {
    fn default() -> Self {
        Self { nx: 41, ny: 41, tol: 1e-13, max_iter: 60, dedup: 1e-6 }
    }
}

/// Root of the determinant located by the search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootCandidate {
    pub lambda: c64,
    pub converged: bool,
    pub iterations: usize,
}

/// `det(I + K)`.
pub fn fredholm_det(k: &CMatrix) -> c64 {
    k.shift(C1).as_faer().determinant()
}

/// Secant iteration on `f` from `z0`, with `f` divided by `(z - r)` for every
/// root `r` in `deflate`.
pub fn secant<F>(f: &F, z0: c64, step: f64, deflate: &[c64], tol: f64, max_iter: usize) -> Result<RootCandidate>
where
    F: Fn(c64) -> Result<c64>,
{
    let g = |z: c64| -> Result<c64> {
        let mut v = f(z)?;
        for r in deflate {
            v /= z - r;
        }
        Ok(v)
    };
    let mut z_prev = z0 + c64::new(step, 0.37 * step);
    let mut f_prev = g(z_prev)?;
    let mut z = z0;
    let mut fz = g(z)?;
    for it in 1..=max_iter {
        if fz == C0 {
            return Ok(RootCandidate { lambda: z, converged: true, iterations: it });
        }
        let denom = fz - f_prev;
        if denom == C0 || !denom.re.is_finite() || !denom.im.is_finite() {
            // Stalled at the rounding floor of f.
            let converged = (z - z_prev).norm() <= 1e3 * tol * z.norm().max(1.0);
            return Ok(RootCandidate { lambda: z, converged, iterations: it });
        }
        let mut dz = fz * (z - z_prev) / denom;
        // Damp wild jumps early on.
        let cap = 10.0 * step.max((z - z_prev).norm());
        if dz.norm() > cap {
            dz *= cap / dz.norm();
        }
        z_prev = z;
        f_prev = fz;
        z -= dz;
        if !(z.re.is_finite() && z.im.is_finite()) {
            break;
        }
        if dz.norm() <= tol * z.norm().max(1.0) {
            return Ok(RootCandidate { lambda: z, converged: true, iterations: it });
        }
        fz = g(z)?;
    }
    Ok(RootCandidate { lambda: z, converged: false, iterations: max_iter })
}

/// Zeros of the analytic function `f` in `rect`.
///
/// `|f|` on an analytic function has no interior local minima except at
/// zeros, so lattice minima seed secant iterations; each iteration is
/// deflated by the roots found so far. Points where `f` fails (poles, cut)
/// are skipped.
pub fn hunt_roots<F>(f: &F, rect: &SearchRect, opts: &HuntOptions) -> Result<Vec<RootCandidate>>
where
    F: Fn(c64) -> Result<c64> + Sync,
{
    let pts = rect.lattice(opts.nx, opts.ny);
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|&z| f(z).map(|v| v.norm()).unwrap_or(f64::NAN))
        .collect();
    let (nx, ny) = (opts.nx, opts.ny);
    let mut seeds: Vec<(f64, c64)> = vec![];
    for j in 0..ny {
        for i in 0..nx {
            let v = vals[j * nx + i];
            if !v.is_finite() {
                continue;
            }
            let mut is_min = true;
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if (di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                        continue;
                    }
                    let w = vals[jj as usize * nx + ii as usize];
                    if w.is_finite() && w < v {
                        is_min = false;
                    }
                }
            }
            if is_min {
                seeds.push((v, pts[j * nx + i]));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let hx = (rect.re_max - rect.re_min) / (nx.max(2) - 1) as f64;
    let hy = (rect.im_max - rect.im_min) / (ny.max(2) - 1) as f64;
    let step = 0.25 * hx.max(hy).max(1e-8);
    let pad = 2.0 * hx.max(hy);
    // Iterates that wander far outside the rectangle are abandoned.
    let escape = 0.25 * (rect.re_max - rect.re_min).hypot(rect.im_max - rect.im_min);
    let fenced = |z: c64| -> Result<c64> {
        if rect.contains(z, escape) {
            f(z)
        } else {
            Err(Error::NumericalFailure("secant left the search region".into()))
        }
    };
    let mut roots: Vec<RootCandidate> = vec![];
    // Later passes reuse the seeds with the roots found so far deflated,
    // which separates clustered zeros sharing one lattice minimum.
    for _pass in 0..3 {
        let before = roots.len();
        for &(_, z0) in &seeds {
            let found: Vec<c64> = roots.iter().map(|r| r.lambda).collect();
            let cand = match secant(&fenced, z0, step, &found, opts.tol, opts.max_iter) {
                Ok(c) => c,
                Err(_) => continue,
            };
            if !cand.converged || !rect.contains(cand.lambda, pad) {
                continue;
            }
            if found.iter().any(|r| (r - cand.lambda).norm() <= opts.dedup * cand.lambda.norm().max(1.0)) {
                continue;
            }
            roots.push(cand);
        }
        if roots.len() == before {
            break;
        }
    }
    roots.retain(|r| rect.contains(r.lambda, 0.0));
    roots.sort_by(|a, b| (a.lambda.re, a.lambda.im).partial_cmp(&(b.lambda.re, b.lambda.im)).unwrap());
    Ok(roots)
}

/// Distance from `z` to the ray `[edge, +inf)`.
pub fn distance_to_half_line(z: c64, edge: f64) -> f64 {
    if z.re >= edge {
        z.im.abs()
    } else {
        (z - c64::new(edge, 0.0)).norm()
    }
}

/// Hausdorff distance between two finite point sets (infinite if exactly one
/// is empty).
pub fn hausdorff(a: &[c64], b: &[c64]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let d = |x: &c64, s: &[c64]| s.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min);
    let ab = a.iter().map(|x| d(x, b)).fold(0.0, f64::max);
    let ba = b.iter().map(|y| d(y, a)).fold(0.0, f64::max);
    ab.max(ba)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    #[test]
    fn finds_polynomial_roots() {
        let roots = [c(0.5, 0.5), c(-1.0, 0.2), c(0.52, 0.48), c(1.5, -0.7)];
        let f = |z: c64| -> Result<c64> { Ok(roots.iter().fold(C1, |acc, r| acc * (z - r))) };
        let rect = SearchRect::new(-2.0, 2.0, -1.0, 1.0).unwrap();
        let found = hunt_roots(&f, &rect, &HuntOptions::default()).unwrap();
        let lam: Vec<c64> = found.iter().map(|r| r.lambda).collect();
        assert!(hausdorff(&lam, &roots) < 1e-10, "{lam:?}");
    }

    #[test]
    fn rect_distance_to_ray() {
        let r = SearchRect::new(-2.0, 3.0, 0.5, 2.0).unwrap();
        assert_eq!(r.distance_to_ray(0.0), 0.5);
        let r = SearchRect::new(-2.0, -1.0, -1.0, 1.0).unwrap();
        assert_eq!(r.distance_to_ray(0.0), 1.0);
        assert!(SearchRect::parse("-2,3,-2,2").is_ok());
        assert!(SearchRect::parse("1,0,0,1").is_err());
    }

    #[test]
    fn hausdorff_edge_cases() {
        assert_eq!(hausdorff(&[], &[]), 0.0);
        assert!(hausdorff(&[C0], &[]).is_infinite());
    }
}
