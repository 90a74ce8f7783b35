use std::f64::consts::PI;

use rayon::prelude::*;

use super::potential::RadialPotential;
use crate::certificate::{CertificateKind, EnclosureCertificate};
use crate::error::Result;
use crate::numerics::quadrature::{gauss_legendre_rule, integrate_endpoint_singular, QuadratureGrid};

/// `int_{S^2} int_{S^2} |r w - r' w'|^{-2} dw dw'`, which reduces to
/// `8 pi^2 / (r r') ln|(r + r') / (r - r')|`.
pub fn sphere_pair_integral(r: f64, rp: f64) -> f64 {
    8.0 * PI * PI / (r * rp) * ((r + rp) / (r - rp)).abs().ln()
}

/// `int |V(r')| r' ln|(r + r') / (r - r')| dr'` over the panels of `grid`,
/// with graded panels at the logarithmic singularity `r' = r`.
fn inner(p: &RadialPotential, grid: &QuadratureGrid, r: f64) -> f64 {
    let f = |x: f64| {
        // The graded panels reach below the spacing of doubles near r.
        if x == r {
            return 0.0;
        }
        p.abs_value(x) * x * ((r + x) / (r - x)).abs().ln()
    };
    let (t, w) = gauss_legendre_rule(12);
    let gl = |a: f64, b: f64| {
        let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
        t.iter().zip(&w).map(|(ti, wi)| wi * half * f(mid + half * ti)).sum::<f64>()
    };
    let own = grid.panels.partition_point(|q| q.hi < r);
    let mut total = 0.0;
    for (k, q) in grid.panels.iter().enumerate() {
        total += match k as isize - own as isize {
            0 => {
                integrate_endpoint_singular(|s| f(r - s), 0.0, r - q.lo)
                    + integrate_endpoint_singular(|s| f(r + s), 0.0, q.hi - r)
            }
            -1 => integrate_endpoint_singular(|s| f(q.hi - s), 0.0, q.hi - q.lo),
            1 => integrate_endpoint_singular(|s| f(q.lo + s), 0.0, q.hi - q.lo),
            _ => gl(q.lo, q.hi),
        };
    }
    total
}

/// Rollnik norm `(int int |V(x)| |V(y)| |x - y|^{-2} dx dy)^{1/2}` through the
/// radial reduction `8 pi^2 int int |V(r)| |V(r')| r r' ln|(r+r')/(r-r')|`.
pub fn rollnik_quadrature(p: &RadialPotential, grid: &QuadratureGrid) -> f64 {
    if p.is_zero() {
        return 0.0;
    }
    let sum: f64 = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let r = grid.nodes[i];
            let v = p.abs_value(r);
            if v == 0.0 {
                0.0
            } else {
                grid.weights[i] * v * r * inner(p, grid, r)
            }
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    (8.0 * PI * PI * sum).sqrt()
}

/// Rollnik certificate against `4 pi`. A non-finite double integral gives an
/// infinite norm and a failed verdict.
pub fn rollnik_norm(p: &RadialPotential, grid: &QuadratureGrid) -> Result<EnclosureCertificate> {
    p.check_truncation(&grid.domain)?;
    let mut value = rollnik_quadrature(p, grid);
    if !value.is_finite() {
        value = f64::INFINITY;
    }
    Ok(EnclosureCertificate::strict(CertificateKind::Rollnik, value, 4.0 * PI).with_input("nodes", grid.len() as f64))
}
