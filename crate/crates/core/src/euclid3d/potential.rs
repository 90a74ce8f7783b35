use std::f64::consts::PI;

use faer::c64;
use serde::{Deserialize, Serialize};

use super::rollnik::rollnik_quadrature;
use crate::error::{Error, Result};
use crate::numerics::quadrature::{Domain, QuadratureGrid, DEFAULT_PANEL_ORDER};

/// Relative mass of `|V| r^2` allowed outside a truncated radial domain.
pub const TAIL_TOL: f64 = 1e-10;

/// Mass left outside the built-in support.
const SUPPORT_TOL: f64 = 1e-13;

/// Radial profiles `|V(r)|` on `R^3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RadialProfile {
    /// `gamma exp(-r / scale)`.
    Exponential { gamma: f64, scale: f64 },
    /// `gamma exp(-(r / width)^2)`.
    Gaussian { gamma: f64, width: f64 },
    /// `(c0 / 4) r^{-2}` on `[r0, r1]`, zero elsewhere.
    InverseSquare { c0: f64, r0: f64, r1: f64 },
    /// `gamma` on `[0, radius]`.
    Step { gamma: f64, radius: f64 },
}

/// Norms over `R^3`; `l1` is `4 pi int |V| r^2 dr`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialNorms {
    pub l32: f64,
    pub l3: f64,
    pub l1: f64,
    pub rollnik: f64,
}

/// `V(r) = |V|(r) exp(i phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialPotential {
    pub profile: RadialProfile,
    pub phase: f64,
    pub norms: RadialNorms,
}

fn gaussian_cdf(x: f64) -> f64 {
    libm::erf(x) - 2.0 / PI.sqrt() * x * (-x * x).exp()
}

fn exponential_cdf(x: f64) -> f64 {
    1.0 - (-x).exp() * (x * x + 2.0 * x + 2.0) / 2.0
}

/// Smallest `x` with `1 - cdf(x) <= tol`, by bisection.
fn quantile(cdf: impl Fn(f64) -> f64, tol: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while 1.0 - cdf(hi) > tol {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - cdf(mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

impl RadialPotential {
    pub fn new(profile: RadialProfile, phase: f64) -> Result<Self> {
        let ok = match profile {
            RadialProfile::Exponential { gamma, scale } => gamma >= 0.0 && gamma.is_finite() && scale > 0.0,
            RadialProfile::Gaussian { gamma, width } => gamma >= 0.0 && gamma.is_finite() && width > 0.0,
            RadialProfile::InverseSquare { c0, r0, r1 } => c0 >= 0.0 && c0.is_finite() && r0 > 0.0 && r1 > r0,
            RadialProfile::Step { gamma, radius } => gamma >= 0.0 && gamma.is_finite() && radius > 0.0,
        };
        if !ok || !phase.is_finite() {
            return Err(Error::Usage(format!("invalid radial profile {profile:?}")));
        }
        let mut p = Self { profile, phase, norms: RadialNorms { l32: 0.0, l3: 0.0, l1: 0.0, rollnik: 0.0 } };
        p.norms.l32 = p.lp_norm(1.5);
        p.norms.l3 = p.lp_norm(3.0);
        p.norms.l1 = p.lp_norm(1.0);
        p.norms.rollnik = rollnik_quadrature(&p, &p.default_grid()?);
        Ok(p)
    }

    pub fn exponential(gamma: f64, scale: f64) -> Result<Self> {
        Self::new(RadialProfile::Exponential { gamma, scale }, 0.0)
    }

    pub fn gaussian(gamma: f64, width: f64) -> Result<Self> {
        Self::new(RadialProfile::Gaussian { gamma, width }, 0.0)
    }

    pub fn inverse_square(c0: f64, r0: f64, r1: f64) -> Result<Self> {
        Self::new(RadialProfile::InverseSquare { c0, r0, r1 }, 0.0)
    }

    pub fn step(gamma: f64, radius: f64) -> Result<Self> {
        Self::new(RadialProfile::Step { gamma, radius }, 0.0)
    }

    pub fn zero() -> Self {
        Self::exponential(0.0, 1.0).expect("valid profile")
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    /// Amplitude of the profile; every norm is linear in it.
    pub fn amplitude(&self) -> f64 {
        match self.profile {
            RadialProfile::Exponential { gamma, .. }
            | RadialProfile::Gaussian { gamma, .. }
            | RadialProfile::Step { gamma, .. } => gamma,
            RadialProfile::InverseSquare { c0, .. } => c0,
        }
    }

    /// `factor * V`, reusing the cached norms.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(Error::Usage(format!("scale factor {factor} must be finite and >= 0")));
        }
        let mut profile = self.profile.clone();
        match &mut profile {
            RadialProfile::Exponential { gamma, .. }
            | RadialProfile::Gaussian { gamma, .. }
            | RadialProfile::Step { gamma, .. } => *gamma *= factor,
            RadialProfile::InverseSquare { c0, .. } => *c0 *= factor,
        }
        let n = self.norms;
        Ok(Self {
            profile,
            phase: self.phase,
            norms: RadialNorms {
                l32: n.l32 * factor,
                l3: n.l3 * factor,
                l1: n.l1 * factor,
                rollnik: n.rollnik * factor,
            },
        })
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude() == 0.0
    }

    pub fn abs_value(&self, r: f64) -> f64 {
        match self.profile {
            RadialProfile::Exponential { gamma, scale } => gamma * (-r / scale).exp(),
            RadialProfile::Gaussian { gamma, width } => gamma * (-(r / width).powi(2)).exp(),
            RadialProfile::InverseSquare { c0, r0, r1 } => {
                if (r0..=r1).contains(&r) {
                    0.25 * c0 / (r * r)
                } else {
                    0.0
                }
            }
            RadialProfile::Step { gamma, radius } => {
                if r <= radius {
                    gamma
                } else {
                    0.0
                }
            }
        }
    }

    pub fn value(&self, r: f64) -> c64 {
        c64::from_polar(self.abs_value(r), self.phase)
    }

    pub fn sqrt_abs(&self, r: f64) -> f64 {
        self.abs_value(r).sqrt()
    }

    /// `int_{R^3} |V|^p dx` in closed form.
    pub fn lp_integral(&self, p: f64) -> f64 {
        match self.profile {
            RadialProfile::Exponential { gamma, scale } => 8.0 * PI * gamma.powf(p) * (scale / p).powi(3),
            RadialProfile::Gaussian { gamma, width } => PI.powf(1.5) * gamma.powf(p) * width.powi(3) * p.powf(-1.5),
            RadialProfile::InverseSquare { c0, r0, r1 } => {
                let e = 3.0 - 2.0 * p;
                let radial = if e.abs() < 1e-14 { (r1 / r0).ln() } else { (r1.powf(e) - r0.powf(e)) / e };
                4.0 * PI * (0.25 * c0).powf(p) * radial
            }
            RadialProfile::Step { gamma, radius } => 4.0 * PI / 3.0 * gamma.powf(p) * radius.powi(3),
        }
    }

    /// `||V||_{L^p(R^3)}` in closed form.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.lp_integral(p).powf(1.0 / p)
    }

    /// `||V||_{L^p(R^3)}` by quadrature on `grid`.
    pub fn lp_norm_quadrature(&self, p: f64, grid: &QuadratureGrid) -> f64 {
        (4.0 * PI * grid.integrate(|r| self.abs_value(r).powf(p) * r * r)).powf(1.0 / p)
    }

    /// Fraction of `int |V| r^2 dr` below `r`.
    fn mass_cdf(&self, r: f64) -> f64 {
        match self.profile {
            RadialProfile::Exponential { scale, .. } => exponential_cdf(r.max(0.0) / scale),
            RadialProfile::Gaussian { width, .. } => gaussian_cdf(r.max(0.0) / width),
            RadialProfile::InverseSquare { r0, r1, .. } => (r.clamp(r0, r1) - r0) / (r1 - r0),
            RadialProfile::Step { radius, .. } => (r.clamp(0.0, radius) / radius).powi(3),
        }
    }

    /// Fraction of `int |V| r^2 dr` outside `[lo, hi]`.
    pub fn tail_fraction(&self, lo: f64, hi: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        (self.mass_cdf(lo) + 1.0 - self.mass_cdf(hi)).max(0.0)
    }

    pub fn check_truncation(&self, domain: &Domain) -> Result<()> {
        let tail = self.tail_fraction(domain.lo, domain.hi);
        if tail > TAIL_TOL {
            return Err(Error::Truncation { tail, tol: TAIL_TOL });
        }
        Ok(())
    }

    /// Interval carrying all but a negligible part of the mass.
    pub fn support(&self) -> Domain {
        let (lo, hi) = match self.profile {
            RadialProfile::Exponential { scale, .. } => (0.0, scale * quantile(exponential_cdf, SUPPORT_TOL)),
            RadialProfile::Gaussian { width, .. } => (0.0, width * quantile(gaussian_cdf, SUPPORT_TOL)),
            RadialProfile::InverseSquare { r0, r1, .. } => (r0, r1),
            RadialProfile::Step { radius, .. } => (0.0, radius),
        };
        Domain { lo, hi }
    }

    /// Panel edges over the support: uniform, or geometric for the
    /// inverse-square profile whose scale is `r` itself.
    pub fn panel_edges(&self, panels: usize) -> Vec<f64> {
        let d = self.support();
        let k = panels.max(1);
        match self.profile {
            RadialProfile::InverseSquare { .. } => {
                let ratio = (d.hi / d.lo).ln() / k as f64;
                let mut e: Vec<f64> = (0..=k).map(|j| d.lo * (ratio * j as f64).exp()).collect();
                e[k] = d.hi;
                e
            }
            _ => (0..=k).map(|j| d.lo + d.length() * j as f64 / k as f64).collect(),
        }
    }

    /// Composite Gauss-Legendre rule on the support with about `n` nodes.
    pub fn grid(&self, n: usize) -> Result<QuadratureGrid> {
        let edges = self.panel_edges(n / DEFAULT_PANEL_ORDER);
        QuadratureGrid::from_edges(self.support(), &edges, DEFAULT_PANEL_ORDER)
    }

    /// Grid with panels resolving the profile's length scale.
    pub fn default_grid(&self) -> Result<QuadratureGrid> {
        let d = self.support();
        let panels = match self.profile {
            RadialProfile::Exponential { scale, .. } => (d.hi / (0.5 * scale)).ceil(),
            RadialProfile::Gaussian { width, .. } => (d.hi / (0.25 * width)).ceil(),
            RadialProfile::InverseSquare { .. } => ((d.hi / d.lo).ln() / 0.5).ceil(),
            RadialProfile::Step { .. } => 40.0,
        } as usize;
        self.grid(panels.max(4) * DEFAULT_PANEL_ORDER)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tail_fractions() {
        let p = RadialPotential::exponential(1.0, 1.0).unwrap();
        assert!(p.tail_fraction(0.0, p.support().hi) <= SUPPORT_TOL * 1.01);
        assert_relative_eq!(p.tail_fraction(0.0, 0.0), 1.0);
        let s = RadialPotential::step(2.0, 2.0).unwrap();
        assert_relative_eq!(s.tail_fraction(1.0, 3.0), 0.125);
        assert!(s.check_truncation(&Domain { lo: 0.0, hi: 1.9 }).is_err());
    }

    #[test]
    fn scaling_reuses_norms() {
        let p = RadialPotential::gaussian(1.0, 1.5).unwrap();
        let q = p.scaled(3.0).unwrap();
        let fresh = RadialPotential::gaussian(3.0, 1.5).unwrap();
        assert_relative_eq!(q.norms.l32, fresh.norms.l32, max_relative = 1e-14);
        assert_relative_eq!(q.norms.rollnik, fresh.norms.rollnik, max_relative = 1e-12);
    }
}
