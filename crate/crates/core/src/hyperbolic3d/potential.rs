use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::{gauss_legendre_rule, Domain, QuadratureGrid, DEFAULT_PANEL_ORDER};
use crate::numerics::C0;

/// Relative mass of `|V| sinh^2(rho)` allowed outside a truncated domain.
pub const TAIL_TOL: f64 = 1e-10;

const SUPPORT_TOL: f64 = 1e-13;

/// Radial profiles over the geodesic radius `rho`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum HyperbolicProfile {
    /// `(c0 / 4) rho^{-2}` on `[rho0, rho1]`.
    InverseSquare { c0: f64, rho0: f64, rho1: f64 },
    /// `gamma sech^2(alpha rho)`; `alpha > 1` keeps `|V| sinh^2` integrable.
    Sech2 { gamma: f64, alpha: f64 },
    /// `gamma exp(1 - 1 / (1 - (rho / radius)^2))` on `[0, radius)`.
    Bump { gamma: f64, radius: f64 },
    /// Linear interpolation of complex samples, zero outside their range.
    Tabulated { rho: Vec<f64>, v: Vec<c64> },
}

/// `V(rho) = profile(rho) exp(i phase)` on hyperbolic space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicRadialPotential {
    pub profile: HyperbolicProfile,
    pub phase: f64,
    /// Form-subordination constant, once certified.
    pub subordination: Option<f64>,
}

impl HyperbolicRadialPotential {
    pub fn new(profile: HyperbolicProfile, phase: f64) -> Result<Self> {
        let ok = match &profile {
            HyperbolicProfile::InverseSquare { c0, rho0, rho1 } => *c0 >= 0.0 && c0.is_finite() && *rho0 > 0.0 && rho1 > rho0,
            HyperbolicProfile::Sech2 { gamma, alpha } => *gamma >= 0.0 && gamma.is_finite() && *alpha > 1.0,
            HyperbolicProfile::Bump { gamma, radius } => *gamma >= 0.0 && gamma.is_finite() && *radius > 0.0,
            HyperbolicProfile::Tabulated { rho, v } => {
                rho.len() >= 2
                    && rho.len() == v.len()
                    && rho[0] >= 0.0
                    && rho.windows(2).all(|w| w[1] > w[0])
                    && v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
            }
        };
        if !ok || !phase.is_finite() {
            return Err(Error::Usage(format!("invalid hyperbolic profile {profile:?}")));
        }
        Ok(Self { profile, phase, subordination: None })
    }

    pub fn inverse_square(c0: f64, rho0: f64, rho1: f64) -> Result<Self> {
        Self::new(HyperbolicProfile::InverseSquare { c0, rho0, rho1 }, 0.0)
    }

    pub fn sech2(gamma: f64, alpha: f64) -> Result<Self> {
        Self::new(HyperbolicProfile::Sech2 { gamma, alpha }, 0.0)
    }

    pub fn bump(gamma: f64, radius: f64) -> Result<Self> {
        Self::new(HyperbolicProfile::Bump { gamma, radius }, 0.0)
    }

    pub fn tabulated(rho: Vec<f64>, v: Vec<c64>) -> Result<Self> {
        Self::new(HyperbolicProfile::Tabulated { rho, v }, 0.0)
    }

    pub fn zero() -> Self {
        Self::bump(0.0, 1.0).expect("valid profile")
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    /// `factor * V`; drops any certified constant.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(Error::Usage(format!("scale factor {factor} must be finite and >= 0")));
        }
        let mut profile = self.profile.clone();
        match &mut profile {
            HyperbolicProfile::InverseSquare { c0, .. } => *c0 *= factor,
            HyperbolicProfile::Sech2 { gamma, .. } | HyperbolicProfile::Bump { gamma, .. } => *gamma *= factor,
            HyperbolicProfile::Tabulated { v, .. } => v.iter_mut().for_each(|z| *z *= factor),
        }
        Ok(Self { profile, phase: self.phase, subordination: None })
    }

    pub fn is_zero(&self) -> bool {
        match &self.profile {
            HyperbolicProfile::InverseSquare { c0, .. } => *c0 == 0.0,
            HyperbolicProfile::Sech2 { gamma, .. } | HyperbolicProfile::Bump { gamma, .. } => *gamma == 0.0,
            HyperbolicProfile::Tabulated { v, .. } => v.iter().all(|z| *z == C0),
        }
    }

    pub fn value(&self, rho: f64) -> c64 {
        let base = match &self.profile {
            HyperbolicProfile::InverseSquare { c0, rho0, rho1 } => {
                if (*rho0..=*rho1).contains(&rho) {
                    c64::new(0.25 * c0 / (rho * rho), 0.0)
                } else {
                    C0
                }
            }
            HyperbolicProfile::Sech2 { gamma, alpha } => c64::new(gamma / (alpha * rho).cosh().powi(2), 0.0),
            HyperbolicProfile::Bump { gamma, radius } => {
                let s = rho / radius;
                if s < 1.0 {
                    c64::new(gamma * (1.0 - 1.0 / (1.0 - s * s)).exp(), 0.0)
                } else {
                    C0
                }
            }
            HyperbolicProfile::Tabulated { rho: xs, v } => {
                if rho < xs[0] || rho > xs[xs.len() - 1] {
                    C0
                } else {
                    let k = xs.partition_point(|&x| x <= rho).clamp(1, xs.len() - 1);
                    let t = (rho - xs[k - 1]) / (xs[k] - xs[k - 1]);
                    v[k - 1] * (1.0 - t) + v[k] * t
                }
            }
        };
        base * c64::from_polar(1.0, self.phase)
    }

    pub fn abs_value(&self, rho: f64) -> f64 {
        self.value(rho).norm()
    }

    pub fn sqrt_abs(&self, rho: f64) -> f64 {
        self.abs_value(rho).sqrt()
    }

    /// `V / |V|^{1/2}`, zero where `V` vanishes.
    pub fn sgn_sqrt(&self, rho: f64) -> c64 {
        let v = self.value(rho);
        let a = v.norm();
        if a == 0.0 {
            C0
        } else {
            v / a.sqrt()
        }
    }

    /// Points where the profile is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.profile {
            HyperbolicProfile::InverseSquare { rho0, rho1, .. } => vec![*rho0, *rho1],
            HyperbolicProfile::Sech2 { .. } => vec![],
            HyperbolicProfile::Bump { radius, .. } => vec![*radius],
            HyperbolicProfile::Tabulated { rho, .. } => rho.clone(),
        }
    }

    /// `int_a^b |V| sinh^2(rho) d rho` on panels of width at most 0.05.
    fn mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let (t, w) = gauss_legendre_rule(8);
        let mut cuts = vec![a];
        cuts.extend(self.breakpoints().into_iter().filter(|&x| x > a && x < b));
        cuts.push(b);
        let mut total = 0.0;
        for c in cuts.windows(2) {
            let k = ((c[1] - c[0]) / 0.05).ceil().max(1.0) as usize;
            let h = (c[1] - c[0]) / k as f64;
            for j in 0..k {
                let mid = c[0] + h * (j as f64 + 0.5);
                total += t
                    .iter()
                    .zip(&w)
                    .map(|(ti, wi)| {
                        let x = mid + 0.5 * h * ti;
                        wi * 0.5 * h * self.abs_value(x) * x.sinh().powi(2)
                    })
                    .sum::<f64>();
            }
        }
        total
    }

    /// Interval carrying all but a negligible part of `|V| sinh^2`.
    pub fn support(&self) -> Domain {
        let (lo, hi) = match &self.profile {
            HyperbolicProfile::InverseSquare { rho0, rho1, .. } => (*rho0, *rho1),
            HyperbolicProfile::Bump { radius, .. } => (0.0, *radius),
            HyperbolicProfile::Tabulated { rho, .. } => (rho[0], rho[rho.len() - 1]),
            HyperbolicProfile::Sech2 { gamma, alpha } => {
                // Tail beyond R is at most gamma exp(-2 (alpha - 1) R) / (2 (alpha - 1)).
                let d = 2.0 * (alpha - 1.0);
                let total = self.mass(0.0, 1.0).max(f64::MIN_POSITIVE);
                let r = ((gamma.max(f64::MIN_POSITIVE) / (d * SUPPORT_TOL * total)).ln() / d).max(1.0);
                (0.0, r)
            }
        };
        Domain { lo, hi }
    }

    /// Fraction of `int |V| sinh^2(rho)` outside `[lo, hi]`.
    pub fn tail_fraction(&self, lo: f64, hi: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let s = self.support();
        let total = self.mass(s.lo, s.hi);
        let inside = self.mass(lo.max(s.lo), hi.min(s.hi));
        ((total - inside) / total).max(0.0)
    }

    pub fn check_truncation(&self, domain: &Domain) -> Result<()> {
        let tail = self.tail_fraction(domain.lo, domain.hi);
        if tail > TAIL_TOL {
            return Err(Error::Truncation { tail, tol: TAIL_TOL });
        }
        Ok(())
    }

    /// Composite rule on the support with about `n` nodes. Panels are
    /// geometric for the inverse-square profile and aligned with the
    /// breakpoints otherwise.
    pub fn grid(&self, n: usize) -> Result<QuadratureGrid> {
        let d = self.support();
        let k = (n / DEFAULT_PANEL_ORDER).max(1);
        match self.profile {
            HyperbolicProfile::InverseSquare { .. } => {
                let ratio = (d.hi / d.lo).ln() / k as f64;
                let mut e: Vec<f64> = (0..=k).map(|j| d.lo * (ratio * j as f64).exp()).collect();
                e[k] = d.hi;
                QuadratureGrid::from_edges(d, &e, DEFAULT_PANEL_ORDER)
            }
            _ => QuadratureGrid::aligned(d, &self.breakpoints(), n, DEFAULT_PANEL_ORDER),
        }
    }

    /// Default resolution: 20 panels, more for long supports.
    pub fn default_grid(&self) -> Result<QuadratureGrid> {
        let d = self.support();
        let panels = match self.profile {
            HyperbolicProfile::InverseSquare { .. } => ((d.hi / d.lo).ln() / 0.25).ceil() as usize,
            _ => ((d.length() / 0.1).ceil() as usize).max(20),
        };
        self.grid(panels * DEFAULT_PANEL_ORDER)
    }
}
