use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::{gauss_legendre_rule, Domain, QuadratureGrid, DEFAULT_PANEL_ORDER};
use crate::numerics::{c, C0};

/// Relative tail mass allowed outside a truncated domain.
pub const TAIL_TOL: f64 = 1e-10;

/// Built-in potential families on the line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `gamma` on `[a, b]`, zero elsewhere.
    ComplexStep { gamma: c64, a: f64, b: f64 },
    /// `-s (s + 1) alpha^2 sech^2(alpha x)` with bound states
    /// `-alpha^2 (s - k)^2`, `0 <= k < s`.
    PoschlTeller { s: f64, alpha: f64 },
    /// `amplitude exp(-(x / width)^2)`.
    Gaussian { amplitude: c64, width: f64 },
    /// Linear interpolation of the samples, zero outside their range.
    Tabulated { x: Vec<f64>, v: Vec<c64> },
}

/// Complex potential with cached norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub family: Family,
    l1: f64,
    sup: f64,
}

impl PotentialSpec {
    pub fn new(family: Family) -> Result<Self> {
        match &family {
            Family::ComplexStep { gamma, a, b } => {
                if !(a < b) || !gamma.re.is_finite() || !gamma.im.is_finite() {
                    return Err(Error::Usage("step needs a < b and finite gamma".into()));
                }
            }
            Family::PoschlTeller { s, alpha } => {
                if !(*s >= 0.0 && *alpha > 0.0) {
                    return Err(Error::Usage("Poschl-Teller needs s >= 0 and alpha > 0".into()));
                }
            }
            Family::Gaussian { amplitude, width } => {
                if !(*width > 0.0) || !amplitude.re.is_finite() || !amplitude.im.is_finite() {
                    return Err(Error::Usage("Gaussian needs width > 0 and finite amplitude".into()));
                }
            }
            Family::Tabulated { x, v } => {
                if x.len() < 2 || x.len() != v.len() {
                    return Err(Error::Usage("tabulated potential needs >= 2 samples of (x, V)".into()));
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Usage("tabulated x must be strictly increasing".into()));
                }
                if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Usage("tabulated V must be finite".into()));
                }
            }
        }
        let mut p = Self { family, l1: 0.0, sup: 0.0 };
        p.l1 = p.compute_l1();
        p.sup = p.compute_sup();
        Ok(p)
    }

    pub fn complex_step(gamma: c64, a: f64, b: f64) -> Result<Self> {
        Self::new(Family::ComplexStep { gamma, a, b })
    }

    /// `-depth` on `[-half_width, half_width]`.
    pub fn square_well(depth: f64, half_width: f64) -> Result<Self> {
        Self::complex_step(c(-depth, 0.0), -half_width, half_width)
    }

    pub fn poschl_teller(s: f64, alpha: f64) -> Result<Self> {
        Self::new(Family::PoschlTeller { s, alpha })
    }

    pub fn gaussian(amplitude: c64, width: f64) -> Result<Self> {
        Self::new(Family::Gaussian { amplitude, width })
    }

    pub fn tabulated(x: Vec<f64>, v: Vec<c64>) -> Result<Self> {
        Self::new(Family::Tabulated { x, v })
    }

    pub fn zero() -> Self {
        Self::complex_step(C0, 0.0, 1.0).expect("valid")
    }

    pub fn value(&self, x: f64) -> c64 {
        match &self.family {
            Family::ComplexStep { gamma, a, b } => {
                if x >= *a && x <= *b {
                    *gamma
                } else {
                    C0
                }
            }
            Family::PoschlTeller { s, alpha } => {
                let sech = 1.0 / (alpha * x).cosh();
                c(-s * (s + 1.0) * alpha * alpha * sech * sech, 0.0)
            }
            Family::Gaussian { amplitude, width } => amplitude * (-(x / width).powi(2)).exp(),
            Family::Tabulated { x: xs, v } => {
                if x < xs[0] || x > xs[xs.len() - 1] {
                    return C0;
                }
                let k = xs.partition_point(|&t| t <= x).clamp(1, xs.len() - 1);
                let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
                v[k - 1] * (1.0 - t) + v[k] * t
            }
        }
    }

    /// `A(x) = |V(x)|^{1/2}`.
    pub fn sqrt_abs(&self, x: f64) -> f64 {
        self.value(x).norm().sqrt()
    }

    /// `conj(B(x)) = sgn V(x) |V(x)|^{1/2}`, so that `conj(B) A = V`.
    pub fn sgn_sqrt(&self, x: f64) -> c64 {
        let v = self.value(x);
        let r = v.norm();
        if r == 0.0 {
            C0
        } else {
            v / r.sqrt()
        }
    }

    /// `||V||_{L^1}`.
    pub fn l1_norm(&self) -> f64 {
        self.l1
    }

    /// `||V||_{L^inf}`.
    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    pub fn is_zero(&self) -> bool {
        self.l1 == 0.0
    }

    /// Points where the potential is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.family {
            Family::ComplexStep { a, b, .. } => vec![*a, *b],
            Family::Tabulated { x, .. } => x.clone(),
            _ => vec![],
        }
    }

    /// Fraction of `||V||_1` lying outside `[lo, hi]`.
    pub fn tail_fraction(&self, lo: f64, hi: f64) -> f64 {
        if self.l1 == 0.0 {
            return 0.0;
        }
        match &self.family {
            Family::ComplexStep { a, b, .. } => {
                let inside = (b.min(hi) - a.max(lo)).max(0.0);
                1.0 - inside / (b - a)
            }
            Family::PoschlTeller { alpha, .. } => {
                // Mass right of hi is (1 - tanh(alpha hi)) / 2 of the total.
                let right = 1.0 / (1.0 + (2.0 * alpha * hi).exp());
                let left = 1.0 / (1.0 + (-2.0 * alpha * lo).exp());
                right + left
            }
            Family::Gaussian { width, .. } => 0.5 * (libm::erfc(hi / width) + libm::erfc(-lo / width)),
            Family::Tabulated { x, .. } => {
                let (x0, x1) = (x[0], x[x.len() - 1]);
                let mut out = 0.0;
                if lo > x0 {
                    out += self.abs_integral(x0, lo.min(x1));
                }
                if hi < x1 {
                    out += self.abs_integral(hi.max(x0), x1);
                }
                out / self.l1
            }
        }
    }

    /// Smallest interval outside which at most `tol` of `||V||_1` remains
    /// (the support for compactly supported families).
    pub fn truncation(&self, tol: f64) -> Result<Domain> {
        match &self.family {
            Family::ComplexStep { a, b, .. } => Domain::interval(*a, *b),
            Family::Tabulated { x, .. } => Domain::interval(x[0], x[x.len() - 1]),
            Family::PoschlTeller { alpha, .. } => {
                // 2 / (1 + e^{2 alpha L}) = tol
                let l = 0.5 * (2.0 / tol - 1.0).ln() / alpha;
                Domain::symmetric(l)
            }
            Family::Gaussian { width, .. } => {
                let (mut lo, mut hi) = (0.0, 40.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if libm::erfc(mid) > tol {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Domain::symmetric(hi * width)
            }
        }
    }

    /// Default domain: the truncation at [`TAIL_TOL`].
    pub fn default_domain(&self) -> Result<Domain> {
        self.truncation(TAIL_TOL)
    }

    /// Composite Gauss-Legendre grid of about `n` nodes over `domain`, with
    /// panel edges on every breakpoint.
    pub fn grid(&self, domain: Domain, n: usize) -> Result<QuadratureGrid> {
        if n < DEFAULT_PANEL_ORDER {
            return Err(Error::Usage(format!("grid needs at least {DEFAULT_PANEL_ORDER} nodes, got {n}")));
        }
        QuadratureGrid::aligned(domain, &self.breakpoints(), n, DEFAULT_PANEL_ORDER)
    }

    /// Errors when more than [`TAIL_TOL`] of the mass lies outside `domain`.
    pub fn check_truncation(&self, domain: &Domain) -> Result<()> {
        let tail = self.tail_fraction(domain.lo, domain.hi);
        if tail > TAIL_TOL {
            return Err(Error::Truncation { tail, tol: TAIL_TOL });
        }
        Ok(())
    }

    /// Mean of `V` over `[x - h/2, x + h/2]`, split at breakpoints.
    pub fn cell_average(&self, x: f64, h: f64) -> c64 {
        let (lo, hi) = (x - 0.5 * h, x + 0.5 * h);
        let mut cuts = vec![lo];
        cuts.extend(self.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
        cuts.push(hi);
        let (t, w) = gauss_legendre_rule(6);
        let mut acc = C0;
        for e in cuts.windows(2) {
            let (mid, half) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            for (ti, wi) in t.iter().zip(&w) {
                acc += self.value(mid + half * ti) * (half * wi);
            }
        }
        acc / h
    }

    /// Lower bound on `Re V` and the range of `Im V`.
    pub fn value_bounds(&self) -> (f64, f64, f64) {
        match &self.family {
            Family::ComplexStep { gamma, .. } => (gamma.re.min(0.0), gamma.im.min(0.0), gamma.im.max(0.0)),
            Family::PoschlTeller { s, alpha } => (-s * (s + 1.0) * alpha * alpha, 0.0, 0.0),
            Family::Gaussian { amplitude, .. } => {
                (amplitude.re.min(0.0), amplitude.im.min(0.0), amplitude.im.max(0.0))
            }
            Family::Tabulated { v, .. } => {
                let fold = |f: fn(f64, f64) -> f64, g: fn(&c64) -> f64, init: f64| v.iter().map(g).fold(init, f);
                (
                    fold(f64::min, |z| z.re, 0.0),
                    fold(f64::min, |z| z.im, 0.0),
                    fold(f64::max, |z| z.im, 0.0),
                )
            }
        }
    }

    fn abs_integral(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        let mut edges = vec![lo];
        edges.extend(self.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
        edges.push(hi);
        let (t, w) = gauss_legendre_rule(20);
        let mut acc = 0.0;
        for e in edges.windows(2) {
            // Tabulated segments are short; subdivide anyway so a zero crossing
            // of |V| inside a segment costs little accuracy.
            let pieces = 8;
            for p in 0..pieces {
                let a = e[0] + (e[1] - e[0]) * p as f64 / pieces as f64;
                let b = e[0] + (e[1] - e[0]) * (p + 1) as f64 / pieces as f64;
                let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                for (ti, wi) in t.iter().zip(&w) {
                    acc += self.value(mid + half * ti).norm() * half * wi;
                }
            }
        }
        acc
    }

    fn compute_l1(&self) -> f64 {
        match &self.family {
            Family::ComplexStep { gamma, a, b } => gamma.norm() * (b - a),
            Family::PoschlTeller { s, alpha } => 2.0 * s * (s + 1.0) * alpha,
            Family::Gaussian { amplitude, width } => amplitude.norm() * width * std::f64::consts::PI.sqrt(),
            Family::Tabulated { x, .. } => self.abs_integral(x[0], x[x.len() - 1]),
        }
    }

    fn compute_sup(&self) -> f64 {
        match &self.family {
            Family::ComplexStep { gamma, .. } => gamma.norm(),
            Family::PoschlTeller { s, alpha } => s * (s + 1.0) * alpha * alpha,
            Family::Gaussian { amplitude, .. } => amplitude.norm(),
            Family::Tabulated { v, .. } => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }
}
