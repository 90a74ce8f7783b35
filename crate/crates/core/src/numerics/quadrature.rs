//! Composite Gauss-Legendre quadrature on intervals and half-lines.

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest panel order `gauss_legendre` picks on its own.
pub const DEFAULT_PANEL_ORDER: usize = 10;

/// Integration domain `(lo, hi)`. Half-lines are `(0, R]` truncated at `R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::Usage(format!("degenerate domain ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    /// `[-l, l]`.
    pub fn symmetric(l: f64) -> Result<Self> {
        Self::interval(-l, l)
    }

    /// `(0, r]`.
    pub fn half_line(r: f64) -> Result<Self> {
        Self::interval(0.0, r)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// One Gauss-Legendre panel: nodes `start..start + order` of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
    pub start: usize,
    pub order: usize,
}

/// Nodes and positive weights of a composite rule.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureGrid {
    pub domain: Domain,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub panels: Vec<Panel>,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the panel holding node `i`.
    pub fn panel_of(&self, i: usize) -> usize {
        self.panels.partition_point(|p| p.start + p.order <= i)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn integrate_c(&self, f: impl Fn(f64) -> c64) -> c64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(c64::new(0.0, 0.0), |acc, (&x, &w)| acc + f(x) * w)
    }

    /// Composite rule with the given panel edges (strictly increasing, first and
    /// last equal to the domain ends).
    pub fn from_edges(domain: Domain, edges: &[f64], order: usize) -> Result<Self> {
        if order < 1 || edges.len() < 2 {
            return Err(Error::Usage("need at least one panel of order >= 1".into()));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Usage("panel edges must be strictly increasing".into()));
        }
        let tol = 1e-12 * domain.length().max(1.0);
        if (edges[0] - domain.lo).abs() > tol || (edges[edges.len() - 1] - domain.hi).abs() > tol {
            return Err(Error::Usage("panel edges must span the domain".into()));
        }
        let (t, w) = gauss_legendre_rule(order);
        let mut nodes = Vec::with_capacity(order * (edges.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut panels = Vec::with_capacity(edges.len() - 1);
        for e in edges.windows(2) {
            let (a, b) = (e[0], e[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            panels.push(Panel { lo: a, hi: b, start: nodes.len(), order });
            for (ti, wi) in t.iter().zip(&w) {
                nodes.push(mid + half * ti);
                weights.push(half * wi);
            }
        }
        Ok(Self { domain, nodes, weights, panels })
    }

    /// Uniform panels whose edges include every breakpoint inside the domain.
    ///
    /// Panels are distributed over the sub-intervals in proportion to their
    /// length, at least one each, for a total of about `n / order`.
    pub fn aligned(domain: Domain, breakpoints: &[f64], n: usize, order: usize) -> Result<Self> {
        let mut cuts: Vec<f64> = vec![domain.lo];
        let mut inner: Vec<f64> =
            breakpoints.iter().copied().filter(|&b| b > domain.lo && b < domain.hi).collect();
        inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
        inner.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        cuts.extend(inner);
        cuts.push(domain.hi);
        let total_panels = (n / order.max(1)).max(cuts.len() - 1);
        let len = domain.length();
        let mut edges = vec![domain.lo];
        for w in cuts.windows(2) {
            let k = ((w[1] - w[0]) / len * total_panels as f64).round().max(1.0) as usize;
            for s in 1..=k {
                edges.push(w[0] + (w[1] - w[0]) * s as f64 / k as f64);
            }
        }
        *edges.last_mut().unwrap() = domain.hi;
        Self::from_edges(domain, &edges, order)
    }

    /// Half-line rule on `(0, R]` with panels refined geometrically toward the
    /// origin down to `r_min` (ratio `q` between consecutive panels), then
    /// uniform panels of width at most `h_max` out to `R`.
    pub fn graded_half_line(r: f64, r_min: f64, q: f64, h_max: f64, order: usize) -> Result<Self> {
        let domain = Domain::half_line(r)?;
        if !(r_min > 0.0 && r_min < r && q > 0.0 && q < 1.0 && h_max > 0.0) {
            return Err(Error::Usage("invalid graded half-line parameters".into()));
        }
        let mut edges = vec![0.0];
        let mut geo = vec![];
        let mut x = h_max.min(r);
        while x > r_min {
            geo.push(x);
            x *= q;
        }
        geo.push(x);
        geo.reverse();
        edges.extend(geo);
        let start = *edges.last().unwrap();
        if start < r {
            let k = ((r - start) / h_max).ceil().max(1.0) as usize;
            for s in 1..=k {
                edges.push(start + (r - start) * s as f64 / k as f64);
            }
        }
        *edges.last_mut().unwrap() = r;
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        Self::from_edges(domain, &edges, order)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre_rule(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_m.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule with `n` nodes on uniform panels.
///
/// The panel order is the largest divisor of `n` not exceeding
/// [`DEFAULT_PANEL_ORDER`]; when `n` has no such divisor of at least 2 a single
/// panel of order `n` is used.
pub fn gauss_legendre(domain: Domain, n: usize) -> Result<QuadratureGrid> {
    if n < 2 {
        return Err(Error::Usage(format!("quadrature needs N >= 2, got {n}")));
    }
    Domain::interval(domain.lo, domain.hi)?;
    let order = (2..=DEFAULT_PANEL_ORDER.min(n)).rev().find(|d| n % d == 0).unwrap_or(n);
    let panels = n / order;
    let edges: Vec<f64> =
        (0..=panels).map(|k| domain.lo + domain.length() * k as f64 / panels as f64).collect();
    QuadratureGrid::from_edges(domain, &edges, order)
}

/// Integral of `f` over `[a, b]` where `f` may carry an integrable
/// (logarithmic or weak power) singularity at `a`. Panels shrink
/// geometrically toward `a`.
pub fn integrate_endpoint_singular(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (t, w) = gauss_legendre_rule(12);
    let mut total = 0.0;
    let mut hi = b;
    let len = b - a;
    let q = 0.5;
    for _ in 0..80 {
        let lo = a + (hi - a) * q;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        total += t.iter().zip(&w).map(|(ti, wi)| wi * half * f(mid + half * ti)).sum::<f64>();
        hi = lo;
        if hi - a < 1e-15 * len {
            break;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_point_rule() {
        let g = gauss_legendre(Domain::interval(-1.0, 1.0).unwrap(), 2).unwrap();
        assert_abs_diff_eq!(g.nodes[0], -1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(g.nodes[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(g.weights[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.weights[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cubic_exactness() {
        let g = gauss_legendre(Domain::interval(0.0, 1.0).unwrap(), 4).unwrap();
        assert_abs_diff_eq!(g.integrate(|x| x * x * x), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn two_sided_exponential() {
        let g = gauss_legendre(Domain::symmetric(40.0).unwrap(), 800).unwrap();
        assert_abs_diff_eq!(g.integrate(|x| (-x.abs()).exp()), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        assert!(gauss_legendre(Domain { lo: 1.0, hi: 1.0 }, 4).is_err());
        assert!(gauss_legendre(Domain::symmetric(1.0).unwrap(), 1).is_err());
        assert!(Domain::interval(2.0, 1.0).is_err());
    }

    #[test]
    fn weights_sum_to_length_and_nodes_increase() {
        for n in [2, 3, 7, 40, 1600] {
            let d = Domain::interval(-3.0, 5.0).unwrap();
            let g = gauss_legendre(d, n).unwrap();
            assert_eq!(g.len(), n);
            let s: f64 = g.weights.iter().sum();
            assert!((s - 8.0).abs() <= 1e-10 * 8.0);
            assert!(g.weights.iter().all(|&w| w > 0.0));
            assert!(g.nodes.windows(2).all(|w| w[1] > w[0]));
            assert!(g.nodes[0] > d.lo && g.nodes[n - 1] < d.hi);
        }
    }

    #[test]
    fn aligned_grid_has_breakpoints_as_edges() {
        let g = QuadratureGrid::aligned(Domain::symmetric(2.0).unwrap(), &[0.0, 1.0], 80, 8).unwrap();
        for b in [0.0, 1.0] {
            assert!(g.panels.iter().any(|p| (p.lo - b).abs() < 1e-14));
        }
        let s: f64 = g.weights.iter().sum();
        assert_abs_diff_eq!(s, 4.0, epsilon = 1e-12);
        assert_eq!(g.panel_of(0), 0);
        assert_eq!(g.panel_of(g.len() - 1), g.panels.len() - 1);
    }

    #[test]
    fn graded_half_line_integrates_log() {
        let g = QuadratureGrid::graded_half_line(2.0, 1e-8, 0.3, 0.25, 10).unwrap();
        // int_0^2 ln r dr = 2 ln 2 - 2
        assert_abs_diff_eq!(g.integrate(f64::ln), 2.0 * 2f64.ln() - 2.0, epsilon = 1e-7);
    }

    #[test]
    fn endpoint_singular_log() {
        let v = integrate_endpoint_singular(|x| x.ln(), 0.0, 1.0);
        assert_abs_diff_eq!(v, -1.0, epsilon = 1e-12);
    }
}
