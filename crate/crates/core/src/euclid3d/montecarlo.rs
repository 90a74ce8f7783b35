//! Six-dimensional Monte-Carlo estimate of the Rollnik norm.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::potential::RadialPotential;
use crate::error::{Error, Result};
use crate::numerics::quadrature::gauss_legendre_rule;

/// Samples drawn from one ChaCha stream.
pub const CHUNK: usize = 1 << 16;

const CELLS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Square root of the sample mean.
    pub value: f64,
    /// Standard error of `value` from the sample variance. The integrand has
    /// infinite variance near the diagonal, so treat it as indicative.
    pub std_err: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Radius sampler: cell `k` with probability `mass_k / total`, uniform inside.
struct RadialSampler {
    edges: Vec<f64>,
    cdf: Vec<f64>,
    mass: Vec<f64>,
}

impl RadialSampler {
    fn new(p: &RadialPotential) -> Self {
        let edges = p.panel_edges(CELLS);
        let (t, w) = gauss_legendre_rule(4);
        let mass: Vec<f64> = edges
            .windows(2)
            .map(|e| {
                let (half, mid) = (0.5 * (e[1] - e[0]), 0.5 * (e[0] + e[1]));
                t.iter().zip(&w).map(|(ti, wi)| wi * half * p.abs_value(mid + half * ti) * (mid + half * ti).powi(2)).sum()
            })
            .collect();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = mass.iter().map(|m| {
            acc += m;
            acc
        }).collect();
        cdf.iter_mut().for_each(|c| *c /= acc);
        let mass = mass.iter().map(|m| m / acc).collect();
        Self { edges, cdf, mass }
    }

    /// A radius and its importance weight `4 pi |V(r)| r^2 / q(r)`.
    fn draw<R: Rng>(&self, p: &RadialPotential, rng: &mut R) -> (f64, f64) {
        let u: f64 = rng.gen();
        let k = self.cdf.partition_point(|&c| c < u).min(self.mass.len() - 1);
        let (a, b) = (self.edges[k], self.edges[k + 1]);
        let r = a + (b - a) * rng.gen::<f64>();
        let q = self.mass[k] / (b - a);
        (r, 4.0 * PI * p.abs_value(r) * r * r / q)
    }
}

/// Estimate of `(int int |V(x)| |V(y)| |x - y|^{-2} dx dy)^{1/2}` from
/// `samples` independent pairs `(x, y)` drawn with radial density close to
/// `|V(r)| r^2` and uniform directions. Chunk `j` uses ChaCha stream `j` of
/// `seed`, so the result does not depend on the thread schedule.
pub fn rollnik_monte_carlo(p: &RadialPotential, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::Usage("Monte-Carlo needs at least one sample".into()));
    }
    if p.is_zero() {
        return Ok(McEstimate { value: 0.0, std_err: 0.0, samples, seed });
    }
    let sampler = RadialSampler::new(p);
    let chunks = samples.div_ceil(CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let n = CHUNK.min(samples - j * CHUNK);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let (r, wr) = sampler.draw(p, &mut rng);
                let (rp, wp) = sampler.draw(p, &mut rng);
                let e: [f64; 3] = UnitSphere.sample(&mut rng);
                let f: [f64; 3] = UnitSphere.sample(&mut rng);
                let d2: f64 = (0..3).map(|i| (r * e[i] - rp * f[i]).powi(2)).sum();
                let x = wr * wp / d2;
                s1 += x;
                s2 += x * x;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0);
    let value = mean.sqrt();
    Ok(McEstimate { value, std_err: 0.5 * (var / n).sqrt() / value, samples, seed })
}
