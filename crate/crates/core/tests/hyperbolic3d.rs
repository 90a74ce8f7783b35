use std::f64::consts::{FRAC_PI_4, PI};

use approx::assert_relative_eq;
use bslab::abstract_lab::StabilityClass;
use bslab::hyperbolic3d::*;
use bslab::numerics::c;
use bslab::numerics::linalg::operator_norm;
use bslab::numerics::quadrature::{gauss_legendre_rule, integrate_endpoint_singular};
use bslab::schrodinger1d::{BsOptions, FdOptions};
use faer::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gl(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (t, w) = gauss_legendre_rule(12);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + h * (k as f64 + 0.5);
            t.iter().zip(&w).map(|(ti, wi)| f(mid + 0.5 * h * ti) * 0.5 * h * wi).sum::<f64>()
        })
        .sum()
}

fn singular_c(f: impl Fn(f64) -> c64, a: f64, b: f64) -> c64 {
    c(integrate_endpoint_singular(|x| f(x).re, a, b), integrate_endpoint_singular(|x| f(x).im, a, b))
}

/// Largest `c` with `-u'' + eps^2 u = c^{-1} |V| u`, `u(0) = 0` and the
/// exterior condition `u'(R) = -eps u(R)`: the subordination constant of a
/// compactly supported radial potential read off at `1 - eps^2`, by finite
/// differences and power iteration, Richardson-extrapolated.
fn form_constant(p: &HyperbolicRadialPotential, eps: f64) -> f64 {
    let big_r = p.support().hi;
    let solve = |n: usize| -> f64 {
        let h = big_r / n as f64;
        let v: Vec<f64> = (1..=n).map(|j| p.abs_value(j as f64 * h) * h * h).collect();
        let mut x = vec![1.0; n];
        let mut c = 0.0;
        for _ in 0..400 {
            let mut diag = vec![2.0 + eps * eps * h * h; n];
            diag[n - 1] += 2.0 * eps * h;
            let mut y: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a * b).collect();
            for i in 1..n {
                let m = if i == n - 1 { -2.0 } else { -1.0 } / diag[i - 1];
                diag[i] += m;
                y[i] -= m * y[i - 1];
            }
            y[n - 1] /= diag[n - 1];
            for i in (0..n - 1).rev() {
                y[i] = (y[i] + y[i + 1]) / diag[i];
            }
            let next = y.iter().map(|a| a * a).sum::<f64>().sqrt() / x.iter().map(|a| a * a).sum::<f64>().sqrt();
            x = y;
            let done = (next - c).abs() <= 1e-15 * next;
            c = next;
            if done {
                break;
            }
        }
        c
    };
    let (a, b) = (solve(8000), solve(16000));
    (4.0 * b - a) / 3.0
}

fn unit_bump() -> HyperbolicRadialPotential {
    HyperbolicRadialPotential::bump(1.0, 2.0).unwrap()
}

/// The bump rescaled to subordination constant `target`.
fn bump_at(target: f64, phase: f64) -> HyperbolicRadialPotential {
    let p = unit_bump();
    let c0 = subordination_certificate(&p, &p.default_grid().unwrap()).unwrap().constant();
    p.scaled(target / c0).unwrap().with_phase(phase)
}

#[test]
fn green_closed_form_and_dominance() {
    for rho in [0.1, 1.0, 4.0] {
        let g = green_h3(c(-3.0, 0.0), rho).unwrap();
        assert_relative_eq!(g.re, (-2.0 * rho).exp() / (4.0 * PI * rho.sinh()), max_relative = 1e-14);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let z = c(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        let rho = rng.gen_range(1e-6..10.0);
        assert!(green_h3(z, rho).unwrap().norm() <= green_h3(c(1.0, 0.0), rho).unwrap().norm() * (1.0 + 1e-14));
    }
    assert!(green_h3(c(2.0, 0.0), 1.0).is_err());
}

#[test]
fn green_is_the_laplace_transform_of_the_heat_kernel() {
    // (H0 + 1)^{-1} = int_0^inf e^{-t} p_t dt with
    // p_t(rho) = (4 pi t)^{-3/2} (rho / sinh rho) exp(-t - rho^2 / 4t); t = e^s.
    for rho in [0.3f64, 1.0, 2.5] {
        let f = |s: f64| {
            let t = s.exp();
            (4.0 * PI * t).powf(-1.5) * (rho / rho.sinh()) * (-2.0 * t - rho * rho / (4.0 * t)).exp() * t
        };
        let heat = gl(f, -30.0, 6.0, 400);
        assert_relative_eq!(green_h3(c(-1.0, 0.0), rho).unwrap().re, heat, max_relative = 1e-6);
    }
}

#[test]
fn reduced_kernel_matches_the_full_resolvent() {
    let p = unit_bump().with_phase(0.7);
    let g = p.grid(400).unwrap();
    let z = c(-0.5, 0.8);
    let k = assemble_k_h3(&p, &g, z).unwrap();
    let f = |r: f64| r * (-r).exp();
    let sw: Vec<f64> = g.weights.iter().map(|w| w.sqrt()).collect();
    let x: Vec<c64> = g.nodes.iter().zip(&sw).map(|(&r, s)| c(f(r) * s, 0.0)).collect();
    let y = k.apply(&x);
    for i in [37, 150, 301] {
        let r = g.nodes[i];
        // |V|^{1/2}(r) sinh(r) int sinh^2(r') sgn(V)|V|^{1/2}(r') psi(r')
        //   2 pi int_{-1}^{1} G(d) dt dr', psi = f / sinh, t = 1 - 2 w^2.
        let shell = |rp: f64| {
            let (s, sp) = (r.sinh(), rp.sinh());
            let half = ((r - rp) / 2.0).sinh().powi(2);
            let inner = singular_c(
                |w| {
                    let d = 2.0 * (half + w * w * s * sp).sqrt().asinh();
                    green_h3(z, d).unwrap() * (4.0 * w)
                },
                0.0,
                1.0,
            );
            inner * (2.0 * PI * sp * p.sgn_sqrt(rp) * f(rp))
        };
        let top = 2.0;
        let full = (singular_c(|s| shell(r - s), 0.0, r) + singular_c(|s| shell(r + s), 0.0, top - r)) * (p.sqrt_abs(r) * r.sinh());
        let got = y[i] / sw[i];
        assert!((got - full).norm() <= 1e-6 * full.norm(), "{got} vs {full}");
    }
}

#[test]
fn norms_converge_under_grid_doubling() {
    let p = bump_at(0.5, FRAC_PI_4);
    for z in [c(0.0, 0.0), c(0.9, 0.01), c(3.0, 0.5), c(-4.0, -2.0)] {
        let a = operator_norm(&assemble_k_h3(&p, &p.grid(200).unwrap(), z).unwrap());
        let b = operator_norm(&assemble_k_h3(&p, &p.grid(400).unwrap(), z).unwrap());
        assert!((a - b).abs() <= 1e-6 * b, "{z}: {a} vs {b}");
    }
}

#[test]
fn inverse_square_passes_the_pointwise_hardy_check() {
    let p = HyperbolicRadialPotential::inverse_square(0.8, 1e-3, 5.0).unwrap();
    let s = subordination_certificate(&p, &p.default_grid().unwrap()).unwrap();
    assert_relative_eq!(s.hardy.computed, 0.8, max_relative = 1e-12);
    assert!(s.hardy.verdict);
    // The Hardy inequality bounds the spectral constant by the pointwise one.
    assert!(s.constant() <= 0.8 + 1e-6 && s.certificate.verdict, "{}", s.constant());
    let q = HyperbolicRadialPotential::inverse_square(1.2, 1e-3, 5.0).unwrap();
    assert!(!subordination_certificate(&q, &q.default_grid().unwrap()).unwrap().hardy.verdict);
}

#[test]
fn bump_subordination_constant() {
    let p = unit_bump();
    let unit = subordination_certificate(&p, &p.default_grid().unwrap()).unwrap().constant();
    assert_relative_eq!(form_constant(&p, EPSILON), unit, max_relative = 1e-6);
    // Reading the constant off near the threshold costs O(epsilon).
    assert!((form_constant(&p, 0.0) - unit).abs() <= 1e-3 * unit);
    let half = p.scaled(0.5 / unit).unwrap();
    let s = subordination_certificate(&half, &half.grid(400).unwrap()).unwrap();
    assert!((s.constant() - 0.5).abs() <= 1e-3 && s.certificate.verdict);
    assert!(stability_scan(&p.scaled(1.01 / unit).unwrap(), &p.default_grid().unwrap(), &default_h3_zgrid()).is_err());
}

#[test]
fn subordinated_bump_is_stable() {
    let p = bump_at(0.5, FRAC_PI_4);
    let g = p.default_grid().unwrap();
    let r = stability_scan(&p, &g, &default_h3_zgrid()).unwrap();
    assert!(r.sup_norm <= 0.501, "{}", r.sup_norm);
    assert!(r.holds(), "{:?} {:?}", r.exceedances, r.above_reference);
    assert_eq!(r.verdict, StabilityClass::Certified);
    let opts = BsOptions { n: 200, coarse_n: 60, ..BsOptions::default() };
    let hunt = eigenvalue_hunt_h3(&p, &h3_search(-2.0, 3.0, 2.0).unwrap(), &opts).unwrap();
    assert!(hunt.eigenvalues.is_empty(), "{:?}", hunt.eigenvalues);
}

#[test]
fn amplified_bump_eigenvalues_match_finite_differences() {
    let opts = BsOptions { n: 200, coarse_n: 60, ..BsOptions::default() };
    let search = h3_search(-2.0, 3.0, 3.0).unwrap();
    for phase in [PI, 0.75 * PI] {
        let p = bump_at(4.0, phase);
        let bs = eigenvalue_hunt_h3(&p, &search, &opts).unwrap();
        let fd = fd_oracle_h3(&p, &FdOptions::default()).unwrap();
        assert!(!bs.eigenvalues.is_empty());
        for e in &bs.eigenvalues {
            let near = fd.eigenvalues.iter().map(|f| (f.lambda - e.lambda).norm()).fold(f64::INFINITY, f64::min);
            assert!(near <= 1e-3, "phase {phase}: {} has no FD partner ({near})", e.lambda);
        }
        let g = p.default_grid().unwrap();
        let lambdas: Vec<c64> = bs.eigenvalues.iter().map(|e| e.lambda).collect();
        for n in k_norms_at(&p, &g, &lambdas).unwrap() {
            assert!(n >= 1.0 - 1e-3, "{n}");
        }
    }
}

#[test]
fn zero_potential() {
    let p = HyperbolicRadialPotential::zero();
    let g = p.default_grid().unwrap();
    let r = stability_scan(&p, &g, &h3_zgrid(2.0, 0.5, 2, 5, 10.0, 4)).unwrap();
    assert_eq!(r.sup_norm, 0.0);
    assert!(r.holds());
    let opts = BsOptions { n: 200, coarse_n: 60, ..BsOptions::default() };
    assert!(eigenvalue_hunt_h3(&p, &h3_search(-2.0, 3.0, 2.0).unwrap(), &opts).unwrap().eigenvalues.is_empty());
    assert!(fd_oracle_h3(&p, &FdOptions::default()).unwrap().eigenvalues.is_empty());
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(128))]
    #[test]
    fn kappa_has_nonnegative_real_part(re in -100.0f64..100.0, im in -100.0f64..100.0) {
        let z = c(re, im);
        proptest::prop_assume!(!(im == 0.0 && re > 1.0));
        let k = kappa(z);
        proptest::prop_assert!(k.re >= 0.0);
        proptest::prop_assert!((k * k + z - 1.0).norm() <= 1e-12 * (z.norm() + 1.0));
    }
}
