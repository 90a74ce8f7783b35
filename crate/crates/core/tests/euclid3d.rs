use std::f64::consts::PI;

use approx::assert_relative_eq;
use bslab::euclid3d::*;
use bslab::numerics::c;
use bslab::numerics::quadrature::{gauss_legendre_rule, integrate_endpoint_singular};
use faer::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// First zero of `J_0`.
const J01: f64 = 2.404_825_557_695_773;

fn builtins() -> Vec<RadialPotential> {
    vec![
        RadialPotential::exponential(1.0, 1.0).unwrap(),
        RadialPotential::gaussian(1.0, 1.0).unwrap(),
        RadialPotential::inverse_square(0.8, 0.5, 2.0).unwrap(),
        RadialPotential::step(1.0, 1.0).unwrap(),
    ]
}

/// Composite Gauss-Legendre on `[a, b]` with `panels` equal panels.
fn gl(f: impl Fn(f64) -> c64, a: f64, b: f64, panels: usize) -> c64 {
    let (t, w) = gauss_legendre_rule(12);
    let h = (b - a) / panels as f64;
    let mut s = c64::new(0.0, 0.0);
    for k in 0..panels {
        let mid = a + h * (k as f64 + 0.5);
        for (ti, wi) in t.iter().zip(&w) {
            s += f(mid + 0.5 * h * ti) * (0.5 * h * wi);
        }
    }
    s
}

/// Complex integral with an integrable singularity at `a`.
fn singular_c(f: impl Fn(f64) -> c64, a: f64, b: f64) -> c64 {
    c(integrate_endpoint_singular(|x| f(x).re, a, b), integrate_endpoint_singular(|x| f(x).im, a, b))
}

#[test]
fn norms_match_closed_forms() {
    for p in builtins() {
        let g = p.default_grid().unwrap();
        for q in [1.0, 1.5, 3.0] {
            assert_relative_eq!(p.lp_norm_quadrature(q, &g), p.lp_norm(q), max_relative = 1e-8);
        }
    }
    let p = RadialPotential::exponential(2.0, 1.0).unwrap();
    // int (2 e^{-r})^{3/2} 4 pi r^2 dr = 2^{3/2} 64 pi / 27
    assert_relative_eq!(p.norms.l32, (2f64.powf(1.5) * 64.0 * PI / 27.0).powf(2.0 / 3.0), max_relative = 1e-14);
}

#[test]
fn green_column_solves_the_radial_ode() {
    let z = c(-0.6, 0.8);
    let h = 1e-3;
    for r in [0.4, 1.7, 3.0] {
        let g = |r: f64| green3d(z, r, 1.0).unwrap();
        let d2 = (-g(r + 2.0 * h) + g(r + h) * 16.0 - g(r) * 30.0 + g(r - h) * 16.0 - g(r - 2.0 * h)) / (12.0 * h * h);
        assert!((-d2 - g(r) * z).norm() < 1e-7);
    }
    assert!(green3d(z, 1e-300, 1.0).unwrap().norm() < 1e-290);
}

#[test]
fn radial_action_matches_angular_quadrature() {
    let z = c(-1.0, 0.5);
    let f = |r: f64| (-r * r).exp();
    let top = 8.0;
    for r in [0.5, 1.3] {
        // s-wave: (1 / r) int g(r, r') r' f(r') dr'.
        let swave = |rp: f64| green3d(z, r, rp).unwrap() * (rp * f(rp) / r);
        let reduced = gl(swave, 0.0, r, 40) + gl(swave, r, top, 200);
        // Direct: int r'^2 f(r') 2 pi int_{-1}^{1} G(|x - y|) dt dr' with
        // t = 1 - 2 w^2, dt = 4 w dw.
        let shell = |rp: f64| {
            let inner = singular_c(
                |w| {
                    let s = ((r - rp).powi(2) + 4.0 * r * rp * w * w).sqrt();
                    green3d_free(z, s).unwrap() * (4.0 * w)
                },
                0.0,
                1.0,
            );
            inner * (2.0 * PI * rp * rp * f(rp))
        };
        let direct = singular_c(|s| shell(r - s), 0.0, r) + singular_c(|s| shell(r + s), 0.0, top - r);
        assert!((direct - reduced).norm() <= 1e-6 * reduced.norm(), "{direct} vs {reduced}");
    }
}

#[test]
fn free_kernel_is_dominated_by_the_zero_energy_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    for _ in 0..10_000 {
        let z = c(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        let s = rng.gen_range(1e-6..10.0);
        if green3d_free(z, s).unwrap().norm() > green3d_free(c(0.0, 0.0), s).unwrap().norm() {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

/// Largest `c` with `-u'' = c^{-1} |V| u`, `u(0) = 0`, `u'(R) = 0`, by second
/// order finite differences and power iteration, Richardson-extrapolated.
/// This is `||T||^2` for `T = |V|^{1/2} H_0^{-1/2}` through the quadratic form.
fn form_constant(p: &RadialPotential) -> f64 {
    let big_r = p.support().hi;
    let solve = |n: usize| -> f64 {
        let h = big_r / n as f64;
        let v: Vec<f64> = (1..=n).map(|j| p.abs_value(j as f64 * h) * h * h).collect();
        let mut x = vec![1.0; n];
        let mut c = 0.0;
        for _ in 0..200 {
            // Solve D y = V x, D = tridiag(-1, 2, -1) with the last row (-2, 2).
            let rhs: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a * b).collect();
            let mut diag = vec![2.0; n];
            let mut y = rhs.clone();
            let sub = |i: usize| if i == n - 1 { -2.0 } else { -1.0 };
            for i in 1..n {
                let m = sub(i) / diag[i - 1];
                diag[i] -= m * -1.0;
                y[i] -= m * y[i - 1];
            }
            y[n - 1] /= diag[n - 1];
            for i in (0..n - 1).rev() {
                y[i] = (y[i] + y[i + 1]) / diag[i];
            }
            let ny = y.iter().map(|a| a * a).sum::<f64>().sqrt();
            let nx = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            let next = ny / nx;
            x = y;
            if (next - c).abs() <= 1e-15 * next {
                c = next;
                break;
            }
            c = next;
        }
        c
    };
    let (a, b) = (solve(8000), solve(16000));
    (4.0 * b - a) / 3.0
}

#[test]
fn kato_norm_of_the_exponential() {
    // -u'' = gamma e^{-r} u has a zero-energy solution at gamma = j01^2 / 4.
    let p = RadialPotential::exponential(1.0, 1.0).unwrap();
    let g = p.default_grid().unwrap();
    let unit = kato_L_norm(&p, &g).unwrap().computed;
    assert_relative_eq!(unit, 4.0 / (J01 * J01), max_relative = 1e-8);
    assert_relative_eq!(form_constant(&p), unit, max_relative = 1e-6);
    let half = p.scaled(0.5 / unit).unwrap();
    let k = kato_L_norm(&half, &g).unwrap();
    assert_relative_eq!(k.computed, 0.5, max_relative = 1e-10);
    assert!(k.verdict);
    let z = RadialPotential::zero();
    assert_eq!(kato_L_norm(&z, &g).unwrap().computed, 0.0);
    assert_eq!(fkv_subordination(&z, &g).unwrap().computed, 0.0);
}

#[test]
fn fkv_equals_kato_and_is_linear() {
    for p in builtins() {
        let g = p.default_grid().unwrap();
        let f = fkv_subordination(&p, &g).unwrap().computed;
        let k = kato_L_norm(&p, &g).unwrap().computed;
        assert!((f - k).abs() <= 1e-10, "{:?}: {f} vs {k}", p.profile);
        let f3 = fkv_subordination(&p.scaled(3.0).unwrap(), &g).unwrap().computed;
        assert_relative_eq!(f3, 3.0 * f, max_relative = 1e-10);
    }
}

#[test]
fn form_constant_oracle_for_gaussian() {
    let p = RadialPotential::gaussian(1.0, 1.0).unwrap();
    let f = fkv_subordination(&p, &p.default_grid().unwrap()).unwrap().computed;
    assert_relative_eq!(form_constant(&p), f, max_relative = 1e-6);
}

#[test]
fn rollnik_matches_monte_carlo_on_builtins() {
    for (i, p) in builtins().into_iter().enumerate() {
        let g = p.default_grid().unwrap();
        let r = rollnik_norm(&p, &g).unwrap();
        let mc = rollnik_monte_carlo(&p, 10_000_000, 17 + i as u64).unwrap();
        assert!((mc.value - r.computed).abs() <= 0.02 * r.computed, "{:?}: {} vs MC {:?}", p.profile, r.computed, mc);
        let r2 = rollnik_norm(&p.scaled(2.5).unwrap(), &g).unwrap();
        assert_relative_eq!(r2.computed, 2.5 * r.computed, max_relative = 1e-13);
    }
    let z = RadialPotential::zero();
    let r = rollnik_norm(&z, &z.default_grid().unwrap()).unwrap();
    assert!(r.computed == 0.0 && r.verdict);
}

#[test]
fn monte_carlo_is_reproducible() {
    let p = RadialPotential::gaussian(1.0, 1.0).unwrap();
    let a = rollnik_monte_carlo(&p, 3 * CHUNK + 5, 4).unwrap();
    let b = rollnik_monte_carlo(&p, 3 * CHUNK + 5, 4).unwrap();
    assert_eq!(a, b);
}

#[test]
fn frank_condition_around_threshold() {
    assert!(frank_condition(&RadialPotential::zero()).verdict);
    assert_relative_eq!(frank_condition(&RadialPotential::zero()).margin, frank_threshold());
    let p = RadialPotential::gaussian(1.0, 1.0).unwrap();
    let at = |f: f64| frank_condition(&p.scaled(f * frank_threshold() / p.norms.l32).unwrap());
    assert!(at(0.9).verdict);
    assert!(!at(1.1).verdict);
}

#[test]
fn hardy_constant_is_recovered() {
    let c0 = 0.8;
    let h = hardy_extrapolation(c0, 1e4, &[1e-2, 1e-3, 1e-4]).unwrap();
    assert!(h.constants.windows(2).all(|w| w[1] > w[0]), "{h:?}");
    assert!((h.extrapolated - c0).abs() <= 0.05 * c0, "{h:?}");
}

#[test]
fn chain_on_trivial_and_inverse_square_potentials() {
    let z = RadialPotential::zero();
    let r = implication_chain(&z, &z.default_grid().unwrap()).unwrap();
    assert!(r.holds() && r.frank.verdict && r.rollnik.verdict && r.fkv.verdict && r.kato.verdict);

    let p = RadialPotential::inverse_square(0.95, 1e-12, 1e4).unwrap();
    let r = implication_chain(&p, &p.default_grid().unwrap()).unwrap();
    assert!(!r.frank.verdict);
    assert!(r.fkv.verdict && r.kato.verdict);
    assert!(r.holds(), "{r:?}");
}

#[test]
fn exponential_critical_amplitudes() {
    let p = RadialPotential::exponential(1.0, 1.0).unwrap();
    let a = critical_amplitudes(&p, &p.default_grid().unwrap()).unwrap();
    assert_relative_eq!(a.kato, J01 * J01 / 4.0, max_relative = 1e-8);
    assert_relative_eq!(a.fkv, a.kato, max_relative = 1e-10);
    assert_relative_eq!(a.rollnik, (1.5f64).sqrt(), max_relative = 1e-8);
    assert!(a.rollnik <= a.fkv);
    // ||e^{-r}||_{3/2} = (64 pi / 27)^{2/3}
    assert_relative_eq!(a.frank, frank_threshold() / (64.0 * PI / 27.0).powf(2.0 / 3.0), max_relative = 1e-12);
}

#[test]
fn step_critical_amplitude() {
    // sin(sqrt(gamma) r) meets a constant at r = 1 when sqrt(gamma) = pi / 2.
    let p = RadialPotential::step(1.0, 1.0).unwrap();
    let a = critical_amplitudes(&p, &p.default_grid().unwrap()).unwrap();
    assert_relative_eq!(a.kato, PI * PI / 4.0, max_relative = 1e-9);
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
    #[test]
    fn lp_norms_are_homogeneous(gamma in 0.01f64..10.0, s in 0.0f64..5.0, which in 0usize..4) {
        let p = builtins()[which].scaled(gamma).unwrap();
        let q = p.scaled(s).unwrap();
        for e in [1.0, 1.5, 3.0] {
            proptest::prop_assert!((q.lp_norm(e) - s * p.lp_norm(e)).abs() <= 1e-12 * p.lp_norm(e).max(1.0));
        }
    }
}
