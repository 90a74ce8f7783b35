use approx::assert_relative_eq;
use bslab::dirac::*;
use bslab::numerics::linalg::{hermitian_eig, operator_norm, CMatrix};
use bslab::numerics::random::random_matrix;
use faer::c64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// 40-digit evaluations of the closed forms.
const C1_REF: f64 = 1.488000723994071817134378237597777985957;
const C2_REF: f64 = 1.107551215027911468001026663473800802443;
const KATO_REF: f64 = 2.702567690063490188626873097310246477095;

fn diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut d = a.clone();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            d.set(i, j, a.get(i, j) - b.get(i, j));
        }
    }
    operator_norm(&d)
}

#[test]
fn constants_match_high_precision_values() {
    let (c1, c2) = dirac_constants();
    assert_relative_eq!(c1, C1_REF, max_relative = 1e-12);
    assert_relative_eq!(c2, C2_REF, max_relative = 1e-12);
    assert_relative_eq!(kato_threshold(), KATO_REF, max_relative = 1e-12);
}

#[test]
fn strip_half_width_examples() {
    let (c1, c2) = dirac_constants();
    assert_eq!(enclosure_region(0.0, 0.0).unwrap().exclusion, ExclusionKind::AllPlane);
    let empty = enclosure_region(1.0 / c1, 3.0).unwrap();
    assert_eq!(empty.exclusion, ExclusionKind::Empty);
    assert!(!empty.certificate.verdict && !empty.excludes(c64::new(0.0, 1.0)));
    let r = enclosure_region(0.5 / c1, 1.0).unwrap();
    assert_relative_eq!(r.half_width(), 0.5 / c2, max_relative = 1e-15);
    let w = r.half_width();
    assert!(r.excludes(c64::new(0.999 * w, 50.0)) && !r.excludes(c64::new(1.001 * w, 0.0)));
    // On the boundary the hypothesis is an equality, not a strict inequality.
    assert!(!r.excludes(c64::new(w, 0.0)));
}

#[test]
fn kato_check_flips_around_the_threshold() {
    let t = kato_threshold();
    assert!(kato_sufficiency_check(0.0).unwrap().verdict);
    assert!(kato_sufficiency_check(0.99 * t).unwrap().verdict);
    assert!(!kato_sufficiency_check(1.01 * t).unwrap().verdict);
}

#[test]
fn polar_reconstructs_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..1000 {
        let rank = if trial % 4 == 0 { rng.gen_range(0..DIM) } else { DIM };
        let v = if rank == DIM {
            random_matrix(DIM, DIM, 1.0, &mut rng)
        } else {
            &random_matrix(DIM, rank.max(1), 1.0, &mut rng) * &random_matrix(rank.max(1), DIM, if rank == 0 { 0.0 } else { 1.0 }, &mut rng)
        };
        let nv = operator_norm(&v);
        let p = matrix_polar(&v).unwrap();
        assert_eq!(p.rank, if nv == 0.0 { 0 } else { rank });
        assert!(diff(&(&p.u * &p.abs), &v) <= 1e-10 * nv, "trial {trial}");
        // |V|^2 = V* V and |V| >= 0.
        assert!(diff(&(&p.abs * &p.abs), &(&v.adjoint() * &v)) <= 1e-10 * nv * nv);
        let eig = hermitian_eig(&p.abs).unwrap();
        assert!(eig.values[0] >= -1e-12 * nv);
        // U* U is the orthogonal projector onto range |V|.
        let q = &p.u.adjoint() * &p.u;
        assert!(diff(&(&q * &q), &q) <= 1e-10);
        assert!(diff(&(&q * &p.abs), &p.abs) <= 1e-10 * nv);
        assert!((eig.values.iter().filter(|&&x| x > 1e-10 * nv).count()) == p.rank);
        // v = || |V| || = || |V|^{1/2} ||^2.
        assert!((operator_norm(&p.abs) - nv).abs() <= 1e-10 * nv);
        assert!((operator_norm(&p.abs_sqrt().unwrap()).powi(2) - nv).abs() <= 1e-10 * nv.max(1e-300));
        assert!((p.norm() - nv).abs() <= 1e-10 * nv);
    }
}

#[test]
fn norms_from_weighted_samples() {
    // V = 2 I on a unit cell: ||v||_3 = 2, ||v||_{3/2} = 2.
    let mut row = vec![0.0; 3];
    for i in 0..DIM {
        for j in 0..DIM {
            row.extend([if i == j { 2.0 } else { 0.0 }, 0.0]);
        }
    }
    row.push(1.0);
    let s = MatrixPotentialSample::from_row(&row).unwrap();
    let n = norms_from_samples(&[s.clone(), MatrixPotentialSample { weight: Some(0.0), ..s }]).unwrap();
    assert_relative_eq!(n.l3, 2.0, max_relative = 1e-15);
    assert_relative_eq!(n.l32, 2.0, max_relative = 1e-15);
}

proptest! {
    #[test]
    fn half_width_is_monotone(a in 0.0f64..0.6, b in 0.01f64..10.0, da in 0.0f64..0.05, db in 0.0f64..1.0) {
        let w = enclosure_region(a, b).unwrap().half_width();
        prop_assert!(enclosure_region(a + da, b).unwrap().half_width() <= w);
        prop_assert!(enclosure_region(a, b + db).unwrap().half_width() <= w);
    }
}
