//! Seeded random matrices.

use faer::c64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::complex::C0;
use super::linalg::CMatrix;

/// Standard complex Gaussian scalar (real and imaginary parts `N(0, 1/2)`).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> c64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Dense complex Gaussian matrix scaled by `scale`.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, scale: f64, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, complex_gaussian(rng) * scale);
        }
    }
    m
}

/// `(X + X*) / 2` for Gaussian `X`; exactly Hermitian.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let x = random_matrix(n, n, 1.0, rng);
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h.set(i, j, (x.get(i, j) + x.get(j, i).conj()) * 0.5);
        }
    }
    h
}

/// `X X*` for Gaussian `X`; positive semi-definite.
pub fn random_psd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let x = random_matrix(n, n, 1.0, rng);
    (&x * &x.adjoint()).hermitian_part()
}

/// Haar-ish unitary from modified Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let x = random_matrix(n, n, 1.0, rng);
    let mut cols: Vec<Vec<c64>> = (0..n).map(|j| x.column(j)).collect();
    for j in 0..n {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let q = &done[k];
            let proj = q.iter().zip(rest[0].iter()).fold(C0, |acc, (a, b)| acc + a.conj() * b);
            for (v, qi) in rest[0].iter_mut().zip(q) {
                *v -= qi * proj;
            }
        }
        let nrm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|v| *v /= nrm);
    }
    let mut u = CMatrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            u.set(i, j, *v);
        }
    }
    u
}
