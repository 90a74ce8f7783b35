//! Dense complex matrices and the handful of factorizations the rest of the
//! crate needs: Hermitian and general eigendecompositions, operator norms,
//! spectral calculus for positive semi-definite matrices and LU solves.
//!
//! Storage and the heavy lifting are delegated to `faer`.

use std::ops::{Add, Mul, Sub};

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{c64, Mat, Side};

use super::complex::{C0, C1};
use crate::error::{Error, Result};

/// Relative tolerance for treating a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Backward-error certificate for computed eigenvalues, relative to `||M||`.
pub const EIG_BACKWARD_TOL: f64 = 1e-8;
/// Negative eigenvalues of a PSD input are tolerated down to `-PSD_TOL * ||M||`.
pub const PSD_TOL: f64 = 1e-10;

/// Dense complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix(Mat<c64>);

impl CMatrix {
    /// Wraps a faer matrix, rejecting NaN or infinite entries.
    pub fn new(m: Mat<c64>) -> Result<Self> {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(Mat::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(Mat::identity(n, n))
    }

    /// Builds a matrix entry by entry; fails on non-finite entries.
    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> c64) -> Result<Self> {
        Self::new(Mat::from_fn(rows, cols, f))
    }

    /// Row-major construction from nested rows.
    pub fn from_rows(rows: &[Vec<c64>]) -> Result<Self> {
        let r = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != cols) {
            return Err(Error::Usage("ragged rows in matrix literal".into()));
        }
        Self::from_fn(r, cols, |i, j| rows[i][j])
    }

    pub fn from_diag(d: &[c64]) -> Self {
        let n = d.len();
        Self(Mat::from_fn(n, n, |i, j| if i == j { d[i] } else { C0 }))
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        let n = d.len();
        Self(Mat::from_fn(n, n, |i, j| if i == j { c64::new(d[i], 0.0) } else { C0 }))
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.0[(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: c64) {
        self.0[(i, j)] = v;
    }

    pub fn as_faer(&self) -> &Mat<c64> {
        &self.0
    }

    pub fn into_faer(self) -> Mat<c64> {
        self.0
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint().to_owned())
    }

    pub fn scale(&self, s: c64) -> Self {
        Self(Mat::from_fn(self.nrows(), self.ncols(), |i, j| self.0[(i, j)] * s))
    }

    /// `self + s I`.
    pub fn shift(&self, s: c64) -> Self {
        let mut out = self.clone();
        for i in 0..self.nrows().min(self.ncols()) {
            out.0[(i, i)] += s;
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.ncols() {
            for i in 0..self.nrows() {
                m = m.max(self.0[(i, j)].norm());
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm_l2()
    }

    /// Cheap lower bound on the spectral norm: the largest row or column norm.
    pub fn norm_lower_bound(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.ncols() {
            let s: f64 = (0..self.nrows()).map(|i| self.0[(i, j)].norm_sqr()).sum();
            best = best.max(s);
        }
        for i in 0..self.nrows() {
            let s: f64 = (0..self.ncols()).map(|j| self.0[(i, j)].norm_sqr()).sum();
            best = best.max(s);
        }
        best.sqrt()
    }

    /// `max |M - M*|` relative to `max |M|` stays below `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs();
        let n = self.nrows();
        for j in 0..n {
            for i in 0..=j {
                if (self.0[(i, j)] - self.0[(j, i)].conj()).norm() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// Averages with the adjoint; used after products that are Hermitian in
    /// exact arithmetic.
    pub fn hermitian_part(&self) -> Self {
        let n = self.nrows();
        Self(Mat::from_fn(n, n, |i, j| (self.0[(i, j)] + self.0[(j, i)].conj()) * 0.5))
    }

    pub fn column(&self, j: usize) -> Vec<c64> {
        (0..self.nrows()).map(|i| self.0[(i, j)]).collect()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        assert_eq!(v.len(), self.ncols(), "dimension mismatch in apply");
        (0..self.nrows())
            .map(|i| (0..self.ncols()).fold(C0, |acc, j| acc + self.0[(i, j)] * v[j]))
            .collect()
    }

    /// Keeps the listed rows and columns, in order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self(Mat::from_fn(rows.len(), cols.len(), |i, j| self.0[(rows[i], cols[j])]))
    }
}

impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.ncols(), rhs.nrows(), "dimension mismatch in product");
        CMatrix(&self.0 * &rhs.0)
    }
}

impl Add<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl Sub<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

/// Vector 2-norm.
pub fn vec_norm(v: &[c64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `(u, v)` linear in the second slot.
pub fn vec_dot(u: &[c64], v: &[c64]) -> c64 {
    u.iter().zip(v).fold(C0, |acc, (a, b)| acc + a.conj() * b)
}

/// Spectral decomposition `M = U diag(values) U*` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors in columns.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `U diag(f(values)) U*`.
    pub fn map(&self, f: impl Fn(f64) -> c64) -> CMatrix {
        let u = &self.vectors;
        let n = self.values.len();
        let fd: Vec<c64> = self.values.iter().map(|&x| f(x)).collect();
        let scaled = Mat::from_fn(n, n, |i, j| u.get(i, j) * fd[j]);
        CMatrix(&scaled * u.0.adjoint())
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianEigen> {
    if !m.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian);
    }
    let sym = m.hermitian_part();
    let evd = sym
        .0
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::NumericalFailure(format!("Hermitian eigensolver: {e:?}")))?;
    let values = evd.S().column_vector().iter().map(|x| x.re).collect();
    Ok(HermitianEigen { values, vectors: CMatrix(evd.U().to_owned()) })
}

/// Eigenvalues of a general square matrix with eigenvectors and per-pair
/// residuals `||(M - lambda) v|| / ||v||`.
#[derive(Clone, Debug)]
pub struct GeneralEigen {
    pub values: Vec<c64>,
    pub vectors: CMatrix,
    pub residuals: Vec<f64>,
}

/// Full eigendecomposition with a backward-error certificate.
///
/// The residual of a unit eigenvector bounds the smallest singular value of
/// `M - lambda I` from above, so each residual below `1e-8 ||M||` certifies
/// the corresponding eigenvalue. Any failure withholds every result.
pub fn general_eig_full(m: &CMatrix) -> Result<GeneralEigen> {
    if !m.is_square() {
        return Err(Error::Usage(format!("eigenvalues of a {}x{} matrix", m.nrows(), m.ncols())));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(GeneralEigen { values: vec![], vectors: CMatrix::zeros(0, 0), residuals: vec![] });
    }
    let evd = m
        .0
        .eigen()
        .map_err(|e| Error::NumericalFailure(format!("eigensolver did not converge: {e:?}")))?;
    let values: Vec<c64> = evd.S().column_vector().iter().copied().collect();
    let vectors = CMatrix(evd.U().to_owned());
    let mu = &m.0 * &vectors.0;
    let scale = m.norm_lower_bound();
    let mut residuals = Vec::with_capacity(n);
    for (j, &lambda) in values.iter().enumerate() {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            let v = vectors.get(i, j);
            num += (mu[(i, j)] - v * lambda).norm_sqr();
            den += v.norm_sqr();
        }
        let r = if den > 0.0 { (num / den).sqrt() } else { f64::INFINITY };
        if !(r <= EIG_BACKWARD_TOL * scale) && !(r == 0.0 && scale == 0.0) {
            return Err(Error::NumericalFailure(format!(
                "eigenvalue {lambda} failed backward-error check: residual {r:e} vs ||M|| >= {scale:e}"
            )));
        }
        residuals.push(r);
    }
    Ok(GeneralEigen { values, vectors, residuals })
}

/// Eigenvalues of a general square matrix (certified, see [`general_eig_full`]).
pub fn general_eig(m: &CMatrix) -> Result<Vec<c64>> {
    general_eig_full(m).map(|e| e.values)
}

/// Eigenvalues only, without vectors or certificate. For inner loops of scans
/// where the caller checks what it needs.
pub fn eigenvalues_unchecked(m: &CMatrix) -> Result<Vec<c64>> {
    if m.nrows() == 0 {
        return Ok(vec![]);
    }
    m.0.eigenvalues()
        .map_err(|e| Error::NumericalFailure(format!("eigensolver did not converge: {e:?}")))
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    match m.0.singular_values() {
        Ok(s) => s.first().copied().unwrap_or(0.0),
        Err(_) => {
            // Fall back to the Gram matrix, which is always Hermitian.
            let gram = if m.nrows() >= m.ncols() { &m.adjoint() * m } else { m * &m.adjoint() };
            let evd = gram.hermitian_part().0.self_adjoint_eigenvalues(Side::Lower);
            evd.ok().and_then(|v| v.last().copied()).unwrap_or(f64::NAN).max(0.0).sqrt()
        }
    }
}

/// All singular values, descending.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(vec![]);
    }
    m.0.singular_values()
        .map_err(|e| Error::NumericalFailure(format!("SVD did not converge: {e:?}")))
}

/// Thin singular value decomposition `M = W diag(s) X*`, `s` descending.
pub fn svd(m: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    let d = m.0.thin_svd().map_err(|e| Error::NumericalFailure(format!("SVD did not converge: {e:?}")))?;
    let s = d.S().column_vector().iter().map(|x| x.re).collect();
    Ok((CMatrix(d.U().to_owned()), s, CMatrix(d.V().to_owned())))
}

/// `M^p` for Hermitian positive semi-definite `M` by spectral calculus.
///
/// Negative powers require a strictly positive spectrum.
pub fn psd_power(m: &CMatrix, p: f64) -> Result<CMatrix> {
    let eig = hermitian_eig(m)?;
    psd_power_from_eig(&eig, p)
}

/// As [`psd_power`] but reusing a decomposition.
pub fn psd_power_from_eig(eig: &HermitianEigen, p: f64) -> Result<CMatrix> {
    let scale = eig.values.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOL * scale {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    if p < 0.0 && min <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) * 16.0 {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(eig.map(|x| {
        let x = x.max(0.0);
        if x == 0.0 {
            C0
        } else {
            c64::new(x.powf(p), 0.0)
        }
    }))
}

/// LU factorization with partial pivoting, for repeated solves.
pub struct Lu {
    lu: faer::linalg::solvers::PartialPivLu<c64>,
    n: usize,
}

impl Lu {
    pub fn new(m: &CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Usage("LU of a non-square matrix".into()));
        }
        Ok(Self { lu: m.0.partial_piv_lu(), n: m.nrows() })
    }

    /// Solves `M x = b`; fails when the factorization produced non-finite output.
    pub fn solve(&self, b: &[c64]) -> Result<Vec<c64>> {
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        let out: Vec<c64> = (0..self.n).map(|i| x[(i, 0)]).collect();
        if out.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Singular)
        }
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        CMatrix::new(self.lu.inverse()).map_err(|_| Error::Singular)
    }
}

/// Inverse of a square matrix.
pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    Lu::new(m)?.inverse()
}

/// Power iteration on `M* M`: `||M v|| / ||v||` for the final iterate, a lower
/// bound on `||M||` that converges to it.
pub fn norm_lower_bound(m: &CMatrix, iters: usize) -> f64 {
    let mut v: Vec<c64> = (0..m.ncols()).map(|i| c64::new(1.0, 0.1 * (i as f64).cos())).collect();
    let mh = m.adjoint();
    let mut best = 0.0f64;
    for _ in 0..iters.max(1) {
        let nv = vec_norm(&v);
        if nv == 0.0 {
            break;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        let mv = m.apply(&v);
        best = best.max(vec_norm(&mv));
        v = mh.apply(&mv);
    }
    best
}

/// Eigenvalue of `m` nearest to `shift` together with its eigenvector, by
/// shifted inverse iteration. Returns `(mu, v, residual)`.
pub fn nearest_eigenpair(m: &CMatrix, shift: c64, max_iter: usize) -> Result<(c64, Vec<c64>, f64)> {
    let n = m.nrows();
    // An exact eigenvalue at the shift makes the solve blow up; nudge it.
    let mut shift = shift;
    let probe = vec![C1; n];
    let mut lu = Lu::new(&m.shift(-shift))?;
    if lu.solve(&probe).is_err() {
        shift += c64::new(1e-10, 1e-10) * shift.norm().max(1.0);
        lu = Lu::new(&m.shift(-shift))?;
    }
    let mut v: Vec<c64> = (0..n).map(|i| c64::new(1.0, 0.37 * (i as f64 + 1.0).sin())).collect();
    let nv = vec_norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut mu = shift;
    for _ in 0..max_iter.max(1) {
        let w = lu.solve(&v)?;
        let nw = vec_norm(&w);
        if nw == 0.0 || !nw.is_finite() {
            return Err(Error::Singular);
        }
        // Rayleigh quotient of the shifted inverse: mu = shift + 1 / (v, w).
        let q = vec_dot(&v, &w);
        v = w.iter().map(|x| x / nw).collect();
        if q.norm() > 0.0 {
            mu = shift + C1 / q;
        }
        let mv = m.apply(&v);
        let residual = mv.iter().zip(&v).map(|(a, b)| (a - b * mu).norm_sqr()).sum::<f64>().sqrt();
        if residual <= 1e-14 * m.norm_lower_bound().max(1.0) {
            break;
        }
    }
    // Final Rayleigh quotient on the converged vector.
    let mv = m.apply(&v);
    mu = vec_dot(&v, &mv);
    let residual = mv.iter().zip(&v).map(|(a, b)| (a - b * mu).norm_sqr()).sum::<f64>().sqrt();
    Ok((mu, v, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::complex::{c, CI};
    use crate::numerics::random::{random_hermitian, random_matrix, random_psd};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn power_iteration_bounds_norm_from_below() {
        let m = random_matrix(9, 7, 1.0, &mut rng(4));
        let exact = operator_norm(&m);
        let est = norm_lower_bound(&m, 200);
        assert!(est <= exact * (1.0 + 1e-14));
        assert!(est >= exact * (1.0 - 1e-8));
    }

    #[test]
    fn identity_eigenvalues() {
        let e = hermitian_eig(&CMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_eigenvalues_are_sorted() {
        let e = hermitian_eig(&CMatrix::from_real_diag(&[5.0, -3.0])).unwrap();
        assert_abs_diff_eq!(e.values[0], -3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 5.0, epsilon = 1e-14);
        // permutation eigenvectors
        assert_abs_diff_eq!(e.vectors.get(1, 0).norm(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors.get(0, 1).norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn hermitian_reconstruction_seed_42() {
        let m = random_hermitian(8, &mut rng(42));
        let e = hermitian_eig(&m).unwrap();
        let rebuilt = e.map(|x| c(x, 0.0));
        let norm = operator_norm(&m);
        assert!((&rebuilt - &m).frobenius_norm() <= 1e-10 * norm);
        let gram = &e.vectors.adjoint() * &e.vectors;
        assert!((&gram - &CMatrix::identity(8)).max_abs() <= 1e-10);
        let mu = &m * &e.vectors;
        let ud = &e.vectors * &CMatrix::from_real_diag(&e.values);
        assert!((&mu - &ud).frobenius_norm() <= 1e-10 * norm);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_rows(&[vec![C0, C1], vec![C0, C0]]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian)));
    }

    fn sorted(mut v: Vec<c64>) -> Vec<c64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn nilpotent_eigenvalues() {
        let m = CMatrix::from_rows(&[vec![C0, C1], vec![C0, C0]]).unwrap();
        for l in general_eig(&m).unwrap() {
            assert!(l.norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_generator_eigenvalues() {
        let m = CMatrix::from_rows(&[vec![C0, -C1], vec![C1, C0]]).unwrap();
        let ev = sorted(general_eig(&m).unwrap());
        assert!((ev[0] + CI).norm() < 1e-14);
        assert!((ev[1] - CI).norm() < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // (l - 2)(l + 3i) = l^2 + (3i - 2) l - 6i
        let a1 = c(-2.0, 3.0);
        let a0 = c(0.0, -6.0);
        let m = CMatrix::from_rows(&[vec![-a1, -a0], vec![C1, C0]]).unwrap();
        let ev = general_eig(&m).unwrap();
        let roots = [c(2.0, 0.0), c(0.0, -3.0)];
        for r in roots {
            assert!(ev.iter().any(|l| (l - r).norm() < 1e-12), "{ev:?}");
        }
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&CMatrix::zeros(3, 3)), 0.0);
        let d = CMatrix::from_diag(&[c(3.0, 0.0), c(0.0, -4.0)]);
        assert_abs_diff_eq!(operator_norm(&d), 4.0, epsilon = 1e-14);
        let m = random_matrix(6, 6, 1.0, &mut rng(7));
        assert_abs_diff_eq!(operator_norm(&m), operator_norm(&m.adjoint()), epsilon = 1e-10);
    }

    #[test]
    fn psd_power_examples() {
        let i = CMatrix::identity(3);
        assert!((&psd_power(&i, -0.5).unwrap() - &i).max_abs() < 1e-14);
        let d = CMatrix::from_real_diag(&[4.0, 9.0]);
        let r = psd_power(&d, 0.5).unwrap();
        assert!((&r - &CMatrix::from_real_diag(&[2.0, 3.0])).max_abs() < 1e-14);
        let p = random_psd(7, &mut rng(3));
        let h = psd_power(&p, 0.5).unwrap();
        assert!((&(&h * &h) - &p).frobenius_norm() <= 1e-9 * p.frobenius_norm());
    }

    #[test]
    fn psd_power_rejects_indefinite() {
        let d = CMatrix::from_real_diag(&[1.0, -1.0]);
        assert!(matches!(psd_power(&d, 0.5), Err(Error::NotPositive { .. })));
        let singular = CMatrix::from_real_diag(&[1.0, 0.0]);
        assert!(psd_power(&singular, 0.5).is_ok());
        assert!(psd_power(&singular, -0.5).is_err());
    }

    #[test]
    fn non_finite_entries_rejected() {
        assert!(CMatrix::from_fn(2, 2, |i, _| if i == 1 { c(f64::NAN, 0.0) } else { C0 }).is_err());
    }

    #[test]
    fn inverse_iteration_finds_nearest() {
        let m = CMatrix::from_diag(&[c(-1.1, 0.1), c(0.5, 0.0), c(3.0, 2.0)]);
        let (mu, _, res) = nearest_eigenpair(&m, c(-1.0, 0.0), 20).unwrap();
        assert!((mu - c(-1.1, 0.1)).norm() < 1e-12);
        assert!(res < 1e-12);
    }
}
