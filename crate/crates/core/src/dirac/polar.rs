use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::{svd, CMatrix};
use crate::numerics::C0;

/// Spinor dimension.
pub const DIM: usize = 4;

/// Singular values below `POLAR_TOL * ||V||` are treated as zero.
pub const POLAR_TOL: f64 = 1e-13;

/// `V = U |V|` with `|V| = (V* V)^{1/2}` and `U` a partial isometry that
/// vanishes on the kernel of `|V|`.
#[derive(Clone, Debug)]
pub struct Polar {
    pub u: CMatrix,
    pub abs: CMatrix,
    /// Singular values of `V`, descending; `v = ||V||` is the first.
    pub singular_values: Vec<f64>,
    pub rank: usize,
}

impl Polar {
    pub fn norm(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// `|V|^{1/2}`.
    pub fn abs_sqrt(&self) -> Result<CMatrix> {
        crate::numerics::psd_power(&self.abs, 0.5)
    }
}

/// Polar decomposition from the SVD `V = W S X*`: `|V| = X S X*` and
/// `U = W P X*` with `P` the projector onto the numerically nonzero
/// singular values.
pub fn matrix_polar(v: &CMatrix) -> Result<Polar> {
    if !v.is_square() {
        return Err(Error::Usage(format!("polar decomposition needs a square matrix, got {}x{}", v.nrows(), v.ncols())));
    }
    let n = v.nrows();
    if v.max_abs() == 0.0 {
        return Ok(Polar { u: CMatrix::zeros(n, n), abs: CMatrix::zeros(n, n), singular_values: vec![0.0; n], rank: 0 });
    }
    let (w, s, x) = svd(v)?;
    let cut = POLAR_TOL * s[0];
    let rank = s.iter().filter(|&&x| x > cut).count();
    let build = |f: &dyn Fn(usize) -> f64, left: &CMatrix| -> Result<CMatrix> {
        CMatrix::from_fn(n, n, |i, j| (0..n).fold(C0, |acc, k| acc + left.get(i, k) * f(k) * x.get(j, k).conj()))
    };
    let abs = build(&|k| s[k], &x)?;
    let u = build(&|k| if k < rank { 1.0 } else { 0.0 }, &w)?;
    // Exact Hermitian symmetry for downstream spectral calculus.
    Ok(Polar { u, abs: abs.hermitian_part(), singular_values: s, rank })
}

/// One sample of a matrix potential: a site in R^3, the value `V(x)` and an
/// optional quadrature weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixPotentialSample {
    pub site: [f64; 3],
    pub value: [[c64; DIM]; DIM],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

impl MatrixPotentialSample {
    /// From `x, y, z`, then 32 reals (row-major `re, im` pairs), then an
    /// optional weight.
    pub fn from_row(row: &[f64]) -> Result<Self> {
        let entries = 2 * DIM * DIM;
        if row.len() != 3 + entries && row.len() != 4 + entries {
            return Err(Error::Usage(format!("matrix sample needs {} or {} numbers, got {}", 3 + entries, 4 + entries, row.len())));
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::Usage("matrix sample has non-finite entries".into()));
        }
        let mut value = [[C0; DIM]; DIM];
        for (k, pair) in row[3..3 + entries].chunks(2).enumerate() {
            value[k / DIM][k % DIM] = c64::new(pair[0], pair[1]);
        }
        let weight = row.get(3 + entries).copied();
        if weight.is_some_and(|w| w < 0.0) {
            return Err(Error::Usage("sample weights must be non-negative".into()));
        }
        Ok(Self { site: [row[0], row[1], row[2]], value, weight })
    }

    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_fn(DIM, DIM, |i, j| self.value[i][j]).expect("finite entries")
    }

    pub fn polar(&self) -> Result<Polar> {
        matrix_polar(&self.matrix())
    }

    /// `v(x) = ||V(x)||`.
    pub fn v(&self) -> Result<f64> {
        Ok(self.polar()?.norm())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleNorms {
    pub l3: f64,
    pub l32: f64,
}

/// `||v||_3` and `||v||_{3/2}` as weighted sums over samples.
pub fn norms_from_samples(samples: &[MatrixPotentialSample]) -> Result<SampleNorms> {
    let (mut s3, mut s32) = (0.0, 0.0);
    for s in samples {
        let w = s.weight.ok_or_else(|| Error::Usage(format!("sample at {:?} has no weight", s.site)))?;
        let v = s.v()?;
        s3 += w * v.powi(3);
        s32 += w * v.powf(1.5);
    }
    Ok(SampleNorms { l3: s3.cbrt(), l32: s32.powf(2.0 / 3.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    #[test]
    fn diagonal_case() {
        let v = CMatrix::from_diag(&[c(0.0, 2.0), c(-3.0, 0.0), C0, c(1.0, 0.0)]);
        let p = matrix_polar(&v).unwrap();
        let abs = [2.0, 3.0, 0.0, 1.0];
        let u = [c(0.0, 1.0), c(-1.0, 0.0), C0, c(1.0, 0.0)];
        for i in 0..DIM {
            for j in 0..DIM {
                let (ea, eu) = if i == j { (c(abs[i], 0.0), u[i]) } else { (C0, C0) };
                assert!((p.abs.get(i, j) - ea).norm() < 1e-14);
                assert!((p.u.get(i, j) - eu).norm() < 1e-14);
            }
        }
        assert_eq!(p.rank, 3);
    }

    #[test]
    fn zero_matrix() {
        let p = matrix_polar(&CMatrix::zeros(DIM, DIM)).unwrap();
        assert_eq!(p.u.max_abs(), 0.0);
        assert_eq!(p.abs.max_abs(), 0.0);
        assert_eq!(p.norm(), 0.0);
    }

    #[test]
    fn row_parsing() {
        let mut row = vec![1.0, 2.0, 3.0];
        row.extend((0..32).map(|k| k as f64));
        let s = MatrixPotentialSample::from_row(&row).unwrap();
        assert_eq!(s.value[0][1], c(2.0, 3.0));
        assert_eq!(s.weight, None);
        row.push(0.5);
        assert_eq!(MatrixPotentialSample::from_row(&row).unwrap().weight, Some(0.5));
        assert!(MatrixPotentialSample::from_row(&row[..10]).is_err());
        assert!(norms_from_samples(&[s]).is_err());
    }
}
