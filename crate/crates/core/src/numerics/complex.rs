//! Scalar complex helpers shared by every kernel.
//!
//! All resolvent kernels take their square root through
//! [`principal_sqrt_minus`], so the branch convention lives in one place.

use faer::c64;

/// Zero as a complex scalar.
pub const C0: c64 = c64 { re: 0.0, im: 0.0 };
/// One as a complex scalar.
pub const C1: c64 = c64 { re: 1.0, im: 0.0 };
/// The imaginary unit.
pub const CI: c64 = c64 { re: 0.0, im: 1.0 };

/// Shorthand constructor.
#[inline]
pub fn c(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

/// `sqrt(-z)` on the branch cut along `(-inf, 0]` of the argument `-z`,
/// i.e. with non-negative real part.
///
/// Total on the complex plane. For `z` off `[0, inf)` the real part is strictly
/// positive; on the cut the result is purely imaginary (with the sign chosen by
/// the sign of `Im z`, `-0.0` counting as negative).
#[inline]
pub fn principal_sqrt_minus(z: c64) -> c64 {
    let w = -z;
    if w.re == 0.0 && w.im == 0.0 {
        return C0;
    }
    // Numerically stable principal square root.
    let r = w.norm();
    let t = ((r + w.re.abs()) * 0.5).sqrt();
    if w.re >= 0.0 {
        c(t, w.im / (2.0 * t))
    } else {
        let im = if w.im.is_sign_negative() { -t } else { t };
        c(w.im.abs() / (2.0 * t), im)
    }
}

/// True when `z` lies on `[0, +inf)` within absolute tolerance `tol`.
#[inline]
pub fn on_positive_axis(z: c64, tol: f64) -> bool {
    z.im.abs() <= tol && z.re >= -tol
}

/// `exp(w) - 1` without cancellation for small `|w|`.
pub fn expm1(w: c64) -> c64 {
    if w.norm() < 1e-2 {
        // Horner on the Taylor series; ten terms exhaust double precision here.
        let mut acc = C1;
        for k in (2..=10).rev() {
            acc = C1 + w * acc / (k as f64);
        }
        w * acc
    } else {
        w.exp() - C1
    }
}

/// Half-line Dirichlet Green kernel `sinh(kappa r_<) exp(-kappa r_>) / kappa`
/// for `Re kappa >= 0`, continuous in `kappa` down to `kappa = 0` where it
/// equals `min(r, r')`.
///
/// Evaluated as `exp(-kappa (r_> - r_<)) * (1 - exp(-2 kappa r_<)) / (2 kappa)`
/// so nothing overflows for large `kappa r`.
pub fn dirichlet_half_line_kernel(kappa: c64, r: f64, rp: f64) -> c64 {
    let (lo, hi) = if r <= rp { (r, rp) } else { (rp, r) };
    if lo <= 0.0 {
        return C0;
    }
    let two_k_lo = kappa * (2.0 * lo);
    let factor = if two_k_lo.norm() < 1e-8 {
        // (1 - e^{-2 k lo}) / (2k) = lo (1 - k lo + ...)
        c(lo, 0.0) * (C1 - kappa * lo)
    } else {
        -expm1(-two_k_lo) / (kappa * 2.0)
    };
    (-(kappa * (hi - lo))).exp() * factor
}
