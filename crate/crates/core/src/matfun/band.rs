//! The band integral `F(A) = (1/2π) ∫_band (jνI - A)⁻¹ dν` over a symmetric
//! band, evaluated through the principal logarithm.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{
    eigenvalues, ensure_square, matrix_log_with, to_complex, ComplexMatrix, FrequencyBand,
    RealMatrix, Tolerances,
};
use crate::error::{Error, Result};

/// `F(A)` for a Hurwitz-stable real `A`.
///
/// A low-pass band uses `Re((j/π) ln(-jω I - A))`; a band with
/// `omega_lo > 0` uses `Re((j/π) ln((jω₁I + A)⁻¹(jω₂I + A)))`.
pub fn compute_f(a: &RealMatrix, band: &FrequencyBand) -> Result<RealMatrix> {
    compute_f_with(a, band, &Tolerances::default())
}

pub fn compute_f_with(a: &RealMatrix, band: &FrequencyBand, tol: &Tolerances) -> Result<RealMatrix> {
    ensure_square(a, "A")?;
    band.validate()?;
    let n = a.nrows();
    let abscissa = eigenvalues(a).iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if n > 0 && abscissa >= -tol.stability_margin {
        return Err(Error::NotStable(abscissa));
    }
    let ac = to_complex(a);
    let eye = ComplexMatrix::identity(n, n);
    let j = Complex64::new(0.0, 1.0);
    let arg = if band.is_lowpass() {
        -(&eye * (j * band.omega_hi)) - &ac
    } else {
        let lo = &eye * (j * band.omega_lo) + &ac;
        let hi = &eye * (j * band.omega_hi) + &ac;
        lo.lu().solve(&hi).ok_or(Error::SingularShift {
            re: 0.0,
            im: band.omega_lo,
        })?
    };
    let log = matrix_log_with(&arg, tol)?;
    // Re(j L / π) = -Im(L) / π
    Ok(log.map(|z| -z.im / PI))
}

/// `F(-S)` for an antistable `S` (all eigenvalues in the open right half plane).
pub fn compute_f_antistable(s: &RealMatrix, band: &FrequencyBand) -> Result<RealMatrix> {
    ensure_square(s, "S")?;
    let min_re = eigenvalues(s).iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    if s.nrows() > 0 && min_re <= Tolerances::default().stability_margin {
        return Err(Error::NotAntistable(min_re));
    }
    compute_f(&(-s), band)
}

/// The scalar band integral `(1/2π) ∫_band dν / (jν - λ)` for `Re λ < 0`.
///
/// This is the eigenvalue map of [`compute_f`]: `F(A) v = band_weight(λ) v`
/// for an eigenpair `(λ, v)` of a real `A`.
pub fn band_weight(lambda: Complex64, band: &FrequencyBand) -> Complex64 {
    let lowpass = |w: f64| {
        let j = Complex64::new(0.0, 1.0);
        let up = (j * w - lambda).ln();
        let down = (-j * w - lambda).ln();
        -j * (up - down) / (2.0 * PI)
    };
    if band.is_lowpass() {
        lowpass(band.omega_hi)
    } else {
        lowpass(band.omega_hi) - lowpass(band.omega_lo)
    }
}
