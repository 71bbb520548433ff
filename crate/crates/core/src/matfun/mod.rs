//! Dense matrix-function and matrix-equation kernel.
//!
//! Everything in here is a pure function of its inputs. Real data is carried
//! as [`RealMatrix`], intermediate complex quantities as [`ComplexMatrix`].

mod band;
mod eig;
mod logm;
mod sylvester;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use band::{band_weight, compute_f, compute_f_antistable, compute_f_with};
pub use eig::{complex_schur, eig, eigenvalues, Eigen};
pub use logm::{matrix_log, matrix_log_with};
pub use sylvester::{
    solve_lyapunov, solve_lyapunov_with, solve_sylvester, solve_sylvester_complex,
    solve_sylvester_with,
};

pub type RealMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;

/// Numerical thresholds used by the kernel. The defaults are the documented
/// contract values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative spectral separation below which a Sylvester equation is
    /// declared singular.
    pub spectra_gap: f64,
    /// Relative asymmetry accepted for Lyapunov right-hand sides.
    pub symmetry: f64,
    /// Distance to the closed negative real axis below which the principal
    /// logarithm is refused.
    pub branch_cut: f64,
    /// Required margin of `max Re λ` below zero for a stable matrix.
    pub stability_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            spectra_gap: 1e-12,
            symmetry: 1e-12,
            branch_cut: 1e-12,
            stability_margin: 1e-10,
        }
    }
}

/// Symmetric frequency band `[-hi, -lo] ∪ [lo, hi]` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBand {
    pub omega_lo: f64,
    pub omega_hi: f64,
}

impl FrequencyBand {
    pub fn new(omega_lo: f64, omega_hi: f64) -> Result<Self> {
        let band = Self { omega_lo, omega_hi };
        band.validate()?;
        Ok(band)
    }

    /// The low-pass band `[-hi, hi]`.
    pub fn lowpass(omega_hi: f64) -> Result<Self> {
        Self::new(0.0, omega_hi)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.omega_lo.is_finite()
            && self.omega_hi.is_finite()
            && self.omega_lo >= 0.0
            && self.omega_lo < self.omega_hi;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidBand {
                lo: self.omega_lo,
                hi: self.omega_hi,
            })
        }
    }

    pub fn is_lowpass(&self) -> bool {
        self.omega_lo == 0.0
    }

    pub fn contains(&self, nu: f64) -> bool {
        let a = nu.abs();
        a >= self.omega_lo && a <= self.omega_hi
    }
}

pub(crate) fn to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub(crate) fn real_part(m: &ComplexMatrix) -> RealMatrix {
    m.map(|z| z.re)
}

pub(crate) fn ensure_square(m: &RealMatrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Largest real part among the eigenvalues of `a`.
pub fn spectral_abscissa(a: &RealMatrix) -> f64 {
    eigenvalues(a)
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn ensure_stable(a: &RealMatrix, tol: &Tolerances) -> Result<()> {
    let abscissa = spectral_abscissa(a);
    if abscissa < -tol.stability_margin {
        Ok(())
    } else {
        Err(Error::NotStable(abscissa))
    }
}
