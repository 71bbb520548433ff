//! Principal matrix logarithm by inverse scaling and squaring on the
//! triangular Schur factor.
//!
//! Square roots are taken until `‖T - I‖₁` falls below the backward-error
//! bound of a Padé approximant of `log(1 + x)`; the approximant is then
//! evaluated in partial-fraction form, whose poles and residues are the
//! Gauss–Legendre nodes and weights on `[0, 1]`.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use super::{complex_schur, ComplexMatrix, Tolerances};
use crate::error::{Error, Result};

/// `THETA[m-1]`: largest `‖X‖₁` for which the `[m/m]` Padé approximant of
/// `log(I + X)` has backward error below unit roundoff.
const THETA: [f64; 16] = [
    1.586970738772063e-5,
    2.313807884242979e-3,
    1.938179313533253e-2,
    6.209171588994762e-2,
    1.276404810806775e-1,
    2.060962623452836e-1,
    2.879093714241194e-1,
    3.666532675959884e-1,
    4.389227424052877e-1,
    5.034403787209436e-1,
    5.600884577296021e-1,
    6.091848784519327e-1,
    6.515040184271478e-1,
    6.879429012155043e-1,
    7.193047555962545e-1,
    7.462929957567013e-1,
];

const MAX_SQRTS: usize = 100;

pub fn matrix_log(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_log_with(m, &Tolerances::default())
}

pub fn matrix_log_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch("matrix_log needs a square matrix".into()));
    }
    if n == 0 {
        return Ok(m.clone());
    }
    let (q, t) = complex_schur(m)?;

    let scale = (0..n).map(|i| t[(i, i)].norm()).fold(1.0, f64::max);
    for i in 0..n {
        let z = t[(i, i)];
        let dist = if z.re <= 0.0 { z.im.abs() } else { z.norm() };
        if dist <= tol.branch_cut * scale {
            return Err(Error::BranchCutEigenvalue { re: z.re, im: z.im });
        }
    }

    let mut r = t.clone();
    let mut squarings = 0usize;
    let degree = loop {
        let alpha = norm1_minus_identity(&r);
        if alpha <= THETA[6] {
            break degree_for(alpha);
        }
        if alpha <= THETA[15] {
            let now = degree_for(alpha);
            let after = degree_for(alpha / 2.0);
            if now - after < 2 || squarings >= MAX_SQRTS {
                break now;
            }
        } else if squarings >= MAX_SQRTS {
            break THETA.len();
        }
        r = sqrt_upper_triangular(&r);
        squarings += 1;
    };

    let mut x = r;
    for i in 0..n {
        x[(i, i)] -= Complex64::new(1.0, 0.0);
    }
    let mut log_t = pade_log1p(&x, degree) * Complex64::new(2f64.powi(squarings as i32), 0.0);
    for i in 0..n {
        log_t[(i, i)] = t[(i, i)].ln();
    }
    Ok(&q * log_t * q.adjoint())
}

fn degree_for(alpha: f64) -> usize {
    THETA
        .iter()
        .position(|&th| th >= alpha)
        .map(|k| k + 1)
        .unwrap_or(THETA.len())
}

fn norm1_minus_identity(r: &ComplexMatrix) -> f64 {
    let n = r.nrows();
    (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let v = r[(i, j)] - if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                    v.norm()
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Principal square root of an upper triangular matrix.
fn sqrt_upper_triangular(t: &ComplexMatrix) -> ComplexMatrix {
    let n = t.nrows();
    let mut r = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        r[(j, j)] = t[(j, j)].sqrt();
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    r
}

/// `[m/m]` Padé approximant of `log(I + X)` for upper triangular `X`,
/// `Σ_k w_k X (I + x_k X)⁻¹` with Gauss–Legendre data on `[0, 1]`.
fn pade_log1p(x: &ComplexMatrix, m: usize) -> ComplexMatrix {
    let n = x.nrows();
    let rule = GaussLegendre::new(NonZeroUsize::new(m).expect("degree is positive"));
    let mut acc = ComplexMatrix::zeros(n, n);
    for (&node, &weight) in rule.nodes().zip(rule.weights()) {
        let xk = Complex64::new(0.5 * (node + 1.0), 0.0);
        let wk = Complex64::new(0.5 * weight, 0.0);
        // (I + xk X) Y = X, upper triangular
        let mut y = ComplexMatrix::zeros(n, n);
        for col in 0..n {
            for i in (0..=col).rev() {
                let mut s = x[(i, col)];
                for j in i + 1..=col {
                    s -= xk * x[(i, j)] * y[(j, col)];
                }
                y[(i, col)] = s / (Complex64::new(1.0, 0.0) + xk * x[(i, i)]);
            }
        }
        acc += y * wk;
    }
    acc
}
