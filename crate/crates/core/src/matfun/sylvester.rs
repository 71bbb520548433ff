//! Bartels–Stewart solvers for `AX + XB + C = 0` and `AP + PAᵀ + W = 0`.
//!
//! Both coefficient matrices are reduced to complex Schur form, the
//! triangular system is solved column by column, and the solution is mapped
//! back. Real inputs take the real part of the complex solution.

use num_complex::Complex64;

use super::{complex_schur, ensure_square, real_part, to_complex, ComplexMatrix, RealMatrix, Tolerances};
use crate::error::{Error, Result};

/// Solves `A X + X B + C = 0` for real `A` (n×n), `B` (r×r), `C` (n×r).
pub fn solve_sylvester(a: &RealMatrix, b: &RealMatrix, c: &RealMatrix) -> Result<RealMatrix> {
    solve_sylvester_with(a, b, c, &Tolerances::default())
}

pub fn solve_sylvester_with(
    a: &RealMatrix,
    b: &RealMatrix,
    c: &RealMatrix,
    tol: &Tolerances,
) -> Result<RealMatrix> {
    ensure_square(a, "A")?;
    ensure_square(b, "B")?;
    let x = sylvester_core(&to_complex(a), &to_complex(b), &to_complex(c), tol)?;
    Ok(real_part(&x))
}

/// Complex counterpart of [`solve_sylvester`].
pub fn solve_sylvester_complex(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    sylvester_core(a, b, c, &Tolerances::default())
}

fn sylvester_core(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    let (n, r) = (a.nrows(), b.nrows());
    if a.ncols() != n || b.ncols() != r {
        return Err(Error::DimensionMismatch("Sylvester coefficients must be square".into()));
    }
    if c.nrows() != n || c.ncols() != r {
        return Err(Error::DimensionMismatch(format!(
            "C is {}x{}, expected {n}x{r}",
            c.nrows(),
            c.ncols()
        )));
    }
    if n == 0 || r == 0 {
        return Ok(ComplexMatrix::zeros(n, r));
    }

    let (qa, ta) = complex_schur(a)?;
    let (qb, tb) = complex_schur(b)?;

    let threshold = tol.spectra_gap * (a.norm() + b.norm());
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for j in 0..r {
            gap = gap.min((ta[(i, i)] + tb[(j, j)]).norm());
        }
    }
    if gap < threshold {
        return Err(Error::SpectraOverlap { gap, threshold });
    }

    // T_A Y + Y T_B = -Qaᴴ C Qb
    let rhs = -(qa.adjoint() * c * &qb);
    let mut y = ComplexMatrix::zeros(n, r);
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..r {
        for i in 0..n {
            let mut v = rhs[(i, k)];
            for l in 0..k {
                v -= y[(i, l)] * tb[(l, k)];
            }
            col[i] = v;
        }
        let shift = tb[(k, k)];
        for i in (0..n).rev() {
            let mut v = col[i];
            for j in i + 1..n {
                v -= ta[(i, j)] * col[j];
            }
            col[i] = v / (ta[(i, i)] + shift);
        }
        for i in 0..n {
            y[(i, k)] = col[i];
        }
    }
    Ok(&qa * y * qb.adjoint())
}

/// Solves `A P + P Aᵀ + W = 0` for symmetric `W`; the result is symmetrised.
pub fn solve_lyapunov(a: &RealMatrix, w: &RealMatrix) -> Result<RealMatrix> {
    solve_lyapunov_with(a, w, &Tolerances::default())
}

pub fn solve_lyapunov_with(a: &RealMatrix, w: &RealMatrix, tol: &Tolerances) -> Result<RealMatrix> {
    ensure_square(a, "A")?;
    ensure_square(w, "W")?;
    if w.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "W is {}x{}, expected {n}x{n}",
            w.nrows(),
            w.ncols(),
            n = a.nrows()
        )));
    }
    let asym = (w - w.transpose()).amax();
    let scale = w.amax();
    if asym > tol.symmetry * scale {
        return Err(Error::NotSymmetric(if scale > 0.0 { asym / scale } else { asym }));
    }
    let p = solve_sylvester_with(a, &a.transpose(), w, tol)?;
    Ok((&p + p.transpose()) * 0.5)
}
