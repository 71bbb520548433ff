use num_complex::Complex64;

use super::{ComplexMatrix, RealMatrix};
use crate::error::{Error, Result};

/// Complex Schur factorisation `m = q t qᴴ` with `t` upper triangular.
pub fn complex_schur(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((m.clone(), m.clone()));
    }
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, 10_000 * n)
        .ok_or(Error::SchurFailed)?;
    let (q, mut t) = schur.unpack();
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((q, t))
}

/// Eigenvalues of a real matrix. Complex eigenvalues come out in exact
/// conjugate pairs.
pub fn eigenvalues(a: &RealMatrix) -> Vec<Complex64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    a.complex_eigenvalues().iter().copied().collect()
}

/// Eigendecomposition `m = vectors · diag(values) · inverse`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    /// Right eigenvectors as unit-norm columns.
    pub vectors: ComplexMatrix,
    /// `vectors⁻¹`; its rows are the matching left eigenvectors.
    pub inverse: ComplexMatrix,
}

/// Full eigendecomposition of a diagonalisable matrix via the complex Schur
/// form. Fails with [`Error::DefectiveEigenvalue`] when the eigenvector
/// matrix is numerically singular.
pub fn eig(m: &ComplexMatrix) -> Result<Eigen> {
    let n = m.nrows();
    let (q, t) = complex_schur(m)?;
    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * scale;

    let mut y = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = -t[(i, k)];
            for j in i + 1..k {
                acc -= t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - t[(k, k)];
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            y[(i, k)] = acc / d;
        }
    }
    let mut vectors = &q * y;
    for mut col in vectors.column_iter_mut() {
        let nrm = col.norm();
        col /= Complex64::new(nrm, 0.0);
    }
    let defective = |k: usize| {
        let v = values[k];
        Error::DefectiveEigenvalue { re: v.re, im: v.im }
    };
    let svd = vectors.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if n > 0 && smin <= 1e-12 * smax {
        // report the member of the closest eigenvalue pair
        let mut best = (f64::INFINITY, 0);
        for i in 0..n {
            for j in i + 1..n {
                let d = (values[i] - values[j]).norm();
                if d < best.0 {
                    best = (d, i);
                }
            }
        }
        return Err(defective(best.1));
    }
    let inverse = vectors.clone().try_inverse().ok_or_else(|| defective(0))?;
    Ok(Eigen {
        values,
        vectors,
        inverse,
    })
}
