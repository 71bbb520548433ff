use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::Result;
use crate::ltimodel::StateSpace;
use crate::matfun::{eig, to_complex, ComplexMatrix};

/// `G(s) = Σᵢ lᵢ rᵢᴴ / (s - λᵢ)`.
///
/// Right eigenvectors are normalized to unit length, so `lᵢ = C xᵢ` and
/// `rᵢᴴ = yᵢᴴ B` with `yᵢᴴ` the matching row of the inverse eigenvector
/// matrix.
#[derive(Debug, Clone)]
pub struct ResidueForm {
    pub poles: Vec<Complex64>,
    pub left: Vec<DVector<Complex64>>,
    pub right: Vec<DVector<Complex64>>,
}

impl ResidueForm {
    pub fn eval(&self, s: Complex64) -> ComplexMatrix {
        let (p, m) = (self.left[0].len(), self.right[0].len());
        let mut g = ComplexMatrix::zeros(p, m);
        for ((lambda, l), r) in self.poles.iter().zip(&self.left).zip(&self.right) {
            g += l * r.adjoint() / (s - lambda);
        }
        g
    }

    /// `rᵢᴴ` as a plain row vector (length `m`).
    pub fn row_residue(&self, i: usize) -> DVector<Complex64> {
        self.right[i].map(|z| z.conj())
    }
}

pub fn to_residue_form(rom: &StateSpace) -> Result<ResidueForm> {
    let e = eig(&to_complex(rom.a()))?;
    let cx = to_complex(rom.c()) * &e.vectors;
    let yb = &e.inverse * to_complex(rom.b());
    let k = e.values.len();
    Ok(ResidueForm {
        poles: e.values,
        left: (0..k).map(|i| cx.column(i).into_owned()).collect(),
        right: (0..k).map(|i| yb.row(i).adjoint()).collect(),
    })
}

/// Distance of `x` from the complex line through `t`, relative to `‖x‖`.
pub(crate) fn parallel_residual(x: &DVector<Complex64>, t: &DVector<Complex64>) -> f64 {
    let xn = x.norm();
    if xn == 0.0 {
        return 0.0;
    }
    let alpha = t.dotc(x) / t.norm_squared();
    (x - t * alpha).norm() / xn
}
