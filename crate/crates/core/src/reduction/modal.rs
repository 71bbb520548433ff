use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use super::interp::normalize_phase;
use super::report::{Method, ReductionReport};
use crate::error::{Error, Result};
use crate::ltimodel::{poles, StateSpace};
use crate::matfun::{eigenvalues, to_complex, ComplexMatrix, RealMatrix};

const MATCH_TOL: f64 = 1e-6;
const DEFECT_TOL: f64 = 1e-10;

/// Oblique projection onto the real invariant subspace of `selected_poles`.
pub fn modal_truncation(sys: &StateSpace, selected_poles: &[Complex64]) -> Result<ReductionReport> {
    if selected_poles.is_empty() {
        return Err(Error::InvalidArgument("no poles selected".into()));
    }
    let a = sys.a();
    let n = sys.order();
    let spectrum = eigenvalues(a);
    let scale = a.norm().max(1.0);
    let mut used = vec![false; spectrum.len()];
    let mut chosen = Vec::with_capacity(selected_poles.len());
    for &z in selected_poles {
        let hit = spectrum
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .min_by(|x, y| (x.1 - z).norm().total_cmp(&(y.1 - z).norm()));
        match hit {
            Some((k, &lambda)) if (lambda - z).norm() <= MATCH_TOL * scale => {
                used[k] = true;
                chosen.push(lambda);
            }
            _ => return Err(Error::NotAnEigenvalue { re: z.re, im: z.im }),
        }
    }
    for z in &chosen {
        if z.im != 0.0 && !chosen.iter().any(|w| *w == z.conj()) {
            return Err(Error::InvalidArgument(format!("selection is not conjugate-closed at {z}")));
        }
    }

    let ac = to_complex(a);
    let mut v = RealMatrix::zeros(n, 0);
    let mut w = RealMatrix::zeros(n, 0);
    let push = |m: &mut RealMatrix, col: DVector<f64>| {
        let k = m.ncols();
        *m = m.clone().insert_column(k, 0.0);
        m.set_column(k, &col);
    };
    for &lambda in chosen.iter().filter(|z| z.im >= 0.0) {
        let shifted = &ac - ComplexMatrix::identity(n, n) * lambda;
        let mut x = null_vector(&shifted);
        let mut y = null_vector(&shifted.adjoint());
        if y.dotc(&x).norm() <= DEFECT_TOL {
            return Err(Error::DefectiveEigenvalue {
                re: lambda.re,
                im: lambda.im,
            });
        }
        normalize_phase(&mut x);
        normalize_phase(&mut y);
        push(&mut v, x.map(|z| z.re));
        push(&mut w, y.map(|z| z.re));
        if lambda.im > 0.0 {
            push(&mut v, x.map(|z| z.im));
            push(&mut w, y.map(|z| z.im));
        }
    }
    let wt = w.transpose();
    let e = &wt * &v;
    let lu = e.lu();
    let solve = |m: RealMatrix| lu.solve(&m).ok_or(Error::DefectiveEigenvalue { re: 0.0, im: 0.0 });
    let a_r = solve(&wt * a * &v)?;
    let b_r = solve(&wt * sys.b())?;
    let rom = StateSpace::new(a_r, b_r, sys.c() * &v)?;

    let mut report = ReductionReport::new(rom, Method::Modal, None);
    report.preserved_poles = chosen;
    Ok(report)
}

/// Unit vector spanning the numerical null space of a singular matrix.
fn null_vector(m: &ComplexMatrix) -> DVector<Complex64> {
    let svd = m.clone().svd(false, true);
    let k = svd.singular_values.imin();
    svd.v_t.expect("requested").row(k).adjoint()
}

/// Oscillatory poles with frequency `Im λ / 2π` in `[f_lo, f_hi]` Hz and
/// damping ratio `-Re λ / |λ|` at most `damping_max`, least damped first.
/// Each selected pole is followed by its conjugate.
pub fn select_modes(sys: &StateSpace, f_lo: f64, f_hi: f64, damping_max: f64) -> Vec<Complex64> {
    let mut upper: Vec<(f64, Complex64)> = poles(sys)
        .into_iter()
        .filter(|z| z.im > 0.0)
        .filter_map(|z| {
            let f = z.im / (2.0 * PI);
            let zeta = -z.re / z.norm();
            (f >= f_lo && f <= f_hi && zeta <= damping_max).then_some((zeta, z))
        })
        .collect();
    upper.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.im.total_cmp(&y.1.im)));
    upper.into_iter().flat_map(|(_, z)| [z, z.conj()]).collect()
}
