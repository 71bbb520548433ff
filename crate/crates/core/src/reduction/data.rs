//! Real Sylvester data `(S, C̃_t)` / `(S, B̃_t)` for a rational Krylov subspace.

use nalgebra::DVector;
use num_complex::Complex64;

use super::interp::{InterpolationSet, Member};
use crate::error::{Error, Result};
use crate::ltimodel::{Side, StateSpace};
use crate::matfun::{
    compute_f, compute_f_antistable, solve_sylvester, to_complex, ComplexMatrix, FrequencyBand,
    RealMatrix,
};

const RANK_TOL: f64 = 1e-10;
// B⊥ below this fraction of ‖B‖ is treated as rank deficient
const PROJECTION_TOL: f64 = 1e-6;

/// Sylvester data of one side.
///
/// Input side: `A Ṽ - Ṽ S - B C̃_t = 0` with `t` = `C̃_t` (m×r).
/// Output side: `W̃ᵀ A - S W̃ᵀ - B̃_t C = 0` with `t` = `B̃_t` (r×p).
/// After [`SylvesterData::augment`] the basis solves the band-augmented
/// equation with `t_aug` in place of `t` and `B_ω`/`C_ω` in place of `B`/`C`.
#[derive(Debug, Clone, PartialEq)]
pub struct SylvesterData {
    pub s: RealMatrix,
    pub t: RealMatrix,
    pub t_aug: Option<RealMatrix>,
    /// `F(-S)`, present once augmented.
    pub f_s: Option<RealMatrix>,
    /// `Ṽ` (input side) or `W̃` (output side), n×r.
    pub basis: RealMatrix,
    pub side: Side,
    pub band: Option<FrequencyBand>,
}

impl SylvesterData {
    pub fn order(&self) -> usize {
        self.s.nrows()
    }

    /// Attach the band: computes `F(-S)`, the augmented tangential matrix and
    /// the basis of the augmented Sylvester equation. Needs `Re σᵢ > 0`.
    pub fn augment(&mut self, sys: &StateSpace, band: &FrequencyBand) -> Result<()> {
        let f_a = compute_f(sys.a(), band)?;
        self.augment_with_f(sys, band, &f_a)
    }

    pub(crate) fn augment_with_f(&mut self, sys: &StateSpace, band: &FrequencyBand, f_a: &RealMatrix) -> Result<()> {
        let f_s = compute_f_antistable(&self.s, band)?;
        let r = self.order();
        let neg_s = -&self.s;
        match self.side {
            Side::Input => {
                let m = self.t.nrows();
                let mut t_aug = RealMatrix::zeros(2 * m, r);
                t_aug.rows_mut(0, m).copy_from(&(&self.t * &f_s));
                t_aug.rows_mut(m, m).copy_from(&self.t);
                let b = sys.b();
                let mut b_w = RealMatrix::zeros(b.nrows(), 2 * m);
                b_w.columns_mut(0, m).copy_from(b);
                b_w.columns_mut(m, m).copy_from(&(f_a * b));
                self.basis = solve_sylvester(sys.a(), &neg_s, &(-(b_w * &t_aug)))?;
                self.t_aug = Some(t_aug);
            }
            Side::Output => {
                let p = self.t.ncols();
                let mut t_aug = RealMatrix::zeros(r, 2 * p);
                t_aug.columns_mut(0, p).copy_from(&(&f_s * &self.t));
                t_aug.columns_mut(p, p).copy_from(&self.t);
                let c = sys.c();
                let mut c_w = RealMatrix::zeros(2 * p, c.ncols());
                c_w.rows_mut(0, p).copy_from(c);
                c_w.rows_mut(p, p).copy_from(&(c * f_a));
                let wt = solve_sylvester(&neg_s, sys.a(), &(-(&t_aug * c_w)))?;
                self.basis = wt.transpose();
                self.t_aug = Some(t_aug);
            }
        }
        self.f_s = Some(f_s);
        self.band = Some(*band);
        Ok(())
    }

    /// Relative residual of the (augmented, if present) Sylvester equation.
    pub fn sylvester_residual(&self, sys: &StateSpace) -> f64 {
        let (a, s) = (sys.a(), &self.s);
        let f_a = self.band.and_then(|band| compute_f(a, &band).ok());
        match self.side {
            Side::Input => {
                let v = &self.basis;
                let (b_w, t) = match (&self.t_aug, &f_a) {
                    (Some(t_aug), Some(f)) => {
                        let b = sys.b();
                        let m = b.ncols();
                        let mut b_w = RealMatrix::zeros(b.nrows(), 2 * m);
                        b_w.columns_mut(0, m).copy_from(b);
                        b_w.columns_mut(m, m).copy_from(&(f * b));
                        (b_w, t_aug.clone())
                    }
                    _ => (sys.b().clone(), self.t.clone()),
                };
                let res = a * v - v * s - &b_w * &t;
                let scale = a.norm() * v.norm() + v.norm() * s.norm() + b_w.norm() * t.norm();
                res.norm() / scale.max(f64::MIN_POSITIVE)
            }
            Side::Output => {
                let wt = self.basis.transpose();
                let (c_w, t) = match (&self.t_aug, &f_a) {
                    (Some(t_aug), Some(f)) => {
                        let c = sys.c();
                        let p = c.nrows();
                        let mut c_w = RealMatrix::zeros(2 * p, c.ncols());
                        c_w.rows_mut(0, p).copy_from(c);
                        c_w.rows_mut(p, p).copy_from(&(c * f));
                        (c_w, t_aug.clone())
                    }
                    _ => (sys.c().clone(), self.t.clone()),
                };
                let res = &wt * a - s * &wt - &t * &c_w;
                let scale = a.norm() * wt.norm() + wt.norm() * s.norm() + c_w.norm() * t.norm();
                res.norm() / scale.max(f64::MIN_POSITIVE)
            }
        }
    }

    /// PBH rank of `(S, C̃_t)` (input side) or `(S, B̃_t)` (output side).
    pub fn tangential_rank(&self) -> usize {
        match self.side {
            Side::Input => pbh_observability_rank(&self.s, &self.t),
            Side::Output => pbh_observability_rank(&self.s.transpose(), &self.t.transpose()),
        }
    }

    /// PBH rank of `(S, Ĉ_t)` / `(S, B̂_t)` when augmented.
    pub fn augmented_rank(&self) -> Option<usize> {
        let t_aug = self.t_aug.as_ref()?;
        Some(match self.side {
            Side::Input => pbh_observability_rank(&self.s, t_aug),
            Side::Output => pbh_observability_rank(&self.s.transpose(), &t_aug.transpose()),
        })
    }

    fn transposed(self) -> Self {
        Self {
            s: self.s.transpose(),
            t: self.t.transpose(),
            t_aug: self.t_aug.map(|m| m.transpose()),
            f_s: self.f_s.map(|m| m.transpose()),
            basis: self.basis,
            side: match self.side {
                Side::Input => Side::Output,
                Side::Output => Side::Input,
            },
            band: self.band,
        }
    }
}

/// Rank of `(S, C)` counted as `r` minus the number of eigenvalues of `S`
/// failing the PBH test `σ_min([λI - S; C]) > tol·‖[S; C]‖`.
pub(crate) fn pbh_observability_rank(s: &RealMatrix, c: &RealMatrix) -> usize {
    let r = s.nrows();
    let scale = (s.norm_squared() + c.norm_squared()).sqrt().max(f64::MIN_POSITIVE);
    let mut ev = crate::matfun::eigenvalues(s);
    ev.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let mut failing = 0;
    let mut prev: Option<Complex64> = None;
    for lambda in ev {
        // repeated eigenvalues need one test with the full multiplicity
        let mult_defect = if let Some(p) = prev {
            (p - lambda).norm() <= RANK_TOL * scale
        } else {
            false
        };
        prev = Some(lambda);
        if mult_defect {
            continue;
        }
        let mut stack = ComplexMatrix::zeros(r + c.nrows(), r);
        stack.rows_mut(0, r).copy_from(&(ComplexMatrix::identity(r, r) * lambda - to_complex(s)));
        stack.rows_mut(r, c.nrows()).copy_from(&to_complex(c));
        let sv = stack.svd(false, false).singular_values;
        failing += sv.iter().filter(|&&x| x <= RANK_TOL * scale).count();
    }
    r.saturating_sub(failing)
}

/// Input-side data from the columns `(σᵢI - A)⁻¹ B t̃ᵢ`, realified pairwise.
pub fn real_input_data(sys: &StateSpace, interp: &InterpolationSet) -> Result<SylvesterData> {
    interp.ensure_side(Side::Input, sys.inputs())?;
    let (a, b) = (sys.a(), sys.b());
    let (n, m) = (sys.order(), sys.inputs());
    let r = interp.len();
    if r > n {
        return Err(Error::InvalidInterpolation(format!(
            "{r} interpolation points exceed the model order {n}"
        )));
    }
    let bc = to_complex(b);
    let ac = to_complex(a);
    // raw data: A K = K S_raw + B C_raw
    let mut k = RealMatrix::zeros(n, r);
    let mut s_raw = RealMatrix::zeros(r, r);
    let mut c_raw = RealMatrix::zeros(m, r);
    let mut col = 0;
    for member in interp.members() {
        let idx = match member {
            Member::Real(i) | Member::Pair(i) => i,
        };
        let sigma = interp.points()[idx];
        let t: &DVector<Complex64> = &interp.directions()[idx];
        let v = shifted_solve(&ac, &(&bc * t), sigma)?;
        let scale = v.norm();
        let v = v / Complex64::from(scale);
        let t = t / Complex64::from(scale);
        match member {
            Member::Real(_) => {
                k.set_column(col, &v.map(|z| z.re));
                s_raw[(col, col)] = sigma.re;
                c_raw.set_column(col, &(-t.map(|z| z.re)));
                col += 1;
            }
            Member::Pair(_) => {
                k.set_column(col, &v.map(|z| z.re));
                k.set_column(col + 1, &v.map(|z| z.im));
                s_raw[(col, col)] = sigma.re;
                s_raw[(col, col + 1)] = sigma.im;
                s_raw[(col + 1, col)] = -sigma.im;
                s_raw[(col + 1, col + 1)] = sigma.re;
                c_raw.set_column(col, &(-t.map(|z| z.re)));
                c_raw.set_column(col + 1, &(-t.map(|z| z.im)));
                col += 2;
            }
        }
    }
    debug_assert_eq!(col, r);

    let sv = k.clone().svd(false, false).singular_values;
    let (smin, smax) = (sv.min(), sv.max());
    if smin <= RANK_TOL * smax {
        return Err(Error::RankDeficientBasis(smin / smax));
    }
    let qr = k.qr();
    let v = qr.q();
    let rf = qr.r();

    // W̄ = V̄ with orthonormal V̄, so Ē = I
    let a_bar = v.transpose() * a * &v;
    let b_bar = v.transpose() * b;
    let b_perp = b - &v * &b_bar;
    let perp_sv = b_perp.clone().svd(false, false).singular_values;
    let (s, c_t) = if b_perp.ncols() <= n && perp_sv.min() > PROJECTION_TOL * b.norm() {
        let rhs = a * &v - &v * &a_bar;
        let c_t = least_squares(&b_perp, &rhs)?;
        let s = &a_bar - &b_bar * &c_t;
        (s, c_t)
    } else {
        // B⊥ rank deficient: transform the raw data by K = V R
        let r_inv = rf
            .clone()
            .try_inverse()
            .ok_or(Error::RankDeficientBasis(smin / smax))?;
        (&rf * &s_raw * &r_inv, &c_raw * &r_inv)
    };
    let data = SylvesterData {
        s,
        t: c_t,
        t_aug: None,
        f_s: None,
        basis: v,
        side: Side::Input,
        band: None,
    };
    let rank = data.tangential_rank();
    if rank < r {
        return Err(Error::UnobservablePair(rank as f64));
    }
    Ok(data)
}

/// Output-side data; built as the input-side data of the dual system.
pub fn real_output_data(sys: &StateSpace, interp: &InterpolationSet) -> Result<SylvesterData> {
    interp.ensure_side(Side::Output, sys.outputs())?;
    real_input_data(&sys.dual(), &interp.flipped()).map(SylvesterData::transposed)
}

/// Input-side data with the band attached; see [`SylvesterData::augment`].
pub fn augmented_input_data(sys: &StateSpace, interp: &InterpolationSet, band: &FrequencyBand) -> Result<SylvesterData> {
    let mut data = real_input_data(sys, interp)?;
    data.augment(sys, band)?;
    Ok(data)
}

/// Output-side data with the band attached.
pub fn augmented_output_data(sys: &StateSpace, interp: &InterpolationSet, band: &FrequencyBand) -> Result<SylvesterData> {
    let mut data = real_output_data(sys, interp)?;
    data.augment(sys, band)?;
    Ok(data)
}

fn shifted_solve(a: &ComplexMatrix, rhs: &DVector<Complex64>, sigma: Complex64) -> Result<DVector<Complex64>> {
    let n = a.nrows();
    let shifted = ComplexMatrix::identity(n, n) * sigma - a;
    let scale = shifted.norm().max(f64::MIN_POSITIVE);
    let lu = shifted.lu();
    let u = lu.u();
    let min_pivot = (0..n).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    let err = Error::ShiftIsPole {
        re: sigma.re,
        im: sigma.im,
    };
    if min_pivot <= (n as f64) * f64::EPSILON * scale {
        return Err(err);
    }
    lu.solve(rhs).ok_or(err)
}

fn least_squares(a: &RealMatrix, rhs: &RealMatrix) -> Result<RealMatrix> {
    let qr = a.clone().qr();
    let qtb = qr.q().transpose() * rhs;
    qr.r()
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::RankDeficientBasis(0.0))
}
