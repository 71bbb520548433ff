use nalgebra::DVector;
use num_complex::Complex64;

use super::data::SylvesterData;
use super::interp::InterpolationSet;
use super::pork::relative;
use super::report::{Method, ReductionReport};
use crate::error::{Error, Result};
use crate::ltimodel::{AugmentedSystem, Side, StateSpace};
use crate::matfun::{band_weight, compute_f, solve_lyapunov, FrequencyBand, RealMatrix};

const INVERTIBILITY_TOL: f64 = 1e-12;

/// Inverse of a symmetric matrix through its eigendecomposition, with the
/// definiteness flag. Fails when the matrix is numerically singular, has no
/// positive eigenvalue, or (with `require_definite`) is not positive definite.
pub(crate) fn invert_checked(q: &RealMatrix, require_definite: bool) -> Result<(RealMatrix, bool)> {
    let eig = q.clone().symmetric_eigen();
    let vals = &eig.eigenvalues;
    let min = vals.min();
    let max = vals.max();
    let amax = vals.amax();
    let amin = vals.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    let definite = min > 0.0;
    if max <= 0.0 || amin <= INVERTIBILITY_TOL * amax || (require_definite && !definite) {
        return Err(Error::IndefiniteGramian { min, max });
    }
    let u = &eig.eigenvectors;
    let inv_diag = RealMatrix::from_diagonal(&vals.map(|v| 1.0 / v));
    let inv = u * inv_diag * u.transpose();
    Ok(((&inv + inv.transpose()) * 0.5, definite))
}

/// Frequency-limited pseudo-optimal rational Krylov reduction, input side.
///
/// The ROM has poles at `-σᵢ`, its band-limited controllability Gramian is
/// `Q̃_{sω}⁻¹`, and it satisfies the band-limited energy identity.
pub fn flpork(sys: &StateSpace, interp: &InterpolationSet, band: &FrequencyBand) -> Result<ReductionReport> {
    band.validate()?;
    sys.ensure_stable()?;
    interp.ensure_right_half_plane()?;
    let f_a = compute_f(sys.a(), band)?;
    let mut data = super::data::real_input_data(sys, interp)?;
    data.augment_with_f(sys, band, &f_a)?;

    let (s, ct) = (&data.s, &data.t);
    let f_s = data.f_s.as_ref().expect("augmented");
    let ctc = ct.transpose() * ct;
    let w = f_s.transpose() * &ctc + &ctc * f_s;
    let q = solve_lyapunov(&(-s.transpose()), &w)?;
    let (q_inv, definite) = invert_checked(&q, false)?;
    let a_r = s - &q_inv * &ctc * f_s - &q_inv * f_s.transpose() * &ctc;
    let b_r = -(&q_inv * ct.transpose());
    let c_r = sys.c() * &data.basis;
    let rom = StateSpace::new(a_r, b_r, c_r)?;

    let full_aug = AugmentedSystem::with_f(sys, band, Side::Input, f_a);
    let mut report = finish(rom, Method::Flpork, band, interp, q, definite, data)?;
    report.interpolation_residuals = augmented_residuals(&full_aug, &report.rom, interp, band)?;
    report.with_norms(sys, Some(band))
}

/// Frequency-limited pseudo-optimal rational Krylov reduction, output side.
pub fn oflpork(sys: &StateSpace, interp: &InterpolationSet, band: &FrequencyBand) -> Result<ReductionReport> {
    band.validate()?;
    sys.ensure_stable()?;
    interp.ensure_right_half_plane()?;
    let f_a = compute_f(sys.a(), band)?;
    let mut data = super::data::real_output_data(sys, interp)?;
    data.augment_with_f(sys, band, &f_a)?;

    let (s, bt) = (&data.s, &data.t);
    let f_s = data.f_s.as_ref().expect("augmented");
    let bbt = bt * bt.transpose();
    let w = f_s * &bbt + &bbt * f_s.transpose();
    let p = solve_lyapunov(&(-s), &w)?;
    let (p_inv, definite) = invert_checked(&p, false)?;
    let a_r = s - f_s * &bbt * &p_inv - &bbt * f_s.transpose() * &p_inv;
    let b_r = data.basis.transpose() * sys.b();
    let c_r = -(bt.transpose() * &p_inv);
    let rom = StateSpace::new(a_r, b_r, c_r)?;

    let full_aug = AugmentedSystem::with_f(sys, band, Side::Output, f_a);
    let mut report = finish(rom, Method::Oflpork, band, interp, p, definite, data)?;
    report.interpolation_residuals = augmented_residuals(&full_aug, &report.rom, interp, band)?;
    report.with_norms(sys, Some(band))
}

fn finish(
    rom: StateSpace,
    method: Method,
    band: &FrequencyBand,
    interp: &InterpolationSet,
    gramian: RealMatrix,
    definite: bool,
    data: SylvesterData,
) -> Result<ReductionReport> {
    let mut report = ReductionReport::new(rom, method, Some(*band));
    report.preserved_poles = interp.points().iter().map(|z| -z).collect();
    report.pseudo_gramian = Some(gramian);
    report.pseudo_gramian_definite = Some(definite);
    report.tangential_rank = Some(data.tangential_rank());
    report.augmented_rank = data.augmented_rank();
    report.data = Some(data);
    Ok(report)
}

/// Relative residuals of the band-augmented tangential interpolation
/// conditions at each `σᵢ`, with the augmented direction
/// `ĉᵢ = [w(-σᵢ) tᵢ; tᵢ]` where `w` is the scalar band weight.
pub(crate) fn augmented_residuals(
    full_aug: &AugmentedSystem,
    rom: &StateSpace,
    interp: &InterpolationSet,
    band: &FrequencyBand,
) -> Result<Vec<f64>> {
    let rom_aug = AugmentedSystem::new(rom, band, full_aug.side)?;
    interp
        .points()
        .iter()
        .zip(interp.directions())
        .map(|(&sigma, t)| {
            let c_hat = augmented_direction(t, -sigma, band);
            let g = full_aug.transfer_eval(sigma)?;
            let gr = rom_aug.transfer_eval(sigma)?;
            let (lhs, diff) = match full_aug.side {
                Side::Input => ((&g * &c_hat).norm(), ((&g - &gr) * &c_hat).norm()),
                Side::Output => ((c_hat.transpose() * &g).norm(), (c_hat.transpose() * (&g - &gr)).norm()),
            };
            Ok(relative(diff, lhs))
        })
        .collect()
}

/// `[w(λ) t; t]` for the scalar band weight `w`.
pub(crate) fn augmented_direction(t: &DVector<Complex64>, lambda: Complex64, band: &FrequencyBand) -> DVector<Complex64> {
    let w = band_weight(lambda, band);
    let k = t.len();
    DVector::from_fn(2 * k, |i, _| if i < k { w * t[i] } else { t[i - k] })
}
