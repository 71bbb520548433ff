use super::data::real_input_data;
use super::flpork::invert_checked;
use super::interp::InterpolationSet;
use super::report::{Method, ReductionReport};
use crate::error::Result;
use crate::ltimodel::{transfer_eval, StateSpace};
use crate::matfun::solve_lyapunov;

/// Pseudo-optimal rational Krylov reduction in the unlimited `H2` norm.
///
/// The ROM has poles at `-σᵢ` and interpolates `G(σᵢ) t̃ᵢ`.
pub fn pork(sys: &StateSpace, interp: &InterpolationSet) -> Result<ReductionReport> {
    interp.ensure_right_half_plane()?;
    let data = real_input_data(sys, interp)?;
    let (s, ct) = (&data.s, &data.t);
    let q = solve_lyapunov(&(-s.transpose()), &(ct.transpose() * ct))?;
    let (q_inv, _) = invert_checked(&q, true)?;
    let a_r = -(&q_inv * s.transpose() * &q);
    let b_r = -(&q_inv * ct.transpose());
    let c_r = sys.c() * &data.basis;
    let rom = StateSpace::new(a_r, b_r, c_r)?;

    let mut report = ReductionReport::new(rom, Method::Pork, None);
    report.preserved_poles = interp.points().iter().map(|z| -z).collect();
    report.interpolation_residuals = input_residuals(sys, &report.rom, interp)?;
    report.pseudo_gramian = Some(q);
    report.pseudo_gramian_definite = Some(true);
    report.tangential_rank = Some(data.tangential_rank());
    report.data = Some(data);
    if sys.is_stable() {
        report = report.with_norms(sys, None)?;
    }
    Ok(report)
}

/// `‖(G(σᵢ) - G̃(σᵢ)) t̃ᵢ‖ / ‖G(σᵢ) t̃ᵢ‖`.
pub(crate) fn input_residuals(full: &StateSpace, rom: &StateSpace, interp: &InterpolationSet) -> Result<Vec<f64>> {
    interp
        .points()
        .iter()
        .zip(interp.directions())
        .map(|(&sigma, t)| {
            let g = transfer_eval(full, sigma)? * t;
            let gr = transfer_eval(rom, sigma)? * t;
            Ok(relative((&g - &gr).norm(), g.norm()))
        })
        .collect()
}

pub(crate) fn relative(diff: f64, base: f64) -> f64 {
    if base > 0.0 {
        diff / base
    } else {
        diff
    }
}

