//! Resolving a [`RunConfig`] against a model, running one method and
//! certifying the result.

use std::f64::consts::PI;

use log::{debug, info};
use morlim::ltimodel::{poles, Side};
use morlim::reduction::{
    flbt, flpork, modal_truncation, oflpork, pork, select_modes, InterpolationSet, Method, ReductionReport,
};
use morlim::verify::{certify_flpork_with, certify_oflpork_with, certify_pork, Certificate, VerifyOptions};
use morlim::{Complex64, Error, FrequencyBand, StateSpace};
use nalgebra::DVector;

use crate::config::{BandSpec, InterpolationSpec, Pair, RunConfig};
use crate::CliError;

/// Tolerance for "mode preserved", relative to `max(1, |λ|)`.
pub const PRESERVE_TOL: f64 = 1e-8;

pub fn to_c(p: &Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn to_pair(z: &Complex64) -> Pair {
    [z.re, z.im]
}

/// A configuration resolved against a concrete model.
#[derive(Debug, Clone)]
pub struct Plan {
    pub band: Option<FrequencyBand>,
    pub order: usize,
    /// Modes to preserve, each followed by its conjugate.
    pub selected: Vec<Complex64>,
    /// Interpolation data for the Krylov methods.
    pub interp: Option<InterpolationSet>,
}

pub fn plan(cfg: &RunConfig, sys: &StateSpace) -> Result<Plan, CliError> {
    plan_for(cfg, cfg.method, sys)
}

/// Resolve `cfg` as if it asked for `method`.
pub fn plan_for(cfg: &RunConfig, method: Method, sys: &StateSpace) -> Result<Plan, CliError> {
    let n = sys.order();
    let w = &cfg.modes;
    let mut window = select_modes(sys, w.f_lo_hz, w.f_hi_hz, w.damping_max);
    if let Some(m) = w.max_modes {
        window.truncate(2 * m);
    }
    debug!("mode window selects {} poles", window.len());

    let band = match &cfg.band {
        None => None,
        Some(BandSpec::Explicit(b)) => Some(*b),
        Some(BandSpec::Named(_)) => {
            let top = window.iter().map(|z| z.im).fold(0.0, f64::max);
            if top <= 0.0 {
                return Err(CliError::usage("band \"modes\" requested but the mode window selects no modes"));
            }
            Some(FrequencyBand::lowpass(top)?)
        }
    };

    let explicit_poles = match &cfg.interpolation {
        Some(InterpolationSpec::Poles { poles }) => Some(poles.iter().map(to_c).collect::<Vec<_>>()),
        _ => None,
    };
    let mut selected = explicit_poles.clone().unwrap_or_else(|| match (&cfg.interpolation, method) {
        (Some(InterpolationSpec::Mirror), _) | (_, Method::Modal) => window.clone(),
        _ => Vec::new(),
    });
    if let Some(z) = selected.iter().find(|z| z.re >= 0.0) {
        return Err(Error::UnstableMode { re: z.re, im: z.im }.into());
    }

    let order = match (method, cfg.order, &cfg.interpolation) {
        (_, Some(r), _) => r,
        (Method::Pork | Method::Flpork | Method::Oflpork, None, Some(InterpolationSpec::Explicit { points, .. })) => {
            points.len()
        }
        _ => selected.len(),
    };
    if order == 0 {
        return Err(CliError::usage("nothing to reduce to: no order given and no modes selected"));
    }
    if order > n {
        return Err(CliError::usage(format!("order {order} exceeds the model order {n}")));
    }
    if selected.len() > order {
        if explicit_poles.is_some() {
            return Err(CliError::usage(format!(
                "{} poles listed but the order is {order}",
                selected.len()
            )));
        }
        // keep whole conjugate pairs, least damped first
        selected.truncate(order - order % 2);
        info!("mode selection capped to {} poles to fit order {order}", selected.len());
    }

    let interp = match method {
        Method::Pork | Method::Flpork | Method::Oflpork => Some(interpolation(cfg, sys, &selected, band, order)?),
        Method::Flbt | Method::Modal => None,
    };
    if method == Method::Modal {
        fill_modal(sys, &mut selected, order);
    }
    Ok(Plan {
        band,
        order,
        selected,
        interp,
    })
}

fn interpolation(
    cfg: &RunConfig,
    sys: &StateSpace,
    selected: &[Complex64],
    band: Option<FrequencyBand>,
    order: usize,
) -> Result<InterpolationSet, CliError> {
    if let Some(InterpolationSpec::Explicit { points, directions }) = &cfg.interpolation {
        if points.len() != order {
            return Err(CliError::usage(format!("{} interpolation points but the order is {order}", points.len())));
        }
        let points: Vec<Complex64> = points.iter().map(to_c).collect();
        return Ok(match directions {
            Some(dirs) => {
                let dirs = dirs.iter().map(|d| DVector::from_iterator(d.len(), d.iter().map(to_c))).collect();
                InterpolationSet::new(points, dirs, cfg.side)?
            }
            None => InterpolationSet::with_default_directions(sys, points, cfg.side)?,
        });
    }
    let mut points: Vec<Complex64> = selected.iter().map(|z| -z.conj()).collect();
    let fill = order - points.len();
    if fill > 0 {
        let top = band
            .map(|b| b.omega_hi)
            .or_else(|| selected.iter().map(|z| z.im).reduce(f64::max))
            .filter(|&w| w > 0.0)
            .unwrap_or(1.0);
        points.extend(fill_points(top, fill));
        debug!("{fill} real interpolation points added in [{:.4e}, {top:.4e}]", top / 20.0);
    }
    Ok(InterpolationSet::with_default_directions(sys, points, cfg.side)?)
}

/// `k` real points log-spaced in `[top/20, top]`.
pub fn fill_points(top: f64, k: usize) -> Vec<Complex64> {
    let lo = top / 20.0;
    (0..k)
        .map(|i| {
            let x = if k == 1 { top } else { lo * 20f64.powf(i as f64 / (k - 1) as f64) };
            Complex64::new(x, 0.0)
        })
        .collect()
}

/// Extend `selected` with the slowest remaining modes (smallest `|λ|`),
/// keeping conjugate pairs whole.
fn fill_modal(sys: &StateSpace, selected: &mut Vec<Complex64>, order: usize) {
    let mut rest: Vec<Complex64> = poles(sys)
        .into_iter()
        .filter(|z| z.im >= 0.0)
        .filter(|z| !selected.iter().any(|s| (s - z).norm() <= PRESERVE_TOL * z.norm().max(1.0)))
        .collect();
    rest.sort_by(|x, y| x.norm().total_cmp(&y.norm()).then(x.im.total_cmp(&y.im)));
    for z in rest {
        let need = if z.im > 0.0 { 2 } else { 1 };
        if selected.len() + need > order {
            continue;
        }
        selected.push(z);
        if z.im > 0.0 {
            selected.push(z.conj());
        }
    }
}

pub fn reduce(sys: &StateSpace, method: Method, plan: &Plan) -> morlim::Result<ReductionReport> {
    let band = || plan.band.ok_or_else(|| Error::InvalidArgument("a band is required".into()));
    let interp = || {
        plan.interp
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("interpolation data is required".into()))
    };
    match method {
        Method::Pork => pork(sys, interp()?),
        Method::Flpork => flpork(sys, interp()?, &band()?),
        Method::Oflpork => oflpork(sys, interp()?, &band()?),
        Method::Flbt => flbt(sys, plan.order, &band()?),
        Method::Modal => modal_truncation(sys, &plan.selected),
    }
}

/// Largest distance from a selected mode to the nearest reduced pole,
/// relative to `max(1, |λ|)`. Zero when nothing is selected.
pub fn selected_mode_error(selected: &[Complex64], rom_poles: &[Complex64]) -> f64 {
    selected
        .iter()
        .map(|z| {
            let d = rom_poles.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            d / z.norm().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Certificates for a reduced model: the library certificates for the
/// Krylov methods, plus mode preservation and stability checks.
pub fn certify(
    full: &StateSpace,
    report: &ReductionReport,
    method: Method,
    plan: &Plan,
    opts: &VerifyOptions,
) -> Vec<Certificate> {
    let mut certs = match (method, &plan.interp, plan.band) {
        (Method::Pork, Some(i), _) => certify_pork(full, report, i),
        (Method::Flpork, Some(i), Some(b)) => certify_flpork_with(full, report, i, &b, opts),
        (Method::Oflpork, Some(i), Some(b)) => certify_oflpork_with(full, report, i, &b, opts),
        _ => Vec::new(),
    };
    if method != Method::Flbt && !plan.selected.is_empty() {
        certs.push(Certificate::new(
            "selected_modes",
            selected_mode_error(&plan.selected, &report.rom_poles),
            PRESERVE_TOL,
            "max over selected modes of the distance to the nearest reduced pole / max(1, |λ|)",
        ));
    }
    if matches!(method, Method::Flbt | Method::Modal) {
        let abscissa = report.rom_poles.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let mut c = Certificate::new("rom_stable", abscissa, 0.0, "largest real part of the reduced poles");
        c.pass = abscissa < 0.0;
        certs.push(c);
    }
    certs
}

/// Oscillation frequency in Hz and damping ratio of a pole.
pub fn mode_metrics(z: &Complex64) -> (f64, f64) {
    let zeta = if z.norm() > 0.0 { -z.re / z.norm() } else { 1.0 };
    (z.im / (2.0 * PI), zeta)
}

pub fn side_name(side: Side) -> &'static str {
    match side {
        Side::Input => "input",
        Side::Output => "output",
    }
}
