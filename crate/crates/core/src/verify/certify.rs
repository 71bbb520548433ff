use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quad::{oracle_h2w_triple, DEFAULT_NODES};
use super::residue::{parallel_residual, to_residue_form, ResidueForm};
use crate::error::{Error, Result};
use crate::ltimodel::{
    cross_gramians, error_system, gramians_limited, h2_norm_squared, h2w_norm_squared, poles, AugmentedSystem, Side,
    StateSpace,
};
use crate::matfun::{FrequencyBand, RealMatrix};
use crate::reduction::{augmented_direction, input_residuals, pole_set_distance, InterpolationSet, ReductionReport};

pub const MIRROR_TOL: f64 = 1e-8;
pub const GRAMIAN_INVERSE_TOL: f64 = 1e-7;
pub const CROSS_GRAMIAN_TOL: f64 = 1e-7;
pub const ENERGY_TOL: f64 = 1e-6;
pub const PATH_AGREEMENT_TOL: f64 = 1e-4;
pub const INTERPOLATION_TOL: f64 = 1e-6;
pub const RESIDUE_TOL: f64 = 1e-6;
/// Above this condition number of the pseudo Gramian the inverse check is
/// reported as inconclusive.
pub const CONDITION_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub nodes: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { nodes: DEFAULT_NODES }
    }
}

/// One machine-checked claim. `pass` holds exactly when `measured ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
    #[serde(default)]
    pub inconclusive: bool,
    pub context: String,
}

impl Certificate {
    pub fn new(name: &str, measured: f64, bound: f64, context: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            measured,
            bound,
            pass: measured <= bound,
            inconclusive: false,
            context: context.into(),
        }
    }

    fn from_result(name: &str, measured: Result<f64>, bound: f64, context: impl Into<String>) -> Self {
        match measured {
            Ok(v) => Self::new(name, v, bound, context),
            Err(e) => Self::new(name, f64::INFINITY, bound, format!("{}: {e}", e.name())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Any conclusive failure fails; otherwise any inconclusive certificate
/// makes the set inconclusive.
pub fn verdict(certs: &[Certificate]) -> Verdict {
    if certs.iter().any(|c| !c.pass && !c.inconclusive) {
        Verdict::Fail
    } else if certs.iter().any(|c| c.inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

pub fn certify_flpork(
    full: &StateSpace,
    report: &ReductionReport,
    interp: &InterpolationSet,
    band: &FrequencyBand,
) -> Vec<Certificate> {
    certify_flpork_with(full, report, interp, band, &VerifyOptions::default())
}

pub fn certify_oflpork(
    full: &StateSpace,
    report: &ReductionReport,
    interp: &InterpolationSet,
    band: &FrequencyBand,
) -> Vec<Certificate> {
    certify_oflpork_with(full, report, interp, band, &VerifyOptions::default())
}

pub fn certify_flpork_with(
    full: &StateSpace,
    report: &ReductionReport,
    interp: &InterpolationSet,
    band: &FrequencyBand,
    opts: &VerifyOptions,
) -> Vec<Certificate> {
    certify_limited(full, report, interp, band, opts, Side::Input)
}

pub fn certify_oflpork_with(
    full: &StateSpace,
    report: &ReductionReport,
    interp: &InterpolationSet,
    band: &FrequencyBand,
    opts: &VerifyOptions,
) -> Vec<Certificate> {
    certify_limited(full, report, interp, band, opts, Side::Output)
}

/// Mirror poles, unlimited-`H2` energy identity and `G(σᵢ)t̃ᵢ = G̃(σᵢ)t̃ᵢ`.
pub fn certify_pork(full: &StateSpace, report: &ReductionReport, interp: &InterpolationSet) -> Vec<Certificate> {
    let rom = &report.rom;
    let mut certs = vec![mirror_certificate(rom, interp)];
    let gap = (|| {
        let full_sq = h2_norm_squared(full)?;
        let rom_sq = h2_norm_squared(rom)?;
        let err_sq = h2_norm_squared(&error_system(full, rom)?)?;
        Ok((err_sq - full_sq + rom_sq).abs() / full_sq)
    })();
    certs.push(Certificate::from_result(
        "energy_identity",
        gap,
        ENERGY_TOL,
        "|‖G-G̃‖² - ‖G‖² + ‖G̃‖²| / ‖G‖² in H2, Gramian traces",
    ));
    let interp_res = input_residuals(full, rom, interp).map(|v| max_of(&v));
    certs.push(Certificate::from_result(
        "interpolation",
        interp_res,
        INTERPOLATION_TOL,
        "max_i ‖(G(σᵢ) - G̃(σᵢ)) t̃ᵢ‖ / ‖G(σᵢ) t̃ᵢ‖",
    ));
    certs
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn mirror_certificate(rom: &StateSpace, interp: &InterpolationSet) -> Certificate {
    let target: Vec<Complex64> = interp.points().iter().map(|z| -z.conj()).collect();
    Certificate::new(
        "mirror_poles",
        pole_set_distance(&poles(rom), &target),
        MIRROR_TOL,
        "bottleneck distance between ROM poles and {-conj(σᵢ)}",
    )
}

fn certify_limited(
    full: &StateSpace,
    report: &ReductionReport,
    interp: &InterpolationSet,
    band: &FrequencyBand,
    opts: &VerifyOptions,
    side: Side,
) -> Vec<Certificate> {
    let rom = &report.rom;
    let mut certs = vec![mirror_certificate(rom, interp)];
    certs.push(gramian_inverse_certificate(rom, report.pseudo_gramian.as_ref(), band, side));
    certs.push(cross_gramian_certificate(full, rom, band, side));
    certs.extend(energy_certificates(full, rom, band, opts));

    let full_aug = AugmentedSystem::new(full, band, side);
    let interp_res = full_aug
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|fa| crate::reduction::augmented_residuals(fa, rom, interp, band))
        .map(|v| max_of(&v));
    let (label, residue_name, flirka_name) = match side {
        Side::Input => (
            "max_i ‖(G_ω(σᵢ) - G̃_ω(σᵢ)) ĉᵢ‖ / ‖G_ω(σᵢ) ĉᵢ‖, ĉᵢ = [w(-σᵢ) t̃ᵢ; t̃ᵢ]",
            "input_residues",
            "flirka_input",
        ),
        Side::Output => (
            "max_i ‖ĉᵢᵀ (Ḡ_ω(σᵢ) - Ḡ̃_ω(σᵢ))‖ / ‖ĉᵢᵀ Ḡ_ω(σᵢ)‖, ĉᵢ = [w(-σᵢ) t̂ᵢ; t̂ᵢ]",
            "output_residues",
            "flirka_output",
        ),
    };
    certs.push(Certificate::from_result("interpolation", interp_res, INTERPOLATION_TOL, label));

    let rf = to_residue_form(rom);
    let residue = rf.as_ref().map_err(Clone::clone).map(|rf| residue_alignment(rf, interp, side));
    certs.push(Certificate::from_result(
        residue_name,
        residue,
        RESIDUE_TOL,
        match side {
            Side::Input => {
                "max_i sin∠(rᵢᴴ, t̃ᵢᵀ) for the residue rows at the poles nearest -σᵢ (eigenvectors of unit length; \
                 residues match t̃ᵢ up to a complex scale)"
            }
            Side::Output => {
                "max_i sin∠(lᵢ, t̂ᵢᵀ) for the residue columns at the poles nearest -σᵢ (eigenvectors of unit length; \
                 residues match t̂ᵢ up to a complex scale)"
            }
        },
    ));
    let flirka = match (&rf, &full_aug) {
        (Ok(rf), Ok(fa)) => flirka_residual(fa, rom, rf, band),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    certs.push(Certificate::from_result(
        flirka_name,
        flirka,
        INTERPOLATION_TOL,
        "sign-consistent form: augmented model and ROM both evaluated at -λₖ with residue-built directions \
         [w(λₖ) ρₖ; ρₖ]; the literal form pairs G_ω(-λₖ) with G̃_ω(λₖ), a pole of G̃, and is not evaluable",
    ));
    certs
}

fn condition(m: &RealMatrix) -> f64 {
    let ev = m.clone().symmetric_eigen().eigenvalues;
    let amin = ev.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    ev.amax() / amin
}

fn gramian_inverse_certificate(
    rom: &StateSpace,
    pseudo: Option<&RealMatrix>,
    band: &FrequencyBand,
    side: Side,
) -> Certificate {
    let Some(pseudo) = pseudo else {
        return Certificate::new("gramian_inverse", f64::INFINITY, GRAMIAN_INVERSE_TOL, "no pseudo Gramian in report");
    };
    let r = rom.order();
    if pseudo.shape() != (r, r) {
        return Certificate::new("gramian_inverse", f64::INFINITY, GRAMIAN_INVERSE_TOL, "pseudo Gramian has wrong size");
    }
    let measured = gramians_limited(rom, band).map(|g| {
        let gram = match side {
            Side::Input => g.p,
            Side::Output => g.q,
        };
        (gram * pseudo - RealMatrix::identity(r, r)).norm()
    });
    let kappa = condition(pseudo);
    let what = match side {
        Side::Input => "‖P̃_ω Q̃_{sω} - I‖_F",
        Side::Output => "‖Q̃_ω P̃_{sω} - I‖_F",
    };
    let mut cert = Certificate::from_result(
        "gramian_inverse",
        measured,
        GRAMIAN_INVERSE_TOL,
        format!("{what}; condition number of the pseudo Gramian {kappa:.3e}"),
    );
    if kappa > CONDITION_LIMIT && cert.measured.is_finite() {
        cert.inconclusive = true;
        cert.context.push_str(" exceeds 1e8: inconclusive");
    }
    cert
}

fn cross_gramian_certificate(full: &StateSpace, rom: &StateSpace, band: &FrequencyBand, side: Side) -> Certificate {
    let measured = (|| {
        let x = cross_gramians(full, rom, band)?;
        let g = gramians_limited(rom, band)?;
        let (lhs, rhs) = match side {
            Side::Input => (full.c() * &x.p_hat, rom.c() * &g.p),
            Side::Output => (&x.q_hat * full.b(), &g.q * rom.b()),
        };
        Ok((&lhs - &rhs).norm() / rhs.norm())
    })();
    let what = match side {
        Side::Input => "‖C P̂_ω - C̃ P̃_ω‖_F / ‖C̃ P̃_ω‖_F",
        Side::Output => "‖Q̂_ω B - Q̃_ω B̃‖_F / ‖Q̃_ω B̃‖_F",
    };
    Certificate::from_result("cross_gramian", measured, CROSS_GRAMIAN_TOL, what)
}

/// Squared band-limited norms of `G`, `G̃` and `G - G̃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerms {
    pub full: f64,
    pub rom: f64,
    pub error: f64,
}

impl EnergyTerms {
    pub fn gap(&self) -> f64 {
        (self.error - self.full + self.rom).abs() / self.full
    }
}

pub fn energy_terms_gramian(full: &StateSpace, rom: &StateSpace, band: &FrequencyBand) -> Result<EnergyTerms> {
    Ok(EnergyTerms {
        full: h2w_norm_squared(full, band)?,
        rom: h2w_norm_squared(rom, band)?,
        error: h2w_norm_squared(&error_system(full, rom)?, band)?,
    })
}

pub fn energy_terms_quadrature(
    full: &StateSpace,
    rom: &StateSpace,
    band: &FrequencyBand,
    nodes: usize,
) -> Result<EnergyTerms> {
    let [full, rom, error] = oracle_h2w_triple(full, rom, band, nodes)?;
    Ok(EnergyTerms { full, rom, error })
}

/// Largest disagreement between the two paths, each term relative to its
/// own size but never below `1e-8·‖G‖²` (the error term may vanish).
pub fn path_disagreement(a: &EnergyTerms, b: &EnergyTerms) -> f64 {
    let floor = 1e-8 * a.full;
    [(a.full, b.full), (a.rom, b.rom), (a.error, b.error)]
        .iter()
        .map(|&(x, y)| (x - y).abs() / x.abs().max(floor))
        .fold(0.0, f64::max)
}

fn energy_certificates(full: &StateSpace, rom: &StateSpace, band: &FrequencyBand, opts: &VerifyOptions) -> Vec<Certificate> {
    let gram = energy_terms_gramian(full, rom, band);
    let quad = energy_terms_quadrature(full, rom, band, opts.nodes);
    let agree = match (&gram, &quad) {
        (Ok(a), Ok(b)) => Ok(path_disagreement(a, b)),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    vec![
        Certificate::from_result(
            "energy_identity",
            gram.map(|t| t.gap()),
            ENERGY_TOL,
            "|‖G-G̃‖² - ‖G‖² + ‖G̃‖²| / ‖G‖² in H2,ω, Gramian traces",
        ),
        Certificate::from_result(
            "energy_identity_quadrature",
            quad.map(|t| t.gap()),
            ENERGY_TOL,
            format!("same identity with every norm by Gauss–Legendre quadrature, {} nodes per panel", opts.nodes),
        ),
        Certificate::from_result(
            "energy_paths_agree",
            agree,
            PATH_AGREEMENT_TOL,
            "max relative difference of the three squared norms between Gramian and quadrature paths",
        ),
    ]
}

fn nearest_pole(rf: &ResidueForm, z: Complex64) -> usize {
    (0..rf.poles.len())
        .min_by(|&i, &j| (rf.poles[i] - z).norm().total_cmp(&(rf.poles[j] - z).norm()))
        .expect("non-empty")
}

fn residue_alignment(rf: &ResidueForm, interp: &InterpolationSet, side: Side) -> f64 {
    interp
        .points()
        .iter()
        .zip(interp.directions())
        .map(|(&sigma, t)| {
            let k = nearest_pole(rf, -sigma);
            let v: DVector<Complex64> = match side {
                Side::Input => rf.row_residue(k),
                Side::Output => rf.left[k].clone(),
            };
            parallel_residual(&v, t)
        })
        .fold(0.0, f64::max)
}

fn flirka_residual(full_aug: &AugmentedSystem, rom: &StateSpace, rf: &ResidueForm, band: &FrequencyBand) -> Result<f64> {
    let rom_aug = AugmentedSystem::new(rom, band, full_aug.side)?;
    let mut worst = 0.0_f64;
    for (k, &lambda) in rf.poles.iter().enumerate() {
        if lambda.re >= 0.0 {
            return Err(Error::NotStable(lambda.re));
        }
        let dir = match full_aug.side {
            Side::Input => rf.row_residue(k),
            Side::Output => rf.left[k].clone(),
        };
        let hat = augmented_direction(&dir, lambda, band);
        let s = -lambda;
        let g = full_aug.transfer_eval(s)?;
        let gr = rom_aug.transfer_eval(s)?;
        let (base, diff) = match full_aug.side {
            Side::Input => ((&g * &hat).norm(), ((&g - &gr) * &hat).norm()),
            Side::Output => ((hat.transpose() * &g).norm(), (hat.transpose() * (&g - &gr)).norm()),
        };
        worst = worst.max(if base > 0.0 { diff / base } else { diff });
    }
    Ok(worst)
}

