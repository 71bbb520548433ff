use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SylvesterData;
use crate::error::Result;
use crate::ltimodel::{error_system, h2_norm_squared, h2w_norm_squared, poles, StateSpace};
use crate::matfun::{FrequencyBand, RealMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pork,
    Flpork,
    Oflpork,
    Flbt,
    Modal,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pork => "pork",
            Method::Flpork => "flpork",
            Method::Oflpork => "oflpork",
            Method::Flbt => "flbt",
            Method::Modal => "modal",
        }
    }
}

/// A reduced model with the quantities needed to certify it.
///
/// Squared norms and the energy gap are `None` when the reduced model is
/// unstable (possible for balanced truncation).
#[derive(Debug, Clone)]
pub struct ReductionReport {
    pub rom: StateSpace,
    pub method: Method,
    pub band: Option<FrequencyBand>,
    /// Poles the method is designed to place: `-σᵢ` for the Krylov methods,
    /// the selected modes for modal truncation, empty for FLBT.
    pub preserved_poles: Vec<Complex64>,
    pub rom_poles: Vec<Complex64>,
    /// Relative tangential interpolation residuals, one per point.
    pub interpolation_residuals: Vec<f64>,
    pub full_norm_sq: Option<f64>,
    pub rom_norm_sq: Option<f64>,
    pub error_norm_sq: Option<f64>,
    /// `|‖G-G̃‖² - ‖G‖² + ‖G̃‖²| / ‖G‖²` in the method's norm.
    pub energy_identity_gap: Option<f64>,
    /// `Q̃_t`, `Q̃_{sω}` or `P̃_{sω}`.
    pub pseudo_gramian: Option<RealMatrix>,
    pub pseudo_gramian_definite: Option<bool>,
    pub hankel_values: Vec<f64>,
    pub rom_stable: bool,
    pub data: Option<SylvesterData>,
    /// PBH ranks of the plain and augmented tangential pairs.
    pub tangential_rank: Option<usize>,
    pub augmented_rank: Option<usize>,
}

impl ReductionReport {
    pub(crate) fn new(rom: StateSpace, method: Method, band: Option<FrequencyBand>) -> Self {
        let rom_poles = poles(&rom);
        let rom_stable = rom.is_stable();
        Self {
            rom,
            method,
            band,
            preserved_poles: Vec::new(),
            rom_poles,
            interpolation_residuals: Vec::new(),
            full_norm_sq: None,
            rom_norm_sq: None,
            error_norm_sq: None,
            energy_identity_gap: None,
            pseudo_gramian: None,
            pseudo_gramian_definite: None,
            hankel_values: Vec::new(),
            rom_stable,
            data: None,
            tangential_rank: None,
            augmented_rank: None,
        }
    }

    /// A report rebuilt from stored artifacts, sufficient for certification.
    pub fn from_parts(
        rom: StateSpace,
        method: Method,
        band: Option<FrequencyBand>,
        pseudo_gramian: Option<RealMatrix>,
    ) -> Self {
        let mut report = Self::new(rom, method, band);
        report.pseudo_gramian = pseudo_gramian;
        report
    }

    /// Fill the norm fields; `band = None` uses the unlimited `H2` norm.
    pub(crate) fn with_norms(mut self, full: &StateSpace, band: Option<&FrequencyBand>) -> Result<Self> {
        if !self.rom_stable {
            return Ok(self);
        }
        let norm = |sys: &StateSpace| match band {
            Some(b) => h2w_norm_squared(sys, b),
            None => h2_norm_squared(sys),
        };
        let full_sq = norm(full)?;
        let rom_sq = norm(&self.rom)?;
        let err_sq = norm(&error_system(full, &self.rom)?)?;
        self.full_norm_sq = Some(full_sq);
        self.rom_norm_sq = Some(rom_sq);
        self.error_norm_sq = Some(err_sq);
        self.energy_identity_gap = Some((err_sq - full_sq + rom_sq).abs() / full_sq.max(f64::MIN_POSITIVE));
        Ok(self)
    }

    /// Largest distance between `preserved_poles` and their matches among
    /// the ROM poles (zero when nothing is preserved).
    pub fn preservation_error(&self) -> f64 {
        let mut best = 0.0_f64;
        for z in &self.preserved_poles {
            let d = self.rom_poles.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            best = best.max(d);
        }
        best
    }
}

/// Bottleneck distance between two pole multisets: the smallest `d` such
/// that a perfect matching exists with every matched pair within `d`.
/// Infinite when the sizes differ.
pub fn pole_set_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    if x.len() != y.len() {
        return f64::INFINITY;
    }
    if x.is_empty() {
        return 0.0;
    }
    let mut cands: Vec<f64> = x.iter().flat_map(|a| y.iter().map(move |b| (a - b).norm())).collect();
    cands.sort_by(f64::total_cmp);
    let (mut lo, mut hi) = (0, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(x, y, cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo]
}

fn perfect_matching(x: &[Complex64], y: &[Complex64], d: f64) -> bool {
    fn augment(i: usize, x: &[Complex64], y: &[Complex64], d: f64, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for j in 0..y.len() {
            if seen[j] || (x[i] - y[j]).norm() > d {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|k| augment(k, x, y, d, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; y.len()];
    (0..x.len()).all(|i| augment(i, x, y, d, &mut vec![false; y.len()], &mut owner))
}
