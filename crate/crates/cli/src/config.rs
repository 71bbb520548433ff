//! Run configuration read from JSON.
//!
//! ```json
//! {
//!   "method": "flpork",
//!   "band": "modes",
//!   "order": 10,
//!   "interpolation": { "source": "mirror" },
//!   "modes": { "f_lo_hz": 0.1, "f_hi_hz": 2.0, "damping_max": 0.05 }
//! }
//! ```

use std::path::{Path, PathBuf};

use morlim::ltimodel::Side;
use morlim::reduction::Method;
use morlim::verify::DEFAULT_NODES;
use morlim::FrequencyBand;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<BandSpec>,
    /// Reduced order. Defaults to the number of interpolation points or
    /// selected modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default = "default_side")]
    pub side: Side,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpolation: Option<InterpolationSpec>,
    #[serde(default)]
    pub modes: ModeWindow,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_side() -> Side {
    Side::Input
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}

/// Either an explicit band or `"modes"`: a low-pass band up to the highest
/// selected mode frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BandSpec {
    Explicit(FrequencyBand),
    Named(BandName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandName {
    Modes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum InterpolationSpec {
    /// Points `σᵢ` with optional tangential directions (one `[re, im]` list
    /// per point). Missing directions default to dominant singular vectors.
    Explicit {
        points: Vec<Pair>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        directions: Option<Vec<Vec<Pair>>>,
    },
    /// Mirror images of the modes selected by the mode window.
    Mirror,
    /// Mirror images of the listed poles.
    Poles { poles: Vec<Pair> },
}

/// Electromechanical mode window: frequency in Hz and maximum damping ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeWindow {
    pub f_lo_hz: f64,
    pub f_hi_hz: f64,
    pub damping_max: f64,
    /// Upper bound on the number of selected conjugate pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_modes: Option<usize>,
}

impl Default for ModeWindow {
    fn default() -> Self {
        Self {
            f_lo_hz: 0.1,
            f_hi_hz: 2.0,
            damping_max: 0.05,
            max_modes: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let cfg: Self = crate::io::read_json(path)?;
        cfg.validate().map_err(|message| CliError::Format {
            path: path.to_path_buf(),
            message,
        })?;
        Ok(cfg)
    }

    /// Method-specific requirements that serde cannot express.
    pub fn validate(&self) -> Result<(), String> {
        let needs_band = matches!(self.method, Method::Flpork | Method::Oflpork | Method::Flbt);
        if needs_band && self.band.is_none() {
            return Err(format!("method {} needs a band", self.method.as_str()));
        }
        if let Some(BandSpec::Explicit(b)) = &self.band {
            b.validate().map_err(|e| e.to_string())?;
        }
        if self.method == Method::Flbt && self.order.is_none() {
            return Err("method flbt needs an order".into());
        }
        if self.order == Some(0) {
            return Err("order must be positive".into());
        }
        if self.nodes < 8 {
            return Err(format!("nodes must be at least 8, got {}", self.nodes));
        }
        let w = &self.modes;
        let window_ok = w.f_lo_hz.is_finite()
            && w.f_hi_hz.is_finite()
            && w.f_lo_hz >= 0.0
            && w.f_lo_hz <= w.f_hi_hz
            && w.damping_max.is_finite();
        if !window_ok {
            return Err("mode window needs 0 ≤ f_lo_hz ≤ f_hi_hz and a finite damping_max".into());
        }
        if let Some(InterpolationSpec::Explicit {
            points,
            directions: Some(dirs),
        }) = &self.interpolation
        {
            if dirs.len() != points.len() {
                return Err(format!("{} points but {} directions", points.len(), dirs.len()));
            }
        }
        Ok(())
    }
}
