use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The manifest shipped with the crate.
pub const DEFAULT_MANIFEST: &str = include_str!("../../metric_manifest.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MsSsimConfig {
    pub window_size: u32,
    pub window_sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
    pub scale_weights: Vec<f64>,
}

impl MsSsimConfig {
    pub fn c1(&self) -> f64 {
        (self.k1 * self.dynamic_range).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (self.k2 * self.dynamic_range).powi(2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaliencyConfig {
    pub method: String,
    pub working_size: u32,
    pub residual_filter: u32,
    pub smoothing_sigma: f64,
    pub log_floor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VsiConfig {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub alpha: f64,
    pub beta: f64,
    pub min_side: u32,
    pub downsample_base: u32,
    pub saliency: SaliencyConfig,
}

/// All metric constants in effect, as read from a manifest file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricManifest {
    pub version: String,
    pub ms_ssim: MsSsimConfig,
    pub vsi: VsiConfig,
}

impl MetricManifest {
    pub fn parse(text: &str) -> Result<Self> {
        let m: MetricManifest = toml::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The built-in manifest, parsed once.
    pub fn builtin() -> &'static MetricManifest {
        static M: OnceLock<MetricManifest> = OnceLock::new();
        M.get_or_init(|| MetricManifest::parse(DEFAULT_MANIFEST).expect("built-in manifest is valid"))
    }

    fn validate(&self) -> Result<()> {
        let s = &self.ms_ssim;
        if s.window_size % 2 == 0 || s.window_size < 3 {
            return Err(Error::Manifest("ms_ssim.window_size must be odd and >= 3".into()));
        }
        if s.scale_weights.is_empty() || s.scale_weights.iter().any(|w| *w <= 0.0) {
            return Err(Error::Manifest("ms_ssim.scale_weights must be positive".into()));
        }
        if self.vsi.saliency.method != "spectral-residual" {
            return Err(Error::Manifest(format!(
                "unsupported saliency method {:?}",
                self.vsi.saliency.method
            )));
        }
        if !(self.vsi.saliency.log_floor > 0.0) {
            return Err(Error::Manifest("vsi.saliency.log_floor must be positive".into()));
        }
        if self.vsi.saliency.working_size < 8 || self.vsi.min_side < 3 {
            return Err(Error::Manifest("vsi sizes too small".into()));
        }
        Ok(())
    }
}
