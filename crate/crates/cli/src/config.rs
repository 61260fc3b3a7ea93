use std::path::{Path, PathBuf};

use decoyvis_core::chartgen::ChartType;
use decoyvis_core::decoy::DecoyConstraints;
use decoyvis_core::optimizer::{GridPreset, SearchGrid, StagePlan};
use decoyvis_core::percept::ViewingConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "DECOYVIS_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputMode {
    /// A chart spec JSON, rendered before protection.
    SpecInput,
    /// A PNG whose marks are extracted.
    ImageInput,
}

impl InputMode {
    /// `.png` files are images, anything else a spec.
    pub fn detect(path: &Path) -> InputMode {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("png") => InputMode::ImageInput,
            _ => InputMode::SpecInput,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Weights {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { alpha: 0.5, beta: 0.5 }
    }
}

/// A preset plus optional explicit lists that replace the preset's.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub preset: Option<GridPreset>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_values: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_values: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage_plan: Option<StagePlan>,
}

impl GridConfig {
    /// The grid for an image of the given size whose smallest data mark
    /// spans `extent_min` pixels.
    pub fn resolve(&self, img_w: u32, img_h: u32, extent_min: u32) -> SearchGrid {
        let mut g = SearchGrid::preset(self.preset.unwrap_or(GridPreset::Coarse), img_w, img_h, extent_min);
        if let Some(v) = &self.l_values {
            g.l_values = v.clone();
        }
        if let Some(v) = &self.c_values {
            g.c_values = v.clone();
        }
        if let Some(v) = &self.k_values {
            g.k_values = v.clone();
        }
        if let Some(v) = &self.m_values {
            g.m_values = v.clone();
        }
        if let Some(p) = self.stage_plan {
            g.stage_plan = p;
        }
        g
    }
}

/// Everything one protect run depends on. Every field has a default; a
/// TOML file names only what it changes and command-line flags override
/// the file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Not part of the report, so two runs into different directories
    /// write identical bytes.
    #[serde(skip_serializing)]
    pub output_dir: Option<PathBuf>,
    /// Detected from the input extension when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<InputMode>,
    /// Required for image input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart_type: Option<ChartType>,
    /// Seeds decoy generation; replaces `constraints.seed`.
    pub seed: u64,
    pub viewing: ViewingConfig,
    pub constraints: DecoyConstraints,
    pub grid: GridConfig,
    pub weights: Weights,
    /// Score candidates on all cores. Results do not depend on it.
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            output_dir: None,
            mode: None,
            chart_type: None,
            seed: 0,
            viewing: ViewingConfig::default(),
            constraints: DecoyConstraints::default(),
            grid: GridConfig::default(),
            weights: Weights::default(),
            parallel: true,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::validation(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The file named by `explicit`, else by the environment variable, else
    /// defaults.
    pub fn load_or_default(explicit: Option<&Path>) -> Result<Self, CliError> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(RunConfig::default()),
            },
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.viewing.validate().map_err(CliError::from)?;
        self.constraints.validate().map_err(CliError::from)?;
        let w = self.weights;
        if !(w.alpha.is_finite() && w.beta.is_finite()) {
            return Err(CliError::validation("weights must be finite"));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}
