use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::params::AgnosticParams;
use super::search::{Objective, ProtectedBundle};
use crate::error::{Error, Result};
use crate::percept::{GapScores, MetricManifest, ViewingContext};

/// Version of the report layout; bumped on any field change.
pub const REPORT_SCHEMA_VERSION: &str = "1";

/// File names written into a bundle directory.
pub const BUNDLE_FILES: [&str; 6] = ["original.png", "decoy.png", "protected.png", "preview_close.png", "preview_far.png", "report.json"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewingRecord {
    pub close: ViewingContext,
    pub far: ViewingContext,
    pub gamma_close: f64,
    pub gamma_far: f64,
}

/// Contents of `report.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleReport {
    pub schema_version: String,
    pub metric_manifest_version: String,
    pub params: AgnosticParams,
    pub gap1: f64,
    pub gap2: f64,
    pub score: f64,
    pub alpha: f64,
    pub beta: f64,
    pub viewing: ViewingRecord,
    pub candidates_evaluated: usize,
    /// The caller's effective configuration, verbatim.
    pub config: serde_json::Value,
}

impl BundleReport {
    pub fn new(bundle: &ProtectedBundle, objective: &Objective, config: serde_json::Value) -> Self {
        let GapScores { gap1, gap2, score, alpha, beta } = bundle.best.scores;
        BundleReport {
            schema_version: REPORT_SCHEMA_VERSION.to_string(),
            metric_manifest_version: MetricManifest::builtin().version.clone(),
            params: bundle.best.params,
            gap1,
            gap2,
            score,
            alpha,
            beta,
            viewing: ViewingRecord {
                close: objective.close,
                far: objective.far,
                gamma_close: bundle.preview_protected.gamma_close,
                gamma_far: bundle.preview_protected.gamma_far,
            },
            candidates_evaluated: bundle.evaluated,
            config,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| Error::param(format!("malformed report: {e}")))
    }
}

impl ProtectedBundle {
    /// Writes the images and `report` into `dir`, creating it if needed.
    pub fn write_dir(&self, dir: impl AsRef<Path>, report: &BundleReport) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        self.original.save_png(dir.join("original.png"))?;
        self.decoy.save_png(dir.join("decoy.png"))?;
        self.protected.save_png(dir.join("protected.png"))?;
        self.preview_protected.close.save_png(dir.join("preview_close.png"))?;
        self.preview_protected.far.save_png(dir.join("preview_far.png"))?;
        fs::write(dir.join("report.json"), report.to_json())?;
        Ok(())
    }
}
