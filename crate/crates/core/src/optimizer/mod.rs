//! Exhaustive search over decoy color, blur and mask cell size.

mod bundle;
mod layers;
mod params;
mod search;

pub use bundle::{BundleReport, ViewingRecord, BUNDLE_FILES, REPORT_SCHEMA_VERSION};
pub use layers::{build_candidate, decoy_layer, OriginalLayer};
pub use params::{AgnosticParams, GridPreset, SearchGrid, StagePlan};
pub use search::{
    evaluate_candidate, optimize, oracle_enumerate, preference, Objective, ProtectedBundle, ScoredCandidate, SearchInputs,
    ORACLE_MAX_POINTS,
};
