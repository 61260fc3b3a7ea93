//! Decoy-overlay protection for charts.
//!
//! A chart is overlaid on a blurred decoy chart of the same type while its
//! own marks are cut into a fine cell pattern. Up close the sharp original
//! dominates; from a distance the fine pattern averages away and the
//! low-frequency decoy dominates. Colors, blur and cell size are picked by
//! exhaustive search over a perceptual score computed on downsampled
//! renditions of the images at two viewing distances.

pub mod chartgen;
pub mod decoy;
pub mod error;
pub mod imageops;
pub mod optimizer;
pub mod percept;
pub mod vision;

pub use error::{Error, Result};
