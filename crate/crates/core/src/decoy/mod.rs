//! Decoy chart generation.
//!
//! A decoy has the original's chart type and plot area but different data:
//! taller interleaved bars, jittered and partly reversed lines, displaced
//! and enlarged dots, re-partitioned and enlarged pies. Colors are planned
//! as hues only; lightness and chroma are chosen by the optimizer.

mod bar;
mod color;
mod line;
mod pie;
mod scatter;

pub use bar::gen_decoy_bar;
pub use color::{plan_decoy_colors, plan_decoy_hues, HuePlan, SINGLE_HUE_SPREAD};
pub use line::{chain_polylines, gen_decoy_line};
pub use pie::gen_decoy_pie;
pub use scatter::gen_decoy_scatter;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chartgen::{ChartType, Element, GeometrySet, Mark};
use crate::error::{Error, Result};
use crate::imageops::{lch_to_srgb, LchColor, PixelRect};

/// Unit of the scatter displacement bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisplacementUnit {
    /// Multiples of the source dot's radius.
    Radius,
    Px,
}

/// Per-type randomization limits. Every field has a default, so a config
/// file only needs to name what it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoyConstraints {
    pub seed: u64,
    /// Decoy bars exceed their tallest neighboring original by this fraction.
    pub bar_min_excess: f64,
    /// Decoy bars per gap beyond the one interleaved at the midpoint.
    pub bar_count_extra: u32,
    /// Vertex jitter as a fraction of plot height.
    pub line_jitter: f64,
    pub line_trend_flip_prob: f64,
    /// Polyline end vertices move along their segment by up to this
    /// fraction of its length, inward or outward.
    pub line_length_jitter: f64,
    pub scatter_disp_unit: DisplacementUnit,
    pub scatter_disp_min: f64,
    pub scatter_disp_max: f64,
    pub scatter_radius_scale: f64,
    pub scatter_count_extra: u32,
    /// Degrees.
    pub pie_split_threshold: f64,
    pub pie_split_parts: u32,
    /// Degrees.
    pub pie_merge_threshold: f64,
    pub pie_radius_scale: f64,
}

impl Default for DecoyConstraints {
    fn default() -> Self {
        DecoyConstraints {
            seed: 0,
            bar_min_excess: 0.10,
            bar_count_extra: 0,
            line_jitter: 0.15,
            line_trend_flip_prob: 0.5,
            line_length_jitter: 0.10,
            scatter_disp_unit: DisplacementUnit::Radius,
            scatter_disp_min: 1.5,
            scatter_disp_max: 3.0,
            scatter_radius_scale: 1.6,
            scatter_count_extra: 0,
            pie_split_threshold: 120.0,
            pie_split_parts: 2,
            pie_merge_threshold: 30.0,
            pie_radius_scale: 1.15,
        }
    }
}

impl DecoyConstraints {
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        let checks: [(bool, &str); 11] = [
            (finite_nonneg(self.bar_min_excess), "bar_min_excess must be >= 0"),
            (finite_nonneg(self.line_jitter), "line_jitter must be >= 0"),
            ((0.0..=1.0).contains(&self.line_trend_flip_prob), "line_trend_flip_prob must be in [0, 1]"),
            ((0.0..1.0).contains(&self.line_length_jitter), "line_length_jitter must be in [0, 1)"),
            (finite_nonneg(self.scatter_disp_min), "scatter_disp_min must be >= 0"),
            (
                self.scatter_disp_max.is_finite() && self.scatter_disp_min <= self.scatter_disp_max,
                "scatter_disp_min must not exceed scatter_disp_max",
            ),
            (self.scatter_radius_scale > 1.0 && self.scatter_radius_scale.is_finite(), "scatter_radius_scale must be > 1"),
            (self.pie_radius_scale > 1.0 && self.pie_radius_scale.is_finite(), "pie_radius_scale must be > 1"),
            (self.pie_split_parts >= 2, "pie_split_parts must be >= 2"),
            (
                self.pie_split_threshold > 0.0 && self.pie_split_threshold <= 360.0,
                "pie_split_threshold must be in (0, 360]",
            ),
            (
                self.pie_merge_threshold >= 0.0 && self.pie_merge_threshold <= 360.0,
                "pie_merge_threshold must be in [0, 360]",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::param(*msg)),
            None => Ok(()),
        }
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Where a decoy mark came from. Indices refer to the original's data marks
/// of the same kind, in the order the generator received them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Bar placed beside or between original bars; `None` marks a flank.
    InterleavedAt { left: Option<usize>, right: Option<usize>, reference_height: f64 },
    /// Segment `segment` of perturbed polyline `polyline`.
    PerturbedFrom { polyline: usize, segment: usize },
    /// Dot displaced from an original; `clipped` when it was pushed back
    /// inside the plot afterwards.
    DisplacedFrom { source: usize, clipped: bool },
    /// Extra dot with no source.
    Added,
    KeptFrom { source: usize },
    SplitFrom { source: usize, part: u32 },
    MergedFrom { sources: Vec<usize> },
}

/// Decoy marks with their provenance, sharing the original's canvas and
/// plot area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoyGeometry {
    pub chart_type: ChartType,
    pub canvas_width: u32,
    pub canvas_height: u32,
    pub plot_rect: PixelRect,
    pub marks: Vec<Mark>,
    pub provenance: Vec<Provenance>,
}

impl DecoyGeometry {
    /// The decoy as a renderable geometry set with each mark colored
    /// `LCH(l, c, hues[i])`.
    pub fn colored(&self, hues: &[f64], l: f64, c: f64) -> GeometrySet {
        let elements = self
            .marks
            .iter()
            .zip(hues)
            .map(|(m, &h)| {
                let mut m = m.clone();
                m.set_color(lch_to_srgb(LchColor::new(l, c, h)).0);
                Element::data(m)
            })
            .collect();
        GeometrySet::new(self.chart_type, (self.canvas_width, self.canvas_height), self.plot_rect, elements)
    }

    /// The decoy with its placeholder colors.
    pub fn to_geometry(&self) -> GeometrySet {
        let elements = self.marks.iter().cloned().map(Element::data).collect();
        GeometrySet::new(self.chart_type, (self.canvas_width, self.canvas_height), self.plot_rect, elements)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decoy serializes")
    }
}

/// Generates a decoy for any supported chart type.
pub fn generate_decoy(orig: &GeometrySet, c: &DecoyConstraints) -> Result<DecoyGeometry> {
    c.validate()?;
    let canvas = (orig.canvas_width, orig.canvas_height);
    match orig.chart_type {
        ChartType::Bar => gen_decoy_bar(orig, c),
        ChartType::Line => {
            let segs: Vec<_> = orig.segments().into_iter().cloned().collect();
            gen_decoy_line(&segs, orig.plot_rect, canvas, c)
        }
        ChartType::Scatter => {
            let dots: Vec<_> = orig.dots().into_iter().cloned().collect();
            gen_decoy_scatter(&dots, orig.plot_rect, canvas, c)
        }
        ChartType::Pie => {
            let slices: Vec<_> = orig.slices().into_iter().cloned().collect();
            gen_decoy_pie(&slices, orig.plot_rect, canvas, c)
        }
    }
}

/// Uniform draw in `(0, 1]`.
pub(crate) fn unit_open_closed(rng: &mut impl rand::Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Uniform draw in `[-1, 1)`.
pub(crate) fn symmetric(rng: &mut impl rand::Rng) -> f64 {
    2.0 * rng.random::<f64>() - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        DecoyConstraints::default().validate().unwrap();
    }

    #[test]
    fn invalid_constraints_rejected() {
        let bad = [
            DecoyConstraints { scatter_radius_scale: 1.0, ..Default::default() },
            DecoyConstraints { pie_radius_scale: 0.9, ..Default::default() },
            DecoyConstraints { line_trend_flip_prob: 1.5, ..Default::default() },
            DecoyConstraints { scatter_disp_min: 4.0, scatter_disp_max: 3.0, ..Default::default() },
            DecoyConstraints { pie_split_parts: 1, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn constraints_from_partial_toml() {
        let c: DecoyConstraints = toml::from_str("seed = 9\nbar_min_excess = 0.2\nscatter_disp_unit = \"px\"").unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.bar_min_excess, 0.2);
        assert_eq!(c.scatter_disp_unit, DisplacementUnit::Px);
        assert_eq!(c.pie_split_parts, 2);
        assert!(toml::from_str::<DecoyConstraints>("bogus = 1").is_err());
    }
}
