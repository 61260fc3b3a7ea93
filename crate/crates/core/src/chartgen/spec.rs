use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageops::{PixelRect, Srgb};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartType {
    Bar,
    Line,
    Scatter,
    Pie,
}

impl ChartType {
    pub const ALL: [ChartType; 4] = [ChartType::Bar, ChartType::Line, ChartType::Scatter, ChartType::Pie];

    pub fn name(self) -> &'static str {
        match self {
            ChartType::Bar => "bar",
            ChartType::Line => "line",
            ChartType::Scatter => "scatter",
            ChartType::Pie => "pie",
        }
    }
}

impl std::str::FromStr for ChartType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bar" => Ok(ChartType::Bar),
            "line" => Ok(ChartType::Line),
            "scatter" => Ok(ChartType::Scatter),
            "pie" => Ok(ChartType::Pie),
            other => Err(Error::spec(format!("unknown chart type {other:?}"))),
        }
    }
}

impl std::fmt::Display for ChartType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Margins {
    pub left: u32,
    pub right: u32,
    pub top: u32,
    pub bottom: u32,
}

impl Margins {
    pub const fn uniform(px: u32) -> Self {
        Margins {
            left: px,
            right: px,
            top: px,
            bottom: px,
        }
    }
}

/// The data carried by a chart. Exactly one field set is present in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChartData {
    Bar {
        bar_heights: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    Line {
        /// Each series is a list of `(x, y)` points.
        line_series: Vec<Vec<(f64, f64)>>,
    },
    Scatter {
        /// `(x, y, radius_px)` triples.
        scatter_points: Vec<(f64, f64, f64)>,
    },
    Pie {
        pie_fractions: Vec<f64>,
    },
}

impl ChartData {
    fn chart_type(&self) -> ChartType {
        match self {
            ChartData::Bar { .. } => ChartType::Bar,
            ChartData::Line { .. } => ChartType::Line,
            ChartData::Scatter { .. } => ChartType::Scatter,
            ChartData::Pie { .. } => ChartType::Pie,
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            ChartData::Bar { bar_heights, .. } => bar_heights.is_empty(),
            ChartData::Line { line_series } => line_series.iter().all(|s| s.is_empty()),
            ChartData::Scatter { scatter_points } => scatter_points.is_empty(),
            ChartData::Pie { pie_fractions } => pie_fractions.is_empty(),
        }
    }
}

/// Declarative description of an original chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub chart_type: ChartType,
    pub canvas_width: u32,
    pub canvas_height: u32,
    pub margins: Margins,
    #[serde(default = "default_palette")]
    pub palette: Vec<Srgb>,
    pub data: ChartData,
    /// Stroke width of line series in pixels; 3 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line_width: Option<f64>,
}

/// A ten-color categorical palette.
pub fn default_palette() -> Vec<Srgb> {
    vec![
        Srgb::new(31, 119, 180),
        Srgb::new(255, 127, 14),
        Srgb::new(44, 160, 44),
        Srgb::new(214, 39, 40),
        Srgb::new(148, 103, 189),
        Srgb::new(140, 86, 75),
        Srgb::new(227, 119, 194),
        Srgb::new(127, 127, 127),
        Srgb::new(188, 189, 34),
        Srgb::new(23, 190, 207),
    ]
}

impl ChartSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::spec(format!("malformed spec JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn plot_rect(&self) -> PixelRect {
        let m = self.margins;
        PixelRect::new(
            m.left,
            m.top,
            self.canvas_width.saturating_sub(m.left + m.right),
            self.canvas_height.saturating_sub(m.top + m.bottom),
        )
    }

    /// Checks every invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        if self.canvas_width == 0 || self.canvas_height == 0 {
            return Err(Error::spec("non-positive canvas"));
        }
        let m = self.margins;
        if m.left as u64 + m.right as u64 >= self.canvas_width as u64
            || m.top as u64 + m.bottom as u64 >= self.canvas_height as u64
        {
            return Err(Error::spec("margins leave no plot area"));
        }
        if let Some(w) = self.line_width {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::spec("line width must be positive"));
            }
        }
        if self.palette.is_empty() {
            return Err(Error::spec("empty palette"));
        }
        if self.data.chart_type() != self.chart_type {
            return Err(Error::spec(format!(
                "data does not match chart_type {}",
                self.chart_type
            )));
        }
        if self.data.is_empty() {
            return Err(Error::spec("empty data"));
        }
        match &self.data {
            ChartData::Bar { bar_heights, labels } => {
                if bar_heights.iter().any(|h| !h.is_finite() || *h < 0.0) {
                    return Err(Error::spec("bar heights must be finite and non-negative"));
                }
                if let Some(l) = labels {
                    if l.len() != bar_heights.len() {
                        return Err(Error::spec("label count differs from bar count"));
                    }
                }
            }
            ChartData::Line { line_series } => {
                for s in line_series {
                    if s.len() < 2 {
                        return Err(Error::spec("each line series needs at least two points"));
                    }
                    if s.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                        return Err(Error::spec("line points must be finite"));
                    }
                    if s.windows(2).any(|w| w[1].0 <= w[0].0) {
                        return Err(Error::spec("line x values must be strictly increasing"));
                    }
                }
            }
            ChartData::Scatter { scatter_points } => {
                if scatter_points.iter().any(|(x, y, _)| !x.is_finite() || !y.is_finite()) {
                    return Err(Error::spec("scatter points must be finite"));
                }
                if scatter_points.iter().any(|(_, _, r)| !(r.is_finite() && *r > 0.0)) {
                    return Err(Error::spec("scatter radii must be positive"));
                }
                let plot = self.plot_rect();
                let max_r = scatter_points.iter().map(|p| p.2).fold(0.0, f64::max);
                if 2.0 * max_r + 2.0 > plot.w.min(plot.h) as f64 {
                    return Err(Error::spec("scatter radius too large for the plot area"));
                }
            }
            ChartData::Pie { pie_fractions } => {
                if pie_fractions.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
                    return Err(Error::spec("pie fractions must be positive"));
                }
                let total: f64 = pie_fractions.iter().sum();
                let normalized: f64 = pie_fractions.iter().map(|f| f / total).sum();
                if (normalized - 1.0).abs() > 1e-9 {
                    return Err(Error::spec("pie fractions do not normalize"));
                }
            }
        }
        Ok(())
    }
}
