//! Original chart rendering from declarative specs, with exact mark geometry.
//!
//! Rendering is a pure function of the spec. Data marks are drawn without
//! anti-aliasing by default so the exported [`GeometrySet`] matches the
//! raster pixel for pixel; axes, ticks and labels are exported as
//! auxiliary elements.

mod font;
mod geometry;
mod render;
mod spec;

pub use geometry::{fold_tilt, BarRect, Dot, Element, GeometrySet, Label, Mark, Segment, Slice};
pub use render::{
    bar_pixel_heights, layout, paint_mark, rasterize, render_chart, render_chart_with, RenderOptions,
    AXIS_COLOR, AXIS_OFFSET, LINE_THICKNESS,
};
pub use spec::{default_palette, ChartData, ChartSpec, ChartType, Margins};
