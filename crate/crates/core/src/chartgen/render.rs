use super::font;
use super::geometry::{BarRect, Dot, Element, GeometrySet, Label, Mark, Segment, Slice};
use super::spec::{ChartData, ChartSpec};
use crate::error::{Error, Result};
use crate::imageops::{resample_to, PixelRect, RasterImage, Srgb};

pub const AXIS_COLOR: Srgb = Srgb::new(80, 80, 80);
/// Gap between the plot area and the axis lines, so data marks never touch
/// chart furniture.
pub const AXIS_OFFSET: f64 = 3.0;
pub const LINE_THICKNESS: f64 = 3.0;
const TICK_COUNT: usize = 5;
const TICK_LEN: f64 = 4.0;
const SUPERSAMPLE: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderOptions {
    pub background: Srgb,
    /// Supersampled edges for presentation renders. Off by default so that
    /// drawn pixels match the exported geometry exactly.
    pub antialias: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            background: Srgb::WHITE,
            antialias: false,
        }
    }
}

pub fn render_chart(spec: &ChartSpec) -> Result<(RasterImage, GeometrySet)> {
    render_chart_with(spec, &RenderOptions::default())
}

pub fn render_chart_with(spec: &ChartSpec, opts: &RenderOptions) -> Result<(RasterImage, GeometrySet)> {
    let geom = layout(spec)?;
    let (w, h) = (spec.canvas_width, spec.canvas_height);
    let marks = geom.elements.iter().map(|e| &e.mark);
    let img = if opts.antialias {
        let s = SUPERSAMPLE as f64;
        let big: Vec<Mark> = marks.map(|m| m.scaled(s)).collect();
        let hi = rasterize(w * SUPERSAMPLE, h * SUPERSAMPLE, Some(opts.background), big.iter())?;
        resample_to(&hi, w, h)?
    } else {
        rasterize(w, h, Some(opts.background), marks)?
    };
    Ok((img, geom))
}

/// Paints marks in order onto a fresh canvas; `None` gives a transparent layer.
pub fn rasterize<'a>(
    width: u32,
    height: u32,
    background: Option<Srgb>,
    marks: impl IntoIterator<Item = &'a Mark>,
) -> Result<RasterImage> {
    let mut img = match background {
        Some(bg) => RasterImage::filled(width, height, bg.opaque())?,
        None => RasterImage::transparent(width, height)?,
    };
    for m in marks {
        paint_mark(&mut img, m);
    }
    Ok(img)
}

pub fn paint_mark(img: &mut RasterImage, mark: &Mark) {
    let Some(b) = mark.pixel_bounds(img.width(), img.height()) else {
        return;
    };
    let px = mark.color().opaque();
    for y in b.y..b.bottom() {
        for x in b.x..b.right() {
            if mark.covers(x, y) {
                img.put(x, y, px);
            }
        }
    }
}

/// Pixel heights of the bars: values scale linearly from `[0, max]` onto
/// the plot height, rounded to whole pixels.
pub fn bar_pixel_heights(heights: &[f64], plot_height: u32) -> Vec<f64> {
    let max = heights.iter().copied().fold(0.0, f64::max);
    heights
        .iter()
        .map(|v| if max > 0.0 { (v / max * plot_height as f64).round() } else { 0.0 })
        .collect()
}

/// Computes the exact geometry a spec renders to.
pub fn layout(spec: &ChartSpec) -> Result<GeometrySet> {
    spec.validate()?;
    let plot = spec.plot_rect();
    let canvas = (spec.canvas_width, spec.canvas_height);
    let mut aux = Vec::new();
    let mut data = Vec::new();
    match &spec.data {
        ChartData::Bar { bar_heights, labels } => {
            let max = bar_heights.iter().copied().fold(0.0, f64::max);
            if max <= 0.0 {
                return Err(Error::spec("all bar heights are zero"));
            }
            let unit = plot.w as f64 / (bar_heights.len() + 1) as f64;
            let width = (unit / 3.0).round().max(1.0);
            let color = spec.palette[0];
            for (i, h) in bar_pixel_heights(bar_heights, plot.h).into_iter().enumerate() {
                let center = plot.x as f64 + (i + 1) as f64 * unit;
                let x = (center - width / 2.0).round();
                if h > 0.0 {
                    data.push(Mark::BarRect(BarRect {
                        x,
                        y: plot.bottom() as f64 - h,
                        w: width,
                        h,
                        color,
                    }));
                }
                if let Some(text) = labels.as_ref().map(|l| l[i].clone()) {
                    let (tw, _) = font::text_size(&text, 1);
                    aux.push(Mark::Label(Label {
                        x: (center - tw as f64 / 2.0).round(),
                        y: plot.bottom() as f64 + AXIS_OFFSET + 4.0,
                        text,
                        scale: 1,
                        color: AXIS_COLOR,
                    }));
                }
            }
            axes(&mut aux, plot, (0.0, max));
        }
        ChartData::Line { line_series } => {
            let pts = line_series.iter().flatten();
            let (xmin, xmax) = min_max(pts.clone().map(|p| p.0));
            let (ymin, ymax) = min_max(pts.map(|p| p.1));
            let thickness = spec.line_width.unwrap_or(LINE_THICKNESS);
            let inset = (thickness / 2.0).ceil();
            let map = Mapping::new(plot, inset, (xmin, xmax), (ymin.min(0.0), ymax));
            for (i, series) in line_series.iter().enumerate() {
                let color = spec.palette[i % spec.palette.len()];
                for w in series.windows(2) {
                    let (x0, y0) = map.apply(w[0]);
                    let (x1, y1) = map.apply(w[1]);
                    data.push(Mark::Segment(Segment {
                        x0,
                        y0,
                        x1,
                        y1,
                        thickness,
                        color,
                    }));
                }
            }
            axes(&mut aux, plot, (ymin.min(0.0), ymax));
            x_labels(&mut aux, plot, &map, (xmin, xmax));
        }
        ChartData::Scatter { scatter_points } => {
            let (xmin, xmax) = min_max(scatter_points.iter().map(|p| p.0));
            let (ymin, ymax) = min_max(scatter_points.iter().map(|p| p.1));
            let max_r = scatter_points.iter().map(|p| p.2).fold(0.0, f64::max);
            let map = Mapping::new(plot, max_r.ceil() + 1.0, (xmin, xmax), (ymin.min(0.0), ymax));
            let color = spec.palette[0];
            for &(x, y, r) in scatter_points {
                let (cx, cy) = map.apply((x, y));
                data.push(Mark::Dot(Dot { cx, cy, r, color }));
            }
            axes(&mut aux, plot, (ymin.min(0.0), ymax));
            x_labels(&mut aux, plot, &map, (xmin, xmax));
        }
        ChartData::Pie { pie_fractions } => {
            let total: f64 = pie_fractions.iter().sum();
            let cx = plot.x as f64 + plot.w as f64 / 2.0;
            let cy = plot.y as f64 + plot.h as f64 / 2.0;
            let radius = plot.w.min(plot.h) as f64 / 2.0 - 1.0;
            let mut start = 0.0;
            for (i, f) in pie_fractions.iter().enumerate() {
                let sweep = f / total * 360.0;
                data.push(Mark::Slice(Slice {
                    cx,
                    cy,
                    radius,
                    start_angle: start,
                    sweep_angle: sweep,
                    color: spec.palette[i % spec.palette.len()],
                }));
                start += sweep;
            }
        }
    }
    let elements = aux
        .into_iter()
        .map(Element::aux)
        .chain(data.into_iter().map(Element::data))
        .collect();
    Ok(GeometrySet::new(spec.chart_type, canvas, plot, elements))
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Linear data-to-pixel map onto the plot rect shrunk by `inset` per side.
struct Mapping {
    x0: f64,
    x1: f64,
    y_bottom: f64,
    y_top: f64,
    xr: (f64, f64),
    yr: (f64, f64),
}

impl Mapping {
    fn new(plot: PixelRect, inset: f64, xr: (f64, f64), yr: (f64, f64)) -> Self {
        let yr = if yr.1 > yr.0 { yr } else { (yr.0, yr.0 + 1.0) };
        Mapping {
            x0: plot.x as f64 + inset,
            x1: plot.right() as f64 - inset,
            y_bottom: plot.bottom() as f64 - inset,
            y_top: plot.y as f64 + inset,
            xr,
            yr,
        }
    }

    fn x(&self, x: f64) -> f64 {
        if self.xr.1 > self.xr.0 {
            self.x0 + (x - self.xr.0) / (self.xr.1 - self.xr.0) * (self.x1 - self.x0)
        } else {
            (self.x0 + self.x1) / 2.0
        }
    }

    fn apply(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let t = (y - self.yr.0) / (self.yr.1 - self.yr.0);
        (self.x(x), self.y_bottom - t * (self.y_bottom - self.y_top))
    }
}

fn format_value(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.1}")
    }
}

fn axis_segment(x0: f64, y0: f64, x1: f64, y1: f64) -> Mark {
    Mark::Segment(Segment {
        x0,
        y0,
        x1,
        y1,
        thickness: 1.0,
        color: AXIS_COLOR,
    })
}

// Axis lines sit on pixel centers just outside the plot rect, with ticks and
// value labels on the y axis.
fn axes(aux: &mut Vec<Mark>, plot: PixelRect, (lo, hi): (f64, f64)) {
    let ax = plot.x as f64 - AXIS_OFFSET - 0.5;
    let ay = plot.bottom() as f64 + AXIS_OFFSET + 0.5;
    aux.push(axis_segment(ax, ay, plot.right() as f64 - 0.5, ay));
    aux.push(axis_segment(ax, plot.y as f64 + 0.5, ax, ay));
    for i in 0..TICK_COUNT {
        let frac = i as f64 / (TICK_COUNT - 1) as f64;
        let y = (plot.bottom() as f64 - frac * plot.h as f64).floor().min(plot.bottom() as f64 - 1.0) + 0.5;
        aux.push(axis_segment(ax - TICK_LEN, y, ax, y));
        let text = format_value(lo + frac * (hi - lo));
        let (tw, th) = font::text_size(&text, 1);
        let x = ax - TICK_LEN - 2.0 - tw as f64;
        if x >= 0.0 {
            aux.push(Mark::Label(Label {
                x: x.floor(),
                y: (y - th as f64 / 2.0).floor(),
                text,
                scale: 1,
                color: AXIS_COLOR,
            }));
        }
    }
}

fn x_labels(aux: &mut Vec<Mark>, plot: PixelRect, map: &Mapping, (xmin, xmax): (f64, f64)) {
    let mut values = vec![xmin];
    if xmax > xmin {
        values.push(xmax);
    }
    for v in values {
        let text = format_value(v);
        let (tw, _) = font::text_size(&text, 1);
        aux.push(Mark::Label(Label {
            x: (map.x(v) - tw as f64 / 2.0).round().max(0.0),
            y: plot.bottom() as f64 + AXIS_OFFSET + 4.0,
            text,
            scale: 1,
            color: AXIS_COLOR,
        }));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgen::spec::{default_palette, ChartType, Margins};

    fn spec(chart_type: ChartType, w: u32, h: u32, data: ChartData) -> ChartSpec {
        ChartSpec {
            chart_type,
            canvas_width: w,
            canvas_height: h,
            margins: Margins {
                left: 30,
                right: 10,
                top: 30,
                bottom: 20,
            },
            palette: default_palette(),
            data,
            line_width: None,
        }
    }

    #[test]
    fn pie_sweeps() {
        let s = spec(ChartType::Pie, 300, 300, ChartData::Pie { pie_fractions: vec![0.5, 0.3, 0.2] });
        let (_, g) = render_chart(&s).unwrap();
        let sweeps: Vec<f64> = g.slices().iter().map(|s| s.sweep_angle).collect();
        for (a, b) in sweeps.iter().zip([180.0, 108.0, 72.0]) {
            assert!((a - b).abs() < 1e-9);
        }
        assert_eq!(g.slices()[0].start_angle, 0.0);
        assert!((sweeps.iter().sum::<f64>() - 360.0).abs() < 1e-6);
    }

    #[test]
    fn bar_heights_map_linearly() {
        assert_eq!(bar_pixel_heights(&[0.0, 100.0], 200), vec![0.0, 200.0]);
        assert_eq!(bar_pixel_heights(&[25.0, 100.0], 200), vec![50.0, 200.0]);
        // 300 - 30 - 20 = 250 plot height
        let s = spec(ChartType::Bar, 400, 300, ChartData::Bar { bar_heights: vec![0.0, 100.0], labels: None });
        let (img, g) = render_chart(&s).unwrap();
        let bars = g.bars();
        assert_eq!(bars.len(), 1);
        assert_eq!(bars[0].h, 250.0);
        assert_eq!(bars[0].y + bars[0].h, 280.0);
        let c = bars[0].color.opaque();
        assert_eq!(img.get(bars[0].x as u32, 279), c);
        assert_eq!(img.get(bars[0].x as u32, 30), c);
        assert_ne!(img.get(bars[0].x as u32, 29), c);
    }

    #[test]
    fn diagonal_in_square_plot_has_45_degree_tilt() {
        let mut s = spec(ChartType::Line, 240, 240, ChartData::Line { line_series: vec![vec![(0.0, 0.0), (1.0, 1.0)]] });
        s.margins = Margins::uniform(20);
        let (_, g) = render_chart(&s).unwrap();
        let segs = g.segments();
        assert_eq!(segs.len(), 1);
        assert!((segs[0].tilt() - 45.0).abs() < 1e-9, "{}", segs[0].tilt());
    }

    #[test]
    fn rendering_is_deterministic_and_aa_flag_changes_pixels() {
        let s = spec(
            ChartType::Scatter,
            200,
            160,
            ChartData::Scatter { scatter_points: vec![(0.0, 1.0, 5.0), (2.0, 3.0, 6.0), (4.0, 0.5, 4.0)] },
        );
        let (a, ga) = render_chart(&s).unwrap();
        let (b, gb) = render_chart(&s).unwrap();
        assert_eq!(a.to_png_bytes().unwrap(), b.to_png_bytes().unwrap());
        assert_eq!(ga, gb);
        let (aa, _) = render_chart_with(&s, &RenderOptions { antialias: true, ..Default::default() }).unwrap();
        assert_ne!(aa, a);
    }

    #[test]
    fn data_marks_stay_in_plot_and_aux_marks_are_flagged() {
        let s = spec(
            ChartType::Line,
            320,
            240,
            ChartData::Line { line_series: vec![vec![(0.0, 5.0), (1.0, 9.0), (2.0, 0.0)], vec![(0.0, 1.0), (2.0, 2.0)]] },
        );
        let g = layout(&s).unwrap();
        assert!(g.elements.iter().any(|e| e.auxiliary));
        for m in g.data_marks() {
            let (x0, y0, x1, y1) = m.extent();
            assert!(g.plot_rect.contains_point(x0, y0) && g.plot_rect.contains_point(x1, y1), "{m:?}");
        }
    }

    #[test]
    fn zero_only_bars_rejected() {
        let s = spec(ChartType::Bar, 100, 100, ChartData::Bar { bar_heights: vec![0.0, 0.0], labels: None });
        assert!(render_chart(&s).is_err());
    }
}
