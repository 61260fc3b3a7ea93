use serde::{Deserialize, Serialize};

use super::font;
use super::spec::ChartType;
use crate::imageops::{normalize_degrees, PixelRect, Srgb};

/// Filled axis-aligned rectangle; `(x, y)` is the top-left corner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarRect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub color: Srgb,
}

/// Straight stroke with round caps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub thickness: f64,
    pub color: Srgb,
}

impl Segment {
    /// Tilt in degrees measured counter-clockwise from the +x axis with y
    /// pointing up, folded into (-90, 90].
    pub fn tilt(&self) -> f64 {
        fold_tilt((-(self.y1 - self.y0)).atan2(self.x1 - self.x0).to_degrees())
    }

    pub fn length(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    /// Distance from a point to the segment.
    pub fn distance_to(&self, px: f64, py: f64) -> f64 {
        let (dx, dy) = (self.x1 - self.x0, self.y1 - self.y0);
        let len2 = dx * dx + dy * dy;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((px - self.x0) * dx + (py - self.y0) * dy) / len2).clamp(0.0, 1.0)
        };
        (px - self.x0 - t * dx).hypot(py - self.y0 - t * dy)
    }
}

/// Folds an undirected line angle into (-90, 90].
pub fn fold_tilt(deg: f64) -> f64 {
    let mut t = deg.rem_euclid(180.0);
    if t > 90.0 {
        t -= 180.0;
    }
    t
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dot {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
    pub color: Srgb,
}

/// Pie wedge. Angles are in degrees, measured clockwise from 12 o'clock.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
    pub start_angle: f64,
    pub sweep_angle: f64,
    pub color: Srgb,
}

impl Slice {
    pub fn mid_angle(&self) -> f64 {
        normalize_degrees(self.start_angle + self.sweep_angle / 2.0)
    }

    fn contains_angle(&self, a: f64) -> bool {
        if self.sweep_angle >= 360.0 {
            return true;
        }
        let rel = (a - self.start_angle).rem_euclid(360.0);
        rel < self.sweep_angle
    }

    fn point_at(&self, angle: f64) -> (f64, f64) {
        let t = angle.to_radians();
        (self.cx + self.radius * t.sin(), self.cy - self.radius * t.cos())
    }
}

/// Text drawn with the built-in 3x5 bitmap font; `(x, y)` is the top-left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub x: f64,
    pub y: f64,
    pub text: String,
    pub scale: u32,
    pub color: Srgb,
}

/// One drawable mark.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mark {
    BarRect(BarRect),
    Segment(Segment),
    Dot(Dot),
    Slice(Slice),
    Label(Label),
}

impl Mark {
    pub fn color(&self) -> Srgb {
        match self {
            Mark::BarRect(m) => m.color,
            Mark::Segment(m) => m.color,
            Mark::Dot(m) => m.color,
            Mark::Slice(m) => m.color,
            Mark::Label(m) => m.color,
        }
    }

    pub fn set_color(&mut self, color: Srgb) {
        match self {
            Mark::BarRect(m) => m.color = color,
            Mark::Segment(m) => m.color = color,
            Mark::Dot(m) => m.color = color,
            Mark::Slice(m) => m.color = color,
            Mark::Label(m) => m.color = color,
        }
    }

    /// Continuous bounding box `(x0, y0, x1, y1)`.
    pub fn extent(&self) -> (f64, f64, f64, f64) {
        match self {
            Mark::BarRect(b) => (b.x, b.y, b.x + b.w, b.y + b.h),
            Mark::Segment(s) => {
                let r = s.thickness / 2.0;
                (
                    s.x0.min(s.x1) - r,
                    s.y0.min(s.y1) - r,
                    s.x0.max(s.x1) + r,
                    s.y0.max(s.y1) + r,
                )
            }
            Mark::Dot(d) => (d.cx - d.r, d.cy - d.r, d.cx + d.r, d.cy + d.r),
            Mark::Slice(s) => {
                if s.sweep_angle >= 360.0 {
                    return (s.cx - s.radius, s.cy - s.radius, s.cx + s.radius, s.cy + s.radius);
                }
                let mut pts = vec![(s.cx, s.cy), s.point_at(s.start_angle), s.point_at(s.start_angle + s.sweep_angle)];
                for a in [0.0, 90.0, 180.0, 270.0] {
                    if s.contains_angle(a) {
                        pts.push(s.point_at(a));
                    }
                }
                let fold = |f: fn(f64, f64) -> f64, init: f64, pick: fn(&(f64, f64)) -> f64| {
                    pts.iter().map(pick).fold(init, f)
                };
                (
                    fold(f64::min, f64::INFINITY, |p| p.0),
                    fold(f64::min, f64::INFINITY, |p| p.1),
                    fold(f64::max, f64::NEG_INFINITY, |p| p.0),
                    fold(f64::max, f64::NEG_INFINITY, |p| p.1),
                )
            }
            Mark::Label(l) => {
                let (w, h) = font::text_size(&l.text, l.scale);
                (l.x, l.y, l.x + w as f64, l.y + h as f64)
            }
        }
    }

    pub fn center(&self) -> (f64, f64) {
        match self {
            Mark::Dot(d) => (d.cx, d.cy),
            Mark::Segment(s) => ((s.x0 + s.x1) / 2.0, (s.y0 + s.y1) / 2.0),
            Mark::Slice(s) => {
                let (x, y) = Slice { radius: s.radius / 2.0, ..s.clone() }.point_at(s.mid_angle());
                (x, y)
            }
            _ => {
                let (x0, y0, x1, y1) = self.extent();
                ((x0 + x1) / 2.0, (y0 + y1) / 2.0)
            }
        }
    }

    /// Pixel bounds of the mark clipped to a `width` x `height` canvas, or
    /// `None` when nothing of it is on the canvas.
    pub fn pixel_bounds(&self, width: u32, height: u32) -> Option<PixelRect> {
        let (x0, y0, x1, y1) = self.extent();
        let clamp = |v: f64, hi: u32| v.clamp(0.0, hi as f64) as u32;
        let (px0, py0) = (clamp(x0.floor(), width), clamp(y0.floor(), height));
        let (px1, py1) = (clamp(x1.ceil(), width), clamp(y1.ceil(), height));
        (px1 > px0 && py1 > py0).then(|| PixelRect::new(px0, py0, px1 - px0, py1 - py0))
    }

    /// Whether the pixel at `(px, py)` is painted, sampling at its center.
    pub fn covers(&self, px: u32, py: u32) -> bool {
        let (x, y) = (px as f64 + 0.5, py as f64 + 0.5);
        match self {
            Mark::BarRect(b) => x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h,
            Mark::Segment(s) => s.distance_to(x, y) <= s.thickness / 2.0,
            Mark::Dot(d) => (x - d.cx).powi(2) + (y - d.cy).powi(2) <= d.r * d.r,
            Mark::Slice(s) => {
                let (dx, dy) = (x - s.cx, y - s.cy);
                if dx * dx + dy * dy > s.radius * s.radius {
                    return false;
                }
                s.contains_angle(normalize_degrees(dx.atan2(-dy).to_degrees()))
            }
            Mark::Label(l) => {
                if x < l.x || y < l.y {
                    return false;
                }
                let gx = ((x - l.x) / l.scale as f64).floor() as usize;
                let gy = ((y - l.y) / l.scale as f64).floor() as usize;
                font::text_pixel(&l.text, gx, gy)
            }
        }
    }

    /// Pixel footprint: bounds plus per-pixel coverage over them.
    pub fn footprint(&self, width: u32, height: u32) -> Option<(PixelRect, Vec<bool>)> {
        let b = self.pixel_bounds(width, height)?;
        let mut covered = Vec::with_capacity(b.area() as usize);
        for y in b.y..b.bottom() {
            for x in b.x..b.right() {
                covered.push(self.covers(x, y));
            }
        }
        covered.iter().any(|&c| c).then_some((b, covered))
    }

    /// The mark with all coordinates and sizes multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Mark {
        match self {
            Mark::BarRect(b) => Mark::BarRect(BarRect {
                x: b.x * s,
                y: b.y * s,
                w: b.w * s,
                h: b.h * s,
                color: b.color,
            }),
            Mark::Segment(g) => Mark::Segment(Segment {
                x0: g.x0 * s,
                y0: g.y0 * s,
                x1: g.x1 * s,
                y1: g.y1 * s,
                thickness: g.thickness * s,
                color: g.color,
            }),
            Mark::Dot(d) => Mark::Dot(Dot {
                cx: d.cx * s,
                cy: d.cy * s,
                r: d.r * s,
                color: d.color,
            }),
            Mark::Slice(p) => Mark::Slice(Slice {
                cx: p.cx * s,
                cy: p.cy * s,
                radius: p.radius * s,
                ..p.clone()
            }),
            Mark::Label(l) => Mark::Label(Label {
                x: l.x * s,
                y: l.y * s,
                scale: (l.scale as f64 * s).round().max(1.0) as u32,
                ..l.clone()
            }),
        }
    }
}

/// A mark plus whether it is chart furniture (axes, ticks, labels) rather
/// than data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub mark: Mark,
    #[serde(default)]
    pub auxiliary: bool,
}

impl Element {
    pub fn data(mark: Mark) -> Self {
        Element { mark, auxiliary: false }
    }

    pub fn aux(mark: Mark) -> Self {
        Element { mark, auxiliary: true }
    }
}

/// Exact geometry of a rendered (or extracted) chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySet {
    pub chart_type: ChartType,
    pub canvas_width: u32,
    pub canvas_height: u32,
    pub elements: Vec<Element>,
    pub plot_rect: PixelRect,
    /// Minimum pixel width and height over the data marks.
    pub element_extent: (u32, u32),
}

impl GeometrySet {
    pub fn new(chart_type: ChartType, canvas: (u32, u32), plot_rect: PixelRect, elements: Vec<Element>) -> Self {
        let mut set = GeometrySet {
            chart_type,
            canvas_width: canvas.0,
            canvas_height: canvas.1,
            elements,
            plot_rect,
            element_extent: (1, 1),
        };
        set.element_extent = set.compute_element_extent();
        set
    }

    pub fn data_marks(&self) -> impl Iterator<Item = &Mark> {
        self.elements.iter().filter(|e| !e.auxiliary).map(|e| &e.mark)
    }

    fn compute_element_extent(&self) -> (u32, u32) {
        let mut w = u32::MAX;
        let mut h = u32::MAX;
        for m in self.data_marks() {
            if let Some(b) = m.pixel_bounds(self.canvas_width, self.canvas_height) {
                w = w.min(b.w);
                h = h.min(b.h);
            }
        }
        if w == u32::MAX {
            (1, 1)
        } else {
            (w.max(1), h.max(1))
        }
    }

    /// Bar marks in left-to-right order.
    pub fn bars(&self) -> Vec<&BarRect> {
        let mut v: Vec<&BarRect> = self
            .data_marks()
            .filter_map(|m| match m {
                Mark::BarRect(b) => Some(b),
                _ => None,
            })
            .collect();
        v.sort_by(|a, b| a.x.total_cmp(&b.x));
        v
    }

    pub fn segments(&self) -> Vec<&Segment> {
        self.data_marks()
            .filter_map(|m| match m {
                Mark::Segment(s) => Some(s),
                _ => None,
            })
            .collect()
    }

    pub fn dots(&self) -> Vec<&Dot> {
        self.data_marks()
            .filter_map(|m| match m {
                Mark::Dot(d) => Some(d),
                _ => None,
            })
            .collect()
    }

    pub fn slices(&self) -> Vec<&Slice> {
        self.data_marks()
            .filter_map(|m| match m {
                Mark::Slice(s) => Some(s),
                _ => None,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("geometry serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tilt_conventions() {
        let s = |x1: f64, y1: f64| Segment {
            x0: 0.0,
            y0: 0.0,
            x1,
            y1,
            thickness: 1.0,
            color: Srgb::BLACK,
        };
        assert!((s(10.0, -10.0).tilt() - 45.0).abs() < 1e-12);
        assert!((s(10.0, 10.0).tilt() + 45.0).abs() < 1e-12);
        assert!((s(0.0, 5.0).tilt() - 90.0).abs() < 1e-12);
        assert!((s(-10.0, 10.0).tilt() - 45.0).abs() < 1e-12);
    }

    #[test]
    fn slice_coverage_is_clockwise_from_top() {
        let quarter = Mark::Slice(Slice {
            cx: 10.0,
            cy: 10.0,
            radius: 8.0,
            start_angle: 0.0,
            sweep_angle: 90.0,
            color: Srgb::BLACK,
        });
        assert!(quarter.covers(13, 6)); // upper right
        assert!(!quarter.covers(6, 6)); // upper left
        assert!(!quarter.covers(13, 13)); // lower right
        let (x0, y0, x1, y1) = quarter.extent();
        assert_eq!((x0, y0, x1, y1), (10.0, 2.0, 18.0, 10.0));
    }

    #[test]
    fn footprint_counts_bar_area() {
        let bar = Mark::BarRect(BarRect {
            x: 2.0,
            y: 3.0,
            w: 4.0,
            h: 5.0,
            color: Srgb::BLACK,
        });
        let (b, cov) = bar.footprint(20, 20).unwrap();
        assert_eq!(b, PixelRect::new(2, 3, 4, 5));
        assert!(cov.iter().all(|&c| c));
        assert!(bar.footprint(2, 2).is_none());
    }
}
