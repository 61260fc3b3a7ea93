//! Rectangle extraction by border following.

use super::binarize::non_background_mask;
use crate::chartgen::{BarRect, Mark};
use crate::imageops::{PixelRect, RasterImage, Srgb};

/// Minimum ratio of component pixels to bounding-box area for a bar.
pub const MIN_FILL_RATIO: f64 = 0.95;
/// Minimum bar side in pixels; thinner solid runs are strokes or glyphs.
pub const MIN_BAR_SIDE: u32 = 3;

/// A 4-connected component of foreground pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub bounds: PixelRect,
    /// Pixel indices (row-major over the image) in scan order.
    pub pixels: Vec<usize>,
    /// Outer contour from Moore-neighbor tracing, clockwise from the
    /// top-left pixel.
    pub contour: Vec<(u32, u32)>,
}

impl Component {
    pub fn fill_ratio(&self) -> f64 {
        self.pixels.len() as f64 / self.bounds.area() as f64
    }
}

// Clockwise Moore neighborhood starting west, in y-down coordinates.
const MOORE: [(i32, i32); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

/// Moore-neighbor tracing from `start`, the first pixel of its component in
/// scan order. Stops on returning to `start` with the entry direction repeated.
pub fn trace_contour(mask: &[bool], w: usize, h: usize, start: (u32, u32)) -> Vec<(u32, u32)> {
    let inside = |x: i32, y: i32| x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && mask[y as usize * w + x as usize];
    let mut contour = vec![start];
    let (mut cx, mut cy) = (start.0 as i32, start.1 as i32);
    // The scan reached `start` from the west, which is background.
    let mut backtrack = 0usize;
    let mut first_move: Option<(i32, i32)> = None;
    loop {
        let mut moved = false;
        for k in 1..=8 {
            let dir = (backtrack + k) % 8;
            let (nx, ny) = (cx + MOORE[dir].0, cy + MOORE[dir].1);
            if inside(nx, ny) {
                // The previous neighbor checked is background; it becomes the
                // new backtrack point, expressed relative to the new pixel.
                let prev = (backtrack + k - 1) % 8;
                let (bx, by) = (cx + MOORE[prev].0 - nx, cy + MOORE[prev].1 - ny);
                backtrack = MOORE.iter().position(|&d| d == (bx, by)).unwrap_or(0);
                if (cx, cy) == (start.0 as i32, start.1 as i32) {
                    match first_move {
                        None => first_move = Some((nx, ny)),
                        Some(m) if m == (nx, ny) => return contour,
                        _ => {}
                    }
                }
                cx = nx;
                cy = ny;
                moved = true;
                break;
            }
        }
        if !moved {
            return contour;
        }
        if (cx, cy) == (start.0 as i32, start.1 as i32) {
            // Revisit: the loop closes when the next move repeats the first.
            continue;
        }
        contour.push((cx as u32, cy as u32));
        if contour.len() > 4 * w * h {
            return contour;
        }
    }
}

/// 4-connected components of `mask` in scan order of their first pixel.
pub fn components(mask: &[bool], w: usize, h: usize) -> Vec<Component> {
    let mut label = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask[start] || label[start] {
            continue;
        }
        label[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        while let Some(i) = stack.pop() {
            pixels.push(i);
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if mask[j] && !label[j] {
                    label[j] = true;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        pixels.sort_unstable();
        let contour = trace_contour(mask, w, h, ((start % w) as u32, (start / w) as u32));
        let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0, 0);
        for &(x, y) in &contour {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        out.push(Component { bounds: PixelRect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1), pixels, contour });
    }
    out
}

fn mode_color(img: &RasterImage, pixels: &[usize]) -> Srgb {
    let mut counts = std::collections::BTreeMap::<[u8; 3], usize>::new();
    for &i in pixels {
        let p = img.pixels()[i];
        *counts.entry([p[0], p[1], p[2]]).or_default() += 1;
    }
    let best = counts.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).map(|(c, _)| c);
    Srgb(best.unwrap_or([0, 0, 0]))
}

/// Axis-aligned filled rectangles, sorted by x.
pub fn extract_bars(img: &RasterImage, background: Srgb) -> Vec<Mark> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mask = non_background_mask(img, background);
    let mut bars: Vec<BarRect> = components(&mask, w, h)
        .into_iter()
        .filter(|c| c.bounds.w >= MIN_BAR_SIDE && c.bounds.h >= MIN_BAR_SIDE && c.fill_ratio() >= MIN_FILL_RATIO)
        .map(|c| BarRect {
            x: c.bounds.x as f64,
            y: c.bounds.y as f64,
            w: c.bounds.w as f64,
            h: c.bounds.h as f64,
            color: mode_color(img, &c.pixels),
        })
        .collect();
    bars.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    bars.into_iter().map(Mark::BarRect).collect()
}
