//! Mark geometry from raster charts: Hough lines, Hough circles and
//! rectangle extraction, plus an image-input front end that turns a chart
//! image into a [`GeometrySet`].

mod bars;
mod binarize;
mod circles;
mod lines;

pub use bars::{components, extract_bars, trace_contour, Component, MIN_BAR_SIDE, MIN_FILL_RATIO};
pub use binarize::{dominant_color, foreground_mask, non_background_mask, otsu_threshold};
pub use circles::{edge_pixels, MIN_FILL, hough_circles, hough_circles_mask, DotDetection};
pub use lines::{hough_lines, hough_lines_mask, HoughParams, LineDetection, MAX_RUN_GAP, SUPPORT_TOLERANCE};

use serde::{Deserialize, Serialize};

use crate::chartgen::{ChartType, Dot, Element, GeometrySet, Mark, Segment, AXIS_OFFSET};
use crate::error::{Error, Result};
use crate::imageops::{PixelRect, RasterImage, Srgb};

/// Tunables for image-input extraction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractOptions {
    pub line_vote_threshold: u32,
    pub angle_step_deg: f64,
    pub rho_step_px: f64,
    pub dot_r_min: u32,
    pub dot_r_max: u32,
    pub dot_score_threshold: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            line_vote_threshold: 15,
            angle_step_deg: 1.0,
            rho_step_px: 1.0,
            dot_r_min: 3,
            dot_r_max: 20,
            dot_score_threshold: 0.8,
        }
    }
}

/// Longest run of identical non-background pixels along one row or column.
fn longest_run(img: &RasterImage, background: Srgb, fixed: u32, horizontal: bool) -> (u32, u32) {
    let len = if horizontal { img.width() } else { img.height() };
    let at = |i: u32| if horizontal { img.get(i, fixed) } else { img.get(fixed, i) };
    let (mut best, mut best_start) = (0u32, 0u32);
    let mut i = 0;
    while i < len {
        let p = at(i);
        if p[3] == 0 || [p[0], p[1], p[2]] == background.0 {
            i += 1;
            continue;
        }
        let start = i;
        while i < len && at(i) == p {
            i += 1;
        }
        if i - start > best {
            best = i - start;
            best_start = start;
        }
    }
    (best, best_start)
}

/// Locates the axes and returns the plot rectangle they frame, using the
/// renderer's convention of axes drawn [`AXIS_OFFSET`] pixels outside the
/// plot on the left and bottom. `None` when no axis pair is found.
pub fn estimate_plot_rect(img: &RasterImage, background: Srgb) -> Option<PixelRect> {
    let (w, h) = img.dims();
    let rows: Vec<(u32, u32)> = (0..h).map(|y| longest_run(img, background, y, true)).collect();
    let cols: Vec<(u32, u32)> = (0..w).map(|x| longest_run(img, background, x, false)).collect();
    let max_row = rows.iter().map(|r| r.0).max()?;
    let max_col = cols.iter().map(|c| c.0).max()?;
    if max_row < w / 4 || max_col < h / 4 {
        return None;
    }
    // The x axis is the lowest long row, the y axis the leftmost long column.
    let ya = (0..h).rev().find(|&y| rows[y as usize].0 * 10 >= max_row * 9)?;
    let xb = (0..w).find(|&x| cols[x as usize].0 * 10 >= max_col * 9)?;
    let (row_len, row_start) = rows[ya as usize];
    let (_, col_start) = cols[xb as usize];
    let off = AXIS_OFFSET as u32;
    let x = xb + 1 + off;
    let right = row_start + row_len;
    let bottom = ya.checked_sub(off)?;
    (right > x && bottom > col_start).then(|| PixelRect::new(x, col_start, right - x, bottom - col_start))
}

fn foreground_bounds(mask: &[bool], w: u32) -> Option<PixelRect> {
    let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0, 0);
    for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        let (x, y) = (i as u32 % w, i as u32 / w);
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    (x0 != u32::MAX).then(|| PixelRect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1))
}

fn mode_color(img: &RasterImage, pixels: impl Iterator<Item = (u32, u32)>) -> Srgb {
    let mut counts = std::collections::BTreeMap::<[u8; 3], usize>::new();
    for (x, y) in pixels {
        let p = img.get(x, y);
        *counts.entry([p[0], p[1], p[2]]).or_default() += 1;
    }
    Srgb(counts.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).map(|(c, _)| c).unwrap_or([0, 0, 0]))
}

/// Converts a detection to a stroke, estimating thickness and color from the
/// foreground pixels along it.
pub fn detection_to_segment(det: &LineDetection, img: &RasterImage, mask: &[bool]) -> Segment {
    let (mut x0, mut y0, mut x1, mut y1) = det.endpoints;
    if (x1, y1) < (x0, y0) {
        (x0, y0, x1, y1) = (x1, y1, x0, y0);
    }
    let probe = Segment { x0, y0, x1, y1, thickness: 1.0, color: Srgb::BLACK };
    let w = img.width();
    let near: Vec<(u32, u32)> = mask
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(i, _)| (i as u32 % w, i as u32 / w))
        .filter(|&(x, y)| probe.distance_to(x as f64, y as f64) <= SUPPORT_TOLERANCE)
        .collect();
    let thickness = (near.len() as f64 / det.length().max(1.0)).round().clamp(1.0, 9.0);
    let color = mode_color(img, near.into_iter());
    // Pixel indices to pixel-center coordinates.
    Segment { x0: x0 + 0.5, y0: y0 + 0.5, x1: x1 + 0.5, y1: y1 + 0.5, thickness, color }
}

/// Recovers data-mark geometry from a chart image. Only pixels inside the
/// axes are considered. Pie charts are not supported.
pub fn extract_geometry(img: &RasterImage, chart_type: ChartType, background: Srgb, opts: &ExtractOptions) -> Result<GeometrySet> {
    if chart_type == ChartType::Pie {
        return Err(Error::Extraction("pie charts cannot be extracted from images; provide a chart spec".into()));
    }
    let (w, h) = img.dims();
    let all = non_background_mask(img, background);
    let axes = estimate_plot_rect(img, background);
    let plot = match axes.or_else(|| foreground_bounds(&all, w)) {
        Some(p) => p,
        None => return Err(Error::Extraction("image has no foreground".into())),
    };
    // Strictly inside the axis lines when they were found.
    let (min_x, max_y) = match axes {
        Some(p) => (p.x - AXIS_OFFSET as u32, p.bottom() + AXIS_OFFSET as u32),
        None => (0, h),
    };
    let inside = |i: usize| {
        let (x, y) = (i as u32 % w, i as u32 / w);
        x >= min_x && y < max_y
    };
    let marks: Vec<Mark> = match chart_type {
        ChartType::Line => {
            let mask: Vec<bool> = foreground_mask(img, Some(background)).into_iter().enumerate().map(|(i, m)| m && inside(i)).collect();
            let params = HoughParams {
                vote_threshold: opts.line_vote_threshold,
                angle_step: opts.angle_step_deg,
                rho_step: opts.rho_step_px,
            };
            let mut segs: Vec<Segment> = hough_lines_mask(&mask, w as usize, h as usize, &params)?
                .iter()
                .map(|d| detection_to_segment(d, img, &mask))
                .collect();
            segs.sort_by(|a, b| a.x0.total_cmp(&b.x0).then(a.y0.total_cmp(&b.y0)));
            segs.into_iter().map(Mark::Segment).collect()
        }
        ChartType::Scatter => {
            let mask: Vec<bool> = foreground_mask(img, Some(background)).into_iter().enumerate().map(|(i, m)| m && inside(i)).collect();
            let r_max = opts.dot_r_max.min(w.min(h) / 2);
            let dets = hough_circles_mask(&mask, w as usize, h as usize, opts.dot_r_min.min(r_max), r_max, opts.dot_score_threshold)?;
            let mut dots: Vec<Dot> = dets
                .iter()
                .map(|d| {
                    let r2 = d.r * d.r;
                    let px = (0..w * h).filter(|&i| mask[i as usize]).map(|i| (i % w, i / w)).filter(|&(x, y)| {
                        (x as f64 + 0.5 - d.cx).powi(2) + (y as f64 + 0.5 - d.cy).powi(2) <= r2
                    });
                    Dot { cx: d.cx, cy: d.cy, r: d.r, color: mode_color(img, px) }
                })
                .collect();
            dots.sort_by(|a, b| a.cx.total_cmp(&b.cx).then(a.cy.total_cmp(&b.cy)));
            dots.into_iter().map(Mark::Dot).collect()
        }
        ChartType::Bar => extract_bars(img, background)
            .into_iter()
            .filter(|m| {
                let (x0, _, _, y1) = m.extent();
                x0 >= min_x as f64 && y1 <= max_y as f64
            })
            .collect(),
        ChartType::Pie => unreachable!(),
    };
    if marks.is_empty() {
        return Err(Error::Extraction(format!("no {chart_type} marks found in image")));
    }
    Ok(GeometrySet::new(chart_type, (w, h), plot, marks.into_iter().map(Element::data).collect()))
}
