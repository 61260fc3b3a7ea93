//! Circle Hough transform over foreground boundary pixels.
//!
//! Candidate centers sit on a half-pixel grid, so disks centered on pixel
//! centers or pixel corners are both represented exactly. An edge pixel
//! votes for every center whose distance to its center lies in
//! `(r - 1.5, r + 0.5]`, once per radius; the band is wide enough to hold
//! the whole boundary of a disk whose true radius is within half a pixel
//! of `r`.
//! A candidate's score is its vote count divided by the number of boundary
//! pixels of an ideal digital disk of the same radius, so a clean disk
//! scores about 1.

use serde::{Deserialize, Serialize};

use super::binarize::foreground_mask;
use crate::error::{Error, Result};
use crate::imageops::RasterImage;

/// Minimum foreground fraction inside a detected circle; rejects rings and
/// glyphs that happen to have a round outline.
pub const MIN_FILL: f64 = 0.9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DotDetection {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
    pub score: f64,
}

/// Foreground pixels with a 4-neighbor that is background or off-canvas.
pub fn edge_pixels(mask: &[bool], w: usize, h: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !mask[y * w + x] {
                continue;
            }
            let outside = x == 0
                || y == 0
                || x + 1 == w
                || y + 1 == h
                || !mask[y * w + x - 1]
                || !mask[y * w + x + 1]
                || !mask[(y - 1) * w + x]
                || !mask[(y + 1) * w + x];
            if outside {
                out.push((x, y));
            }
        }
    }
    out
}

/// Offsets in half-pixel units whose length lies in `(r - 1.5, r + 0.5]`
/// pixels.
pub(crate) fn ring_offsets(r: u32) -> Vec<(i32, i32)> {
    let r = 2 * r as i32 + 1;
    let (lo, hi) = (((r - 4).max(0) * (r - 4).max(0)) as i64, (r * r) as i64);
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            let d2 = (dx * dx + dy * dy) as i64;
            if d2 > lo && d2 <= hi {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Boundary pixel count of a digital disk of radius `r` centered on a pixel
/// center, using the renderer's pixel-center coverage rule.
pub(crate) fn ideal_perimeter(r: u32) -> usize {
    let side = 2 * r as usize + 3;
    let c = (r + 1) as f64 + 0.5;
    let mask: Vec<bool> = (0..side * side)
        .map(|i| {
            let (x, y) = ((i % side) as f64 + 0.5, (i / side) as f64 + 0.5);
            (x - c).powi(2) + (y - c).powi(2) <= (r * r) as f64
        })
        .collect();
    edge_pixels(&mask, side, side).len()
}

/// Fraction of pixels with centers inside the circle that are foreground.
fn fill_fraction(mask: &[bool], w: usize, h: usize, cx: f64, cy: f64, r: f64) -> f64 {
    let (x0, x1) = ((cx - r).floor().max(0.0) as usize, ((cx + r).ceil() as usize).min(w));
    let (y0, y1) = ((cy - r).floor().max(0.0) as usize, ((cy + r).ceil() as usize).min(h));
    let (mut inside, mut set) = (0usize, 0usize);
    for y in y0..y1 {
        for x in x0..x1 {
            if (x as f64 + 0.5 - cx).powi(2) + (y as f64 + 0.5 - cy).powi(2) <= r * r {
                inside += 1;
                set += mask[y * w + x] as usize;
            }
        }
    }
    if inside == 0 {
        0.0
    } else {
        set as f64 / inside as f64
    }
}

/// Detects filled disks: accumulator candidates at or above
/// `score_threshold`, strongest first, that are at least [`MIN_FILL`]
/// foreground inside and not within `r_min` of a stronger detection.
pub fn hough_circles_mask(
    mask: &[bool],
    w: usize,
    h: usize,
    r_min: u32,
    r_max: u32,
    score_threshold: f64,
) -> Result<Vec<DotDetection>> {
    if r_min < 1 || r_min > r_max || r_max as usize > w.min(h) / 2 {
        return Err(Error::param(format!(
            "radius range [{r_min}, {r_max}] must satisfy 1 <= r_min <= r_max <= {}",
            w.min(h) / 2
        )));
    }
    if mask.len() != w * h {
        return Err(Error::param("mask size does not match dimensions"));
    }
    let edges = edge_pixels(mask, w, h);
    if edges.is_empty() {
        return Ok(Vec::new());
    }
    let radii: Vec<u32> = (r_min..=r_max).collect();
    let mut candidates = Vec::new();
    for &r in &radii {
        let offsets = ring_offsets(r);
        let norm = ideal_perimeter(r) as f64;
        let (gw, gh) = (2 * w + 1, 2 * h + 1);
        let mut acc = vec![0u32; gw * gh];
        for &(x, y) in &edges {
            for &(dx, dy) in &offsets {
                let (cx, cy) = ((2 * x + 1) as i64 + dx as i64, (2 * y + 1) as i64 + dy as i64);
                if cx >= 0 && cy >= 0 && (cx as usize) < gw && (cy as usize) < gh {
                    acc[cy as usize * gw + cx as usize] += 1;
                }
            }
        }
        for (i, &v) in acc.iter().enumerate() {
            let score = v as f64 / norm;
            if score >= score_threshold {
                candidates.push((score, r, i));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
    let mut out: Vec<DotDetection> = Vec::new();
    for (score, r, i) in candidates {
        let (cx, cy) = ((i % (2 * w + 1)) as f64 / 2.0, (i / (2 * w + 1)) as f64 / 2.0);
        if out.iter().any(|d| (d.cx - cx).hypot(d.cy - cy) < r_min as f64) || fill_fraction(mask, w, h, cx, cy, r as f64) < MIN_FILL {
            continue;
        }
        out.push(DotDetection { cx, cy, r: r as f64, score });
    }
    Ok(out)
}

/// Detects filled disks in an image binarized against its dominant color.
pub fn hough_circles(img: &RasterImage, r_min: u32, r_max: u32, score_threshold: f64) -> Result<Vec<DotDetection>> {
    let mask = foreground_mask(img, None);
    hough_circles_mask(&mask, img.width() as usize, img.height() as usize, r_min, r_max, score_threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk_image(w: u32, h: u32, disks: &[(f64, f64, f64)]) -> RasterImage {
        let mut img = RasterImage::filled(w, h, [255, 255, 255, 255]).unwrap();
        for y in 0..h {
            for x in 0..w {
                let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
                if disks.iter().any(|&(cx, cy, r)| (px - cx).powi(2) + (py - cy).powi(2) <= r * r) {
                    img.put(x, y, [20, 20, 120, 255]);
                }
            }
        }
        img
    }

    #[test]
    fn ring_offsets_are_within_band() {
        for r in 1..15u32 {
            let offs = ring_offsets(r);
            assert!(!offs.is_empty());
            for (dx, dy) in offs {
                let d = ((dx * dx + dy * dy) as f64).sqrt() / 2.0;
                assert!(d > r as f64 - 1.5 && d <= r as f64 + 0.5);
            }
        }
    }

    #[test]
    fn blank_and_bad_ranges() {
        let img = RasterImage::filled(40, 40, [255, 255, 255, 255]).unwrap();
        assert!(hough_circles(&img, 3, 8, 0.5).unwrap().is_empty());
        assert!(hough_circles(&img, 0, 8, 0.5).is_err());
        assert!(hough_circles(&img, 9, 8, 0.5).is_err());
        assert!(hough_circles(&img, 3, 21, 0.5).is_err());
    }

    #[test]
    fn single_disk() {
        let img = disk_image(120, 120, &[(50.0, 60.0, 10.0)]);
        let d = hough_circles(&img, 5, 15, 0.5).unwrap();
        assert_eq!(d.len(), 1, "{d:?}");
        assert!((d[0].cx - 50.0).hypot(d[0].cy - 60.0) <= 1.0, "{d:?}");
        assert!((d[0].r - 10.0).abs() <= 2.0);
        assert!(d[0].score > 0.8, "{d:?}");
    }

    #[test]
    fn two_disks_match_one_to_one() {
        let truth = [(30.0, 40.0, 8.0), (90.0, 80.0, 12.0)];
        let img = disk_image(120, 120, &truth);
        let d = hough_circles(&img, 5, 15, 0.5).unwrap();
        assert_eq!(d.len(), 2, "{d:?}");
        for (cx, cy, r) in truth {
            let hits: Vec<_> = d.iter().filter(|x| (x.cx - cx).hypot(x.cy - cy) <= 2.0).collect();
            assert_eq!(hits.len(), 1);
            assert!((hits[0].r - r).abs() <= 2.0);
        }
    }
}
