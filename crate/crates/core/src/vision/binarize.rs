use crate::imageops::{RasterImage, Srgb};

fn luma(p: [u8; 3]) -> f64 {
    0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64
}

/// The most frequent opaque color, ties broken by the smaller value.
pub fn dominant_color(img: &RasterImage) -> Srgb {
    let mut counts = std::collections::HashMap::<[u8; 3], usize>::new();
    for p in img.pixels() {
        *counts.entry([p[0], p[1], p[2]]).or_default() += 1;
    }
    let best = counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(c, _)| c)
        .unwrap_or([255, 255, 255]);
    Srgb(best)
}

/// Otsu threshold over a 256-bin histogram: the largest `t` class boundary
/// (class 0 is `<= t`) maximizing between-class variance, first on ties.
pub fn otsu_threshold(hist: &[u64; 256]) -> u8 {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return 0;
    }
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();
    let (mut w0, mut sum0) = (0u64, 0.0);
    let (mut best_t, mut best_var) = (0u8, -1.0);
    for t in 0..256 {
        w0 += hist[t];
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let m0 = sum0 / w0 as f64;
        let m1 = (sum_all - sum0) / w1 as f64;
        let var = w0 as f64 * w1 as f64 * (m0 - m1) * (m0 - m1);
        if var > best_var {
            best_var = var;
            best_t = t as u8;
        }
    }
    best_t
}

/// Foreground mask: pixels whose luma differs from the background's by
/// more than the Otsu threshold of that difference. Transparent pixels are
/// background.
pub fn foreground_mask(img: &RasterImage, background: Option<Srgb>) -> Vec<bool> {
    let bg = background.unwrap_or_else(|| dominant_color(img));
    let bg_luma = luma(bg.0);
    let diffs: Vec<u8> = img
        .pixels()
        .iter()
        .map(|p| if p[3] == 0 { 0 } else { (luma([p[0], p[1], p[2]]) - bg_luma).abs().round().min(255.0) as u8 })
        .collect();
    let mut hist = [0u64; 256];
    for &d in &diffs {
        hist[d as usize] += 1;
    }
    if hist[0] == diffs.len() as u64 {
        return vec![false; diffs.len()];
    }
    let t = otsu_threshold(&hist);
    diffs.iter().map(|&d| d > t).collect()
}

/// Pixels that differ from `background` at all.
pub fn non_background_mask(img: &RasterImage, background: Srgb) -> Vec<bool> {
    img.pixels()
        .iter()
        .map(|p| p[3] != 0 && [p[0], p[1], p[2]] != background.0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn otsu_splits_two_modes() {
        let mut h = [0u64; 256];
        h[10] = 500;
        h[200] = 100;
        let t = otsu_threshold(&h);
        assert!((10..200).contains(&t));
        assert_eq!(otsu_threshold(&[0; 256]), 0);
    }

    #[test]
    fn mask_of_dark_mark_on_white() {
        let mut img = RasterImage::filled(10, 10, [255, 255, 255, 255]).unwrap();
        img.put(3, 4, [0, 0, 0, 255]);
        img.put(5, 5, [240, 240, 240, 255]);
        let m = foreground_mask(&img, None);
        assert!(m[4 * 10 + 3]);
        assert_eq!(m.iter().filter(|&&v| v).count(), 1 + m[5 * 10 + 5] as usize);
        let blank = RasterImage::filled(10, 10, [255, 255, 255, 255]).unwrap();
        assert!(foreground_mask(&blank, None).iter().all(|v| !v));
    }
}
