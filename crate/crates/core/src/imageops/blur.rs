//! Separable Gaussian low-pass filtering.

use super::planes::LinearPlanes;
use super::raster::RasterImage;
use crate::error::{Error, Result};

/// Standard deviation used for an odd kernel size `k ≥ 3`:
/// `0.3 * ((k - 1) / 2 - 1) + 0.8`.
pub fn sigma_for_kernel(k: u32) -> f64 {
    0.3 * ((k as f64 - 1.0) / 2.0 - 1.0) + 0.8
}

/// Normalized 1-D Gaussian taps of length `k`.
pub fn gaussian_taps(k: u32) -> Vec<f64> {
    if k <= 1 {
        return vec![1.0];
    }
    gaussian_taps_sigma(k, sigma_for_kernel(k))
}

pub(crate) fn gaussian_taps_sigma(k: u32, sigma: f64) -> Vec<f64> {
    let radius = (k / 2) as i64;
    let denom = 2.0 * sigma * sigma;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / denom).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Convolves a single plane with `taps` horizontally then vertically,
/// clamping coordinates at the borders.
pub fn blur_plane(data: &[f64], width: usize, height: usize, taps: &[f64]) -> Vec<f64> {
    let radius = (taps.len() / 2) as isize;
    let mut tmp = vec![0.0; data.len()];
    let (w, h) = (width as isize, height as isize);
    for y in 0..height {
        let row = &data[y * width..(y + 1) * width];
        let out = &mut tmp[y * width..(y + 1) * width];
        for x in 0..w {
            let mut acc = 0.0;
            for (t, &wt) in taps.iter().enumerate() {
                let sx = (x + t as isize - radius).clamp(0, w - 1);
                acc += wt * row[sx as usize];
            }
            out[x as usize] = acc;
        }
    }
    let mut out = vec![0.0; data.len()];
    for y in 0..h {
        let dst = &mut out[y as usize * width..(y as usize + 1) * width];
        for (t, &wt) in taps.iter().enumerate() {
            let sy = (y + t as isize - radius).clamp(0, h - 1) as usize;
            let src = &tmp[sy * width..(sy + 1) * width];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += wt * s;
            }
        }
    }
    out
}

fn check_kernel(img: &RasterImage, k: u32) -> Result<()> {
    let limit = img.width().min(img.height());
    if k % 2 == 0 || k < 1 || k > limit {
        return Err(Error::param(format!(
            "kernel size must be odd and within [1, {limit}], got {k}"
        )));
    }
    Ok(())
}

/// Gaussian blur in premultiplied linear light with clamp-to-edge borders.
/// `k = 1` returns the input unchanged.
pub fn gaussian_blur(img: &RasterImage, k: u32) -> Result<RasterImage> {
    check_kernel(img, k)?;
    if k == 1 {
        return Ok(img.clone());
    }
    let taps = gaussian_taps(k);
    let planes = LinearPlanes::from_image(img);
    let (w, h) = (img.width() as usize, img.height() as usize);
    let blurred = planes.map(|p| blur_plane(p, w, h, &taps));
    Ok(blurred.to_image(img.width(), img.height(), img.has_alpha()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal_taps(k: u32, sigma: f64) -> Vec<f64> {
        // Independent evaluation of exp(-x²/2σ²) normalized over the support.
        let r = (k / 2) as i32;
        let raw: Vec<f64> = (-r..=r)
            .map(|x| (-(x as f64).powi(2) / (2.0 * sigma.powi(2))).exp())
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    }

    #[test]
    fn sigma_convention() {
        assert!((sigma_for_kernel(3) - 0.8).abs() < 1e-15);
        assert!((sigma_for_kernel(5) - 1.1).abs() < 1e-12);
        assert!((sigma_for_kernel(21) - 3.5).abs() < 1e-12);
    }

    #[test]
    fn impulse_response_is_outer_product_of_taps() {
        let (w, h) = (21, 21);
        let mut plane = vec![0.0; w * h];
        plane[10 * w + 10] = 1.0;
        let out = blur_plane(&plane, w, h, &gaussian_taps(3));
        let g = normal_taps(3, 0.8);
        assert!((out[10 * w + 10] - g[1] * g[1]).abs() < 1e-15);
        assert!((out[9 * w + 10] - g[0] * g[1]).abs() < 1e-15);
        assert!((out[9 * w + 9] - g[0] * g[0]).abs() < 1e-15);
        assert_eq!(out[8 * w + 10], 0.0);
        let total: f64 = out.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_kernel_and_constant_images() {
        let mut img = RasterImage::filled(9, 7, [120, 30, 200, 255]).unwrap();
        img.put(3, 3, [0, 0, 0, 255]);
        assert_eq!(gaussian_blur(&img, 1).unwrap(), img);

        let flat = RasterImage::filled(12, 10, [77, 140, 9, 255]).unwrap();
        for k in [3, 5, 7, 9] {
            assert_eq!(gaussian_blur(&flat, k).unwrap(), flat);
        }
        let translucent = RasterImage::filled(12, 10, [77, 140, 9, 100]).unwrap();
        assert_eq!(gaussian_blur(&translucent, 5).unwrap(), translucent);
    }

    #[test]
    fn rejects_bad_kernels() {
        let img = RasterImage::filled(8, 6, [0, 0, 0, 255]).unwrap();
        assert!(gaussian_blur(&img, 4).is_err());
        assert!(gaussian_blur(&img, 0).is_err());
        assert!(gaussian_blur(&img, 7).is_err());
        assert!(gaussian_blur(&img, 5).is_ok());
    }

    #[test]
    fn preserves_mean_with_constant_border() {
        let (w, h) = (40, 30);
        let k = 9;
        let r = 4;
        let mut plane = vec![0.25; w * h];
        let mut state = 12345u64;
        for y in r..h - r {
            for x in r..w - r {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                plane[y * w + x] = (state >> 33) as f64 / (1u64 << 31) as f64;
            }
        }
        // The interior must sit at least one radius inside the border so the
        // clamped halo sees only the constant value.
        let mut padded = vec![0.25; w * h];
        for y in 2 * r..h - 2 * r {
            for x in 2 * r..w - 2 * r {
                padded[y * w + x] = plane[y * w + x];
            }
        }
        let out = blur_plane(&padded, w, h, &gaussian_taps(k as u32));
        let before: f64 = padded.iter().sum::<f64>() / padded.len() as f64;
        let after: f64 = out.iter().sum::<f64>() / out.len() as f64;
        assert!(((after - before) / before).abs() < 1e-6, "{before} vs {after}");
    }
}
