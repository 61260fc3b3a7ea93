//! Area-average (box filter) downsampling in linear light.

use super::planes::LinearPlanes;
use super::raster::RasterImage;
use crate::error::{Error, Result};

/// Output dimensions for a scale factor: `round(γ·dim)`, at least 1.
pub fn scaled_dims(width: u32, height: u32, gamma: f64) -> (u32, u32) {
    let s = |d: u32| ((d as f64 * gamma).round() as u32).max(1);
    (s(width), s(height))
}

// For each output index, the first contributing source index and the
// normalized overlap weights of the source span it covers.
fn axis_weights(src: usize, dst: usize) -> Vec<(usize, Vec<f64>)> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|o| {
            let lo = o as f64 * scale;
            let hi = ((o + 1) as f64 * scale).min(src as f64);
            let first = lo.floor() as usize;
            let last = (hi.ceil() as usize).min(src).max(first + 1);
            let weights = (first..last)
                .map(|s| {
                    let a = (s as f64).max(lo);
                    let b = ((s + 1) as f64).min(hi);
                    (b - a).max(0.0) / (hi - lo)
                })
                .collect();
            (first, weights)
        })
        .collect()
}

fn resample_plane(
    data: &[f64],
    (sw, sh): (usize, usize),
    (dw, dh): (usize, usize),
    wx: &[(usize, Vec<f64>)],
    wy: &[(usize, Vec<f64>)],
) -> Vec<f64> {
    let mut tmp = vec![0.0; dw * sh];
    for y in 0..sh {
        let row = &data[y * sw..(y + 1) * sw];
        for (x, (first, ws)) in wx.iter().enumerate() {
            tmp[y * dw + x] = ws.iter().zip(&row[*first..]).map(|(w, v)| w * v).sum();
        }
    }
    let mut out = vec![0.0; dw * dh];
    for (y, (first, ws)) in wy.iter().enumerate() {
        let dst = &mut out[y * dw..(y + 1) * dw];
        for (k, w) in ws.iter().enumerate() {
            let src = &tmp[(first + k) * dw..(first + k + 1) * dw];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += w * s;
            }
        }
    }
    out
}

/// Downsamples by `gamma ∈ (0, 1]`; `gamma = 1` is the identity.
pub fn resample(img: &RasterImage, gamma: f64) -> Result<RasterImage> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::param(format!("scale factor must lie in (0, 1], got {gamma}")));
    }
    let (dw, dh) = scaled_dims(img.width(), img.height(), gamma);
    resample_to(img, dw, dh)
}

/// Area-average resampling to explicit dimensions no larger than the source.
pub fn resample_to(img: &RasterImage, dw: u32, dh: u32) -> Result<RasterImage> {
    if dw == 0 || dh == 0 || dw > img.width() || dh > img.height() {
        return Err(Error::param(format!(
            "cannot box-resample {}x{} to {dw}x{dh}",
            img.width(),
            img.height()
        )));
    }
    if (dw, dh) == img.dims() {
        return Ok(img.clone());
    }
    let (sw, sh) = (img.width() as usize, img.height() as usize);
    let wx = axis_weights(sw, dw as usize);
    let wy = axis_weights(sh, dh as usize);
    let planes = LinearPlanes::from_image(img);
    let out = planes.map(|p| resample_plane(p, (sw, sh), (dw as usize, dh as usize), &wx, &wy));
    Ok(out.to_image(dw, dh, img.has_alpha()))
}

/// Downsamples one image by several factors, decoding it once. Each output
/// equals the corresponding [`resample`] result.
pub fn resample_many(img: &RasterImage, gammas: &[f64]) -> Result<Vec<RasterImage>> {
    if let Some(g) = gammas.iter().find(|g| !(**g > 0.0 && **g <= 1.0)) {
        return Err(Error::param(format!("scale factor must lie in (0, 1], got {g}")));
    }
    let (sw, sh) = (img.width() as usize, img.height() as usize);
    let mut planes = None;
    gammas
        .iter()
        .map(|&g| {
            let (dw, dh) = scaled_dims(img.width(), img.height(), g);
            if (dw, dh) == img.dims() {
                return Ok(img.clone());
            }
            let wx = axis_weights(sw, dw as usize);
            let wy = axis_weights(sh, dh as usize);
            let planes = planes.get_or_insert_with(|| LinearPlanes::from_image(img));
            let out = planes.map(|p| resample_plane(p, (sw, sh), (dw as usize, dh as usize), &wx, &wy));
            Ok(out.to_image(dw, dh, img.has_alpha()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imageops::color::{decode_u8, encode_linear};
    use proptest::prelude::*;

    #[test]
    fn identity_and_flat_average() {
        let mut img = RasterImage::filled(6, 4, [5, 6, 7, 255]).unwrap();
        img.put(1, 1, [200, 0, 9, 255]);
        assert_eq!(resample(&img, 1.0).unwrap(), img);

        let gray = RasterImage::filled(2, 2, [128, 128, 128, 255]).unwrap();
        let out = resample(&gray, 0.5).unwrap();
        assert_eq!(out.dims(), (1, 1));
        assert_eq!(out.get(0, 0), [128, 128, 128, 255]);
    }

    #[test]
    fn averages_in_linear_light() {
        let mut img = RasterImage::filled(2, 2, [0, 0, 0, 255]).unwrap();
        img.put(0, 1, [100, 100, 100, 255]);
        img.put(1, 1, [100, 100, 100, 255]);
        let out = resample(&img, 0.5).unwrap();
        // Hand computation: mean linear light = decode(100) / 2, re-encoded.
        let lin100 = ((100.0 / 255.0 + 0.055) / 1.055f64).powf(2.4);
        let v = lin100 / 2.0;
        let expected = (255.0 * (1.055 * v.powf(1.0 / 2.4) - 0.055)).round() as u8;
        assert_eq!(expected, 71);
        assert_eq!(out.get(0, 0)[0], expected);
        assert_eq!(encode_linear(decode_u8(100) / 2.0), expected);
    }

    #[test]
    fn rejects_bad_gamma_and_clamps_dims() {
        let img = RasterImage::filled(3, 3, [0, 0, 0, 255]).unwrap();
        assert!(resample(&img, 0.0).is_err());
        assert!(resample(&img, 1.5).is_err());
        assert!(resample(&img, f64::NAN).is_err());
        assert_eq!(resample(&img, 0.01).unwrap().dims(), (1, 1));
    }

    #[test]
    fn many_matches_single() {
        let img = smooth_image(37, 23, [[0, 50, 200], [255, 0, 0], [10, 240, 30], [90, 90, 90]]);
        let gammas = [1.0, 0.5, 0.13];
        let many = resample_many(&img, &gammas).unwrap();
        for (g, out) in gammas.iter().zip(&many) {
            assert_eq!(out, &resample(&img, *g).unwrap());
        }
        assert!(resample_many(&img, &[0.5, 0.0]).is_err());
    }

    #[test]
    fn weights_sum_to_one() {
        for (s, d) in [(10, 3), (7, 7), (100, 33), (5, 1)] {
            for (_, ws) in axis_weights(s, d) {
                assert!((ws.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    fn smooth_image(w: u32, h: u32, corners: [[u8; 3]; 4]) -> RasterImage {
        let mut img = RasterImage::filled(w, h, [0, 0, 0, 255]).unwrap();
        for y in 0..h {
            for x in 0..w {
                let u = x as f64 / (w - 1) as f64;
                let v = y as f64 / (h - 1) as f64;
                let mut px = [0u8; 4];
                px[3] = 255;
                for c in 0..3 {
                    let top = corners[0][c] as f64 * (1.0 - u) + corners[1][c] as f64 * u;
                    let bot = corners[2][c] as f64 * (1.0 - u) + corners[3][c] as f64 * u;
                    px[c] = (top * (1.0 - v) + bot * v).round() as u8;
                }
                img.put(x, y, px);
            }
        }
        img
    }

    #[test]
    fn integer_ratio_composition_on_arbitrary_content() {
        let mut img = RasterImage::filled(64, 48, [0, 0, 0, 255]).unwrap();
        let mut s = 7u32;
        for p in img.pixels_mut() {
            s = s.wrapping_mul(1103515245).wrapping_add(12345);
            *p = [(s >> 16) as u8, (s >> 8) as u8, (s >> 24) as u8, 255];
        }
        let two_step = resample(&resample(&img, 0.5).unwrap(), 0.5).unwrap();
        let direct = resample(&img, 0.25).unwrap();
        assert_eq!(two_step.dims(), direct.dims());
        for (a, b) in two_step.pixels().iter().zip(direct.pixels()) {
            for c in 0..3 {
                assert!((a[c] as i16 - b[c] as i16).abs() <= 2);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn composition_on_smooth_images(
            w in 40u32..120,
            h in 40u32..120,
            g1 in 0.35f64..1.0,
            g2 in 0.35f64..1.0,
            corners in prop::array::uniform4(prop::array::uniform3(any::<u8>())),
        ) {
            prop_assume!(g1 * g2 >= 0.1);
            let img = smooth_image(w, h, corners);
            let once = resample(&img, g1).unwrap();
            let (tw, th) = scaled_dims(w, h, g1 * g2);
            let (ow, oh) = once.dims();
            prop_assume!(tw <= ow && th <= oh);
            let two_step = resample_to(&once, tw, th).unwrap();
            let direct = resample_to(&img, tw, th).unwrap();
            for (a, b) in two_step.pixels().iter().zip(direct.pixels()) {
                for c in 0..3 {
                    prop_assert!((a[c] as i16 - b[c] as i16).abs() <= 2);
                }
            }
        }
    }
}
