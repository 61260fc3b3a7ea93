//! Saliency-weighted similarity index.

use super::manifest::{MetricManifest, VsiConfig};
use super::opaque_rgb;
use super::saliency::{resize_area, saliency_map};
use crate::error::{Error, Result};
use crate::imageops::RasterImage;

/// Per-image feature maps used by [`Vsi`].
#[derive(Clone, Debug)]
pub struct VsiPrepared {
    width: u32,
    height: u32,
    map_w: usize,
    map_h: usize,
    saliency: Vec<f64>,
    gradient: Vec<f64>,
    m: Vec<f64>,
    n: Vec<f64>,
}

impl VsiPrepared {
    pub fn saliency(&self) -> &[f64] {
        &self.saliency
    }

    /// Size of the feature maps after the metric's own downsampling.
    pub fn map_dims(&self) -> (usize, usize) {
        (self.map_w, self.map_h)
    }
}

#[derive(Clone, Debug)]
pub struct Vsi {
    cfg: VsiConfig,
}

impl Default for Vsi {
    fn default() -> Self {
        Vsi::new(&MetricManifest::builtin().vsi)
    }
}

fn scharr(l: &[f64], w: usize, h: usize) -> Vec<f64> {
    let at = |x: isize, y: isize| -> f64 {
        let xx = x.clamp(0, w as isize - 1) as usize;
        let yy = y.clamp(0, h as isize - 1) as usize;
        l[yy * w + xx]
    };
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = (3.0 * (at(x - 1, y - 1) - at(x + 1, y - 1))
                + 10.0 * (at(x - 1, y) - at(x + 1, y))
                + 3.0 * (at(x - 1, y + 1) - at(x + 1, y + 1)))
                / 16.0;
            let gy = (3.0 * (at(x - 1, y - 1) - at(x - 1, y + 1))
                + 10.0 * (at(x, y - 1) - at(x, y + 1))
                + 3.0 * (at(x + 1, y - 1) - at(x + 1, y + 1)))
                / 16.0;
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

#[inline]
fn ratio(a: f64, b: f64, c: f64) -> f64 {
    (2.0 * a * b + c) / (a * a + b * b + c)
}

impl Vsi {
    pub fn new(cfg: &VsiConfig) -> Self {
        Vsi { cfg: cfg.clone() }
    }

    pub fn prepare(&self, img: &RasterImage) -> Result<VsiPrepared> {
        let (w, h) = (img.width() as usize, img.height() as usize);
        let min_side = self.cfg.min_side as usize;
        if w.min(h) < min_side {
            return Err(Error::param(format!(
                "VSI needs images of at least {min_side}x{min_side}, got {w}x{h}"
            )));
        }
        let mut channels = [Vec::with_capacity(w * h), Vec::with_capacity(w * h), Vec::with_capacity(w * h)];
        for p in opaque_rgb(img).iter() {
            let (r, g, b) = (p[0] as f64, p[1] as f64, p[2] as f64);
            channels[0].push(0.06 * r + 0.63 * g + 0.27 * b);
            channels[1].push(0.30 * r + 0.04 * g - 0.35 * b);
            channels[2].push(0.34 * r - 0.60 * g + 0.17 * b);
        }
        let f = ((w.min(h) as f64 / self.cfg.downsample_base as f64).round() as usize).max(1);
        let (dw, dh) = (w / f, h / f);
        let [l, m, n] = if f > 1 { channels.map(|c| resize_area(&c, w, h, dw, dh)) } else { channels };
        let saliency = saliency_map(&l, dw, dh, &self.cfg.saliency);
        let gradient = scharr(&l, dw, dh);
        Ok(VsiPrepared { width: img.width(), height: img.height(), map_w: dw, map_h: dh, saliency, gradient, m, n })
    }

    pub fn compare_prepared(&self, a: &VsiPrepared, b: &VsiPrepared) -> Result<f64> {
        if (a.width, a.height) != (b.width, b.height) {
            return Err(Error::DimensionMismatch {
                left_w: a.width,
                left_h: a.height,
                right_w: b.width,
                right_h: b.height,
            });
        }
        let c = &self.cfg;
        let cos_beta = (std::f64::consts::PI * c.beta).cos();
        let mut num = 0.0;
        let mut den = 0.0;
        let mut plain = 0.0;
        for i in 0..a.saliency.len() {
            let s_vs = ratio(a.saliency[i], b.saliency[i], c.c1);
            let s_g = ratio(a.gradient[i], b.gradient[i], c.c2);
            let s_c = ratio(a.m[i], b.m[i], c.c3) * ratio(a.n[i], b.n[i], c.c3);
            // Real part of the principal power for a negative base.
            let s_c_pow = if s_c >= 0.0 { s_c.powf(c.beta) } else { (-s_c).powf(c.beta) * cos_beta };
            let s = s_vs * s_g.powf(c.alpha) * s_c_pow;
            let weight = a.saliency[i].max(b.saliency[i]);
            num += s * weight;
            den += weight;
            plain += s;
        }
        if den < 1e-12 {
            return Ok(plain / a.saliency.len() as f64);
        }
        Ok(num / den)
    }

    pub fn compare_with(&self, a: &VsiPrepared, b: &RasterImage) -> Result<f64> {
        self.compare_prepared(a, &self.prepare(b)?)
    }

    pub fn compare(&self, a: &RasterImage, b: &RasterImage) -> Result<f64> {
        a.same_dims(b)?;
        self.compare_prepared(&self.prepare(a)?, &self.prepare(b)?)
    }
}

/// VSI with the built-in constants.
pub fn vsi(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    Vsi::default().compare(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_images() {
        let a = RasterImage::filled(40, 40, [10, 200, 30, 255]).unwrap();
        let b = RasterImage::filled(40, 40, [200, 20, 30, 255]).unwrap();
        assert_eq!(vsi(&a, &a).unwrap(), 1.0);
        let v = vsi(&a, &b).unwrap();
        assert!(v < 1.0 && v > 0.0, "{v}");
    }

    #[test]
    fn size_checks() {
        let a = RasterImage::filled(31, 64, [0, 0, 0, 255]).unwrap();
        assert!(vsi(&a, &a).is_err());
        let b = RasterImage::filled(64, 64, [0, 0, 0, 255]).unwrap();
        let c = RasterImage::filled(64, 65, [0, 0, 0, 255]).unwrap();
        assert!(matches!(vsi(&b, &c), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn large_images_are_downsampled_first() {
        let a = RasterImage::filled(600, 520, [90, 90, 90, 255]).unwrap();
        let p = Vsi::default().prepare(&a).unwrap();
        assert_eq!(p.map_dims(), (300, 260));
    }
}
