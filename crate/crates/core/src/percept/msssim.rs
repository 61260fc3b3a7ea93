//! Multi-scale structural similarity on luma.

use super::manifest::{MetricManifest, MsSsimConfig};
use super::opaque_rgb;
use crate::error::{Error, Result};
use crate::imageops::{gaussian_taps_sigma, RasterImage};

/// Rec.601 luma of 8-bit codes, in [0, 255].
pub(crate) fn luma_plane(img: &RasterImage) -> Vec<f64> {
    opaque_rgb(img)
        .iter()
        .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
        .collect()
}

/// Number of scales used for a given smaller side.
pub fn scale_count(min_side: u32, window: u32, max_scales: usize) -> usize {
    if min_side < window {
        return 0;
    }
    let levels = ((min_side as f64 / window as f64).log2().floor() as usize) + 1;
    levels.min(max_scales)
}

/// Valid-mode separable correlation.
fn filter_valid(data: &[f64], w: usize, h: usize, taps: &[f64]) -> (Vec<f64>, usize, usize) {
    let k = taps.len();
    let (ow, oh) = (w + 1 - k, h + 1 - k);
    let mut tmp = vec![0.0; ow * h];
    for y in 0..h {
        let row = &data[y * w..(y + 1) * w];
        for x in 0..ow {
            tmp[y * ow + x] = taps.iter().zip(&row[x..x + k]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        let dst = &mut out[y * ow..(y + 1) * ow];
        for (t, &wt) in taps.iter().enumerate() {
            let src = &tmp[(y + t) * ow..(y + t + 1) * ow];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += wt * s;
            }
        }
    }
    (out, ow, oh)
}

fn downsample2(data: &[f64], w: usize, h: usize) -> (Vec<f64>, usize, usize) {
    let (ow, oh) = (w / 2, h / 2);
    let mut out = Vec::with_capacity(ow * oh);
    for y in 0..oh {
        let (r0, r1) = (&data[2 * y * w..], &data[(2 * y + 1) * w..]);
        for x in 0..ow {
            out.push(((r0[2 * x] + r0[2 * x + 1]) + (r1[2 * x] + r1[2 * x + 1])) * 0.25);
        }
    }
    (out, ow, oh)
}

/// Per-scale statistics of one image.
#[derive(Clone, Debug)]
struct ScaleStats {
    w: usize,
    h: usize,
    plane: Vec<f64>,
    mu: Vec<f64>,
    var: Vec<f64>,
}

/// One image's pyramid and local statistics, reusable across comparisons.
#[derive(Clone, Debug)]
pub struct MsSsimPrepared {
    width: u32,
    height: u32,
    scales: Vec<ScaleStats>,
}

/// MS-SSIM evaluator bound to a set of constants.
#[derive(Clone, Debug)]
pub struct MsSsim {
    cfg: MsSsimConfig,
    taps: Vec<f64>,
}

impl Default for MsSsim {
    fn default() -> Self {
        MsSsim::new(&MetricManifest::builtin().ms_ssim)
    }
}

impl MsSsim {
    pub fn new(cfg: &MsSsimConfig) -> Self {
        MsSsim { cfg: cfg.clone(), taps: gaussian_taps_sigma(cfg.window_size, cfg.window_sigma) }
    }

    pub fn prepare(&self, img: &RasterImage) -> Result<MsSsimPrepared> {
        let n = scale_count(img.width().min(img.height()), self.cfg.window_size, self.cfg.scale_weights.len());
        if n == 0 {
            return Err(Error::param(format!(
                "MS-SSIM needs images of at least {0}x{0}, got {1}x{2}",
                self.cfg.window_size,
                img.width(),
                img.height()
            )));
        }
        let (mut plane, mut w, mut h) = (luma_plane(img), img.width() as usize, img.height() as usize);
        let mut scales = Vec::with_capacity(n);
        for s in 0..n {
            if s > 0 {
                (plane, w, h) = downsample2(&plane, w, h);
            }
            let (mu, _, _) = filter_valid(&plane, w, h, &self.taps);
            let sq: Vec<f64> = plane.iter().map(|v| v * v).collect();
            let (ex2, _, _) = filter_valid(&sq, w, h, &self.taps);
            let var = ex2.iter().zip(&mu).map(|(e, m)| e - m * m).collect();
            scales.push(ScaleStats { w, h, plane: plane.clone(), mu, var });
        }
        Ok(MsSsimPrepared { width: img.width(), height: img.height(), scales })
    }

    pub fn compare_prepared(&self, a: &MsSsimPrepared, b: &MsSsimPrepared) -> Result<f64> {
        if (a.width, a.height) != (b.width, b.height) {
            return Err(Error::DimensionMismatch {
                left_w: a.width,
                left_h: a.height,
                right_w: b.width,
                right_h: b.height,
            });
        }
        let n = a.scales.len();
        let weights = &self.cfg.scale_weights[..n];
        let total: f64 = weights.iter().sum();
        let (c1, c2) = (self.cfg.c1(), self.cfg.c2());
        let mut value = 1.0;
        for (s, (sa, sb)) in a.scales.iter().zip(&b.scales).enumerate() {
            let prod: Vec<f64> = sa.plane.iter().zip(&sb.plane).map(|(x, y)| x * y).collect();
            let (exy, _, _) = filter_valid(&prod, sa.w, sa.h, &self.taps);
            let count = exy.len() as f64;
            let mut cs_sum = 0.0;
            let mut l_sum = 0.0;
            for i in 0..exy.len() {
                let (ma, mb) = (sa.mu[i], sb.mu[i]);
                let cov = exy[i] - ma * mb;
                cs_sum += (2.0 * cov + c2) / (sa.var[i] + sb.var[i] + c2);
                if s + 1 == n {
                    l_sum += (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
                }
            }
            let w = weights[s] / total;
            value *= (cs_sum / count).max(0.0).powf(w);
            if s + 1 == n {
                value *= (l_sum / count).max(0.0).powf(w);
            }
        }
        Ok(value.clamp(0.0, 1.0))
    }

    /// Compares a prepared image against a raw one.
    pub fn compare_with(&self, a: &MsSsimPrepared, b: &RasterImage) -> Result<f64> {
        self.compare_prepared(a, &self.prepare(b)?)
    }

    pub fn compare(&self, a: &RasterImage, b: &RasterImage) -> Result<f64> {
        a.same_dims(b)?;
        self.compare_prepared(&self.prepare(a)?, &self.prepare(b)?)
    }
}

/// MS-SSIM with the built-in constants.
pub fn ms_ssim(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    MsSsim::default().compare(a, b)
}
