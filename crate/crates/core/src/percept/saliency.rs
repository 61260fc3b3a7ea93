//! Spectral-residual saliency on a small periodic working grid.
//!
//! All filtering on the working grid wraps around, matching the periodic
//! assumption of the FFT, so shifting the input by a whole number of
//! working cells shifts the map by the same amount.

use std::cell::RefCell;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::manifest::SaliencyConfig;
use crate::imageops::gaussian_taps_sigma;

/// Area-averaging resize of a scalar plane.
pub(crate) fn resize_area(data: &[f64], w: usize, h: usize, dw: usize, dh: usize) -> Vec<f64> {
    let xw = area_weights(w, dw);
    let yw = area_weights(h, dh);
    let mut tmp = vec![0.0; dw * h];
    for y in 0..h {
        let row = &data[y * w..(y + 1) * w];
        for (dx, taps) in xw.iter().enumerate() {
            tmp[y * dw + dx] = taps.iter().map(|&(i, wt)| wt * row[i]).sum();
        }
    }
    let mut out = vec![0.0; dw * dh];
    for (dy, taps) in yw.iter().enumerate() {
        for &(i, wt) in taps {
            let src = &tmp[i * dw..(i + 1) * dw];
            for (o, s) in out[dy * dw..(dy + 1) * dw].iter_mut().zip(src) {
                *o += wt * s;
            }
        }
    }
    out
}

fn area_weights(src: usize, dst: usize) -> Vec<Vec<(usize, f64)>> {
    let ratio = src as f64 / dst as f64;
    (0..dst)
        .map(|d| {
            let (lo, hi) = (d as f64 * ratio, (d + 1) as f64 * ratio);
            let mut taps = Vec::new();
            let mut i = lo.floor() as usize;
            while (i as f64) < hi && i < src {
                let overlap = (hi.min(i as f64 + 1.0) - lo.max(i as f64)).max(0.0);
                if overlap > 0.0 {
                    taps.push((i, overlap / ratio));
                }
                i += 1;
            }
            taps
        })
        .collect()
}

fn fft2(data: &mut [Complex64], n: usize, inverse: bool) {
    thread_local! {
        static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    }
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse { p.plan_fft_inverse(n) } else { p.plan_fft_forward(n) }
    });
    fft.process(data);
    transpose(data, n);
    fft.process(data);
    transpose(data, n);
}

fn transpose(data: &mut [Complex64], n: usize) {
    for y in 0..n {
        for x in y + 1..n {
            data.swap(y * n + x, x * n + y);
        }
    }
}

/// `idx[i][t] = (i + t - r) mod n` for a window of radius `r`.
fn wrap_indices(n: usize, r: usize) -> Vec<Vec<usize>> {
    (0..n).map(|i| (0..=2 * r).map(|t| (i + n * (r / n + 1) + t - r) % n).collect()).collect()
}

fn wrap_box(data: &[f64], n: usize, size: usize) -> Vec<f64> {
    let idx = wrap_indices(n, size / 2);
    let norm = (size * size) as f64;
    let mut out = vec![0.0; n * n];
    for y in 0..n {
        for x in 0..n {
            let mut acc = 0.0;
            for &yy in &idx[y] {
                let row = &data[yy * n..(yy + 1) * n];
                for &xx in &idx[x] {
                    acc += row[xx];
                }
            }
            out[y * n + x] = acc / norm;
        }
    }
    out
}

fn wrap_blur(data: &[f64], n: usize, taps: &[f64]) -> Vec<f64> {
    let idx = wrap_indices(n, taps.len() / 2);
    let mut tmp = vec![0.0; n * n];
    for y in 0..n {
        let row = &data[y * n..(y + 1) * n];
        for x in 0..n {
            tmp[y * n + x] = taps.iter().zip(&idx[x]).map(|(wt, &i)| wt * row[i]).sum();
        }
    }
    let mut out = vec![0.0; n * n];
    for y in 0..n {
        for x in 0..n {
            out[y * n + x] = taps.iter().zip(&idx[y]).map(|(wt, &i)| wt * tmp[i * n + x]).sum();
        }
    }
    out
}

/// Saliency map on the `working_size` grid, scaled to a maximum of 1.
pub(crate) fn working_map(plane: &[f64], w: usize, h: usize, cfg: &SaliencyConfig) -> Vec<f64> {
    let n = cfg.working_size as usize;
    let small = resize_area(plane, w, h, n, n);
    let mut spec: Vec<Complex64> = small.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut spec, n, false);
    let log_amp: Vec<f64> = spec.iter().map(|c| (c.norm() + cfg.log_floor).ln()).collect();
    let avg = wrap_box(&log_amp, n, cfg.residual_filter as usize);
    // exp(log_amp - avg) with the original phase. Writing it as a rescale
    // of the spectrum keeps bins with no energy at zero, where the phase is
    // rounding noise.
    let mut back: Vec<Complex64> = spec.iter().zip(&avg).map(|(c, a)| c * (-a).exp()).collect();
    fft2(&mut back, n, true);
    let energy: Vec<f64> = back.iter().map(|c| c.norm_sqr()).collect();
    let radius = (3.0 * cfg.smoothing_sigma).ceil() as u32;
    let taps = gaussian_taps_sigma(2 * radius + 1, cfg.smoothing_sigma);
    let mut map = wrap_blur(&energy, n, &taps);
    let max = map.iter().cloned().fold(0.0, f64::max);
    if max > 0.0 {
        map.iter_mut().for_each(|v| *v /= max);
    }
    map
}

/// Bilinear upsampling of a periodic `n`x`n` map to `w`x`h`.
fn upsample_wrap(map: &[f64], n: usize, w: usize, h: usize) -> Vec<f64> {
    let ni = n as isize;
    let coords = |len: usize| -> Vec<(usize, usize, f64)> {
        (0..len)
            .map(|i| {
                let c = (i as f64 + 0.5) * n as f64 / len as f64 - 0.5;
                let f = c.floor();
                let i0 = (f as isize).rem_euclid(ni) as usize;
                let i1 = (f as isize + 1).rem_euclid(ni) as usize;
                (i0, i1, c - f)
            })
            .collect()
    };
    let (xs, ys) = (coords(w), coords(h));
    let mut out = Vec::with_capacity(w * h);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let top = map[y0 * n + x0] * (1.0 - fx) + map[y0 * n + x1] * fx;
            let bottom = map[y1 * n + x0] * (1.0 - fx) + map[y1 * n + x1] * fx;
            out.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    out
}

/// Full-resolution saliency of a luminance plane, values in [0, 1].
pub fn saliency_map(plane: &[f64], w: usize, h: usize, cfg: &SaliencyConfig) -> Vec<f64> {
    let n = cfg.working_size as usize;
    upsample_wrap(&working_map(plane, w, h, cfg), n, w, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::percept::MetricManifest;

    fn cfg() -> SaliencyConfig {
        MetricManifest::builtin().vsi.saliency.clone()
    }

    #[test]
    fn area_resize_of_exact_blocks() {
        let data: Vec<f64> = (0..16).map(|v| v as f64).collect();
        let out = resize_area(&data, 4, 4, 2, 2);
        assert_eq!(out, vec![2.5, 4.5, 10.5, 12.5]);
    }

    #[test]
    fn isolated_blob_is_salient() {
        let (w, h) = (128, 128);
        let mut plane = vec![200.0; w * h];
        for y in 40..56 {
            for x in 80..96 {
                plane[y * w + x] = 20.0;
            }
        }
        let map = saliency_map(&plane, w, h, &cfg());
        let at = |x: usize, y: usize| map[y * w + x];
        assert!(map.iter().all(|v| (0.0..=1.0 + 1e-12).contains(v)));
        assert!(at(88, 48) > 0.5, "{}", at(88, 48));
        assert!(at(20, 110) < 0.1, "{}", at(20, 110));
    }

    #[test]
    fn shift_by_whole_cells_shifts_map() {
        let (w, h) = (128, 128);
        let mut a = vec![240.0; w * h];
        let mut b = a.clone();
        for y in 30..50 {
            for x in 30..44 {
                a[y * w + x] = 10.0;
                b[(y + 6) * w + x + 4] = 10.0;
            }
        }
        let (ma, mb) = (saliency_map(&a, w, h, &cfg()), saliency_map(&b, w, h, &cfg()));
        for y in 0..h - 6 {
            for x in 0..w - 4 {
                assert!((ma[y * w + x] - mb[(y + 6) * w + x + 4]).abs() < 1e-9);
            }
        }
    }
}
