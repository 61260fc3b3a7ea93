//! Straight-line Hough transform.
//!
//! Lines use the normal form `rho = x cos(theta) + y sin(theta)` in pixel
//! index coordinates (y down), with `theta` in [0, 180) degrees measured
//! from the +x axis to the line's normal. A horizontal line therefore has
//! `theta = 90`.

use serde::{Deserialize, Serialize};

use super::binarize::foreground_mask;
use crate::chartgen::fold_tilt;
use crate::error::{Error, Result};
use crate::imageops::{cosd, sind, RasterImage};

/// Foreground pixels within this distance of a line support it.
pub const SUPPORT_TOLERANCE: f64 = 1.5;
/// Largest gap, in pixels along the line, bridged when collecting a run.
pub const MAX_RUN_GAP: f64 = 3.0;
/// Largest centerline deviation, in pixels, tolerated within one detection.
pub const STRAIGHTNESS_TOLERANCE: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineDetection {
    pub rho: f64,
    pub theta: f64,
    /// `(x0, y0, x1, y1)`, both on the line.
    pub endpoints: (f64, f64, f64, f64),
    pub votes: u32,
}

impl LineDetection {
    /// Tilt in the chart convention (y up), folded into (-90, 90].
    pub fn tilt(&self) -> f64 {
        fold_tilt(90.0 - self.theta)
    }

    pub fn length(&self) -> f64 {
        let (x0, y0, x1, y1) = self.endpoints;
        (x1 - x0).hypot(y1 - y0)
    }

    pub fn distance_to_line(&self, x: f64, y: f64) -> f64 {
        (x * cosd(self.theta) + y * sind(self.theta) - self.rho).abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoughParams {
    pub vote_threshold: u32,
    pub angle_step: f64,
    pub rho_step: f64,
}

impl Default for HoughParams {
    fn default() -> Self {
        HoughParams { vote_threshold: 15, angle_step: 1.0, rho_step: 1.0 }
    }
}

/// Vote accumulator over `(theta index, rho index)`.
pub(crate) struct Accumulator {
    pub n_theta: usize,
    pub n_rho: usize,
    pub rho_offset: f64,
    pub rho_step: f64,
    pub thetas: Vec<f64>,
    pub votes: Vec<u32>,
}

impl Accumulator {
    pub fn fill(mask: &[bool], w: usize, h: usize, angle_step: f64, rho_step: f64) -> Self {
        let n_theta = (180.0 / angle_step).ceil() as usize;
        let thetas: Vec<f64> = (0..n_theta).map(|i| i as f64 * angle_step).collect();
        let cos: Vec<f64> = thetas.iter().map(|&t| cosd(t)).collect();
        let sin: Vec<f64> = thetas.iter().map(|&t| sind(t)).collect();
        let diag = ((w * w + h * h) as f64).sqrt().ceil();
        let n_rho = (2.0 * diag / rho_step).ceil() as usize + 1;
        let mut votes = vec![0u32; n_theta * n_rho];
        for y in 0..h {
            for x in 0..w {
                if !mask[y * w + x] {
                    continue;
                }
                for t in 0..n_theta {
                    let rho = x as f64 * cos[t] + y as f64 * sin[t];
                    let r = ((rho + diag) / rho_step).round() as usize;
                    votes[t * n_rho + r] += 1;
                }
            }
        }
        Accumulator { n_theta, n_rho, rho_offset: diag, rho_step, thetas, votes }
    }

    pub fn rho_of(&self, r: usize) -> f64 {
        r as f64 * self.rho_step - self.rho_offset
    }

    pub fn at(&self, t: usize, r: usize) -> u32 {
        self.votes[t * self.n_rho + r]
    }

    /// Neighbor cell, wrapping theta across 0/180 with rho mirrored.
    fn neighbor(&self, t: usize, r: usize, dt: isize, dr: isize) -> Option<(usize, usize)> {
        let mut tt = t as isize + dt;
        let mut rr = r as isize + dr;
        if tt < 0 || tt >= self.n_theta as isize {
            tt = tt.rem_euclid(self.n_theta as isize);
            rr = self.n_rho as isize - 1 - rr;
        }
        (0..self.n_rho as isize).contains(&rr).then_some((tt as usize, rr as usize))
    }

    /// Cells at or above `threshold` that dominate their 3x3 neighborhood.
    /// Plateaus keep only their first cell in scan order.
    pub fn peaks(&self, threshold: u32) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for t in 0..self.n_theta {
            for r in 0..self.n_rho {
                let v = self.at(t, r);
                if v < threshold.max(1) {
                    continue;
                }
                let mut is_peak = true;
                'nb: for dt in -1..=1isize {
                    for dr in -1..=1isize {
                        if dt == 0 && dr == 0 {
                            continue;
                        }
                        if let Some((nt, nr)) = self.neighbor(t, r, dt, dr) {
                            let nv = self.at(nt, nr);
                            let earlier = (nt, nr) < (t, r);
                            if nv > v || (nv == v && earlier) {
                                is_peak = false;
                                break 'nb;
                            }
                        }
                    }
                }
                if is_peak {
                    out.push((t, r, v));
                }
            }
        }
        out
    }
}

struct Fit {
    theta: f64,
    rho: f64,
    run: Vec<usize>,
    t_range: (f64, f64),
}

/// Longest gap-bridged run of foreground pixels supporting a line.
fn support_run(points: &[(f64, f64)], theta: f64, rho: f64) -> (Vec<usize>, (f64, f64)) {
    let (c, s) = (cosd(theta), sind(theta));
    let mut along: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|(_, &(x, y))| (x * c + y * s - rho).abs() <= SUPPORT_TOLERANCE)
        .map(|(i, &(x, y))| (-x * s + y * c, i))
        .collect();
    if along.is_empty() {
        return (Vec::new(), (0.0, 0.0));
    }
    along.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut best = (0usize, 1usize);
    let mut start = 0usize;
    for i in 1..=along.len() {
        if i == along.len() || along[i].0 - along[i - 1].0 > MAX_RUN_GAP {
            let span = along[i - 1].0 - along[start].0;
            if span > along[best.1 - 1].0 - along[best.0].0 {
                best = (start, i);
            }
            start = i;
        }
    }
    let range = (along[best.0].0, along[best.1 - 1].0);
    (along[best.0..best.1].iter().map(|a| a.1).collect(), range)
}

/// Total-least-squares line through the given points.
fn pca_line(points: &[(f64, f64)], idx: &[usize]) -> Option<(f64, f64)> {
    if idx.len() < 2 {
        return None;
    }
    let n = idx.len() as f64;
    let (mx, my) = idx.iter().fold((0.0, 0.0), |a, &i| (a.0 + points[i].0, a.1 + points[i].1));
    let (mx, my) = (mx / n, my / n);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &i in idx {
        let (dx, dy) = (points[i].0 - mx, points[i].1 - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let dir = 0.5 * (2.0 * sxy).atan2(sxx - syy).to_degrees();
    let theta = (dir + 90.0).rem_euclid(180.0);
    let rho = mx * cosd(theta) + my * sind(theta);
    Some((theta, rho))
}

/// Douglas-Peucker breakpoints of a polyline, as indices including both ends.
fn simplify(pts: &[(f64, f64)], eps: f64) -> Vec<usize> {
    fn rec(pts: &[(f64, f64)], lo: usize, hi: usize, eps: f64, out: &mut Vec<usize>) {
        let (a, b) = (pts[lo], pts[hi]);
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len = dx.hypot(dy).max(1e-12);
        let mut best = (0.0, lo);
        for (i, p) in pts.iter().enumerate().take(hi).skip(lo + 1) {
            let d = ((p.0 - a.0) * dy - (p.1 - a.1) * dx).abs() / len;
            if d > best.0 {
                best = (d, i);
            }
        }
        if best.0 > eps {
            rec(pts, lo, best.1, eps, out);
            rec(pts, best.1, hi, eps, out);
        } else {
            out.push(hi);
        }
    }
    let mut out = vec![0];
    if pts.len() > 1 {
        rec(pts, 0, pts.len() - 1, eps, &mut out);
    }
    out
}

/// Restricts a run to its longest straight piece. A run can continue past
/// a shallow bend into the next stroke; its centerline (mean offset per
/// pixel of length) then kinks, and only the longest unkinked stretch is kept.
fn straight_piece(points: &[(f64, f64)], run: &[usize], theta: f64, rho: f64) -> Vec<usize> {
    let (c, s) = (cosd(theta), sind(theta));
    let proj = |i: usize| {
        let (x, y) = points[i];
        (-x * s + y * c, x * c + y * s - rho)
    };
    let mut bins = std::collections::BTreeMap::<i64, (f64, f64, f64)>::new();
    for &i in run {
        let (t, o) = proj(i);
        let e = bins.entry(t.floor() as i64).or_insert((0.0, 0.0, 0.0));
        *e = (e.0 + t, e.1 + o, e.2 + 1.0);
    }
    let center: Vec<(f64, f64)> = bins.values().map(|&(t, o, n)| (t / n, o / n)).collect();
    let keys: Vec<i64> = bins.keys().copied().collect();
    let breaks = simplify(&center, STRAIGHTNESS_TOLERANCE);
    if breaks.len() <= 2 {
        return run.to_vec();
    }
    let (lo, hi) = breaks
        .windows(2)
        .map(|w| (w[0], w[1]))
        .fold((0, 0), |best, p| if center[p.1].0 - center[p.0].0 > center[best.1].0 - center[best.0].0 { p } else { best });
    let (k0, k1) = (keys[lo], keys[hi]);
    run.iter().copied().filter(|&i| (k0..=k1).contains(&(proj(i).0.floor() as i64))).collect()
}

fn refine(points: &[(f64, f64)], theta: f64, rho: f64) -> Fit {
    let (mut theta, mut rho) = (theta, rho);
    let (mut run, mut range) = support_run(points, theta, rho);
    for _ in 0..2 {
        let Some((t, r)) = pca_line(points, &run) else { break };
        let (next, next_range) = support_run(points, t, r);
        if next.len() < run.len() {
            break;
        }
        (theta, rho, run, range) = (t, r, next, next_range);
    }
    let piece = straight_piece(points, &run, theta, rho);
    if piece.len() < run.len() {
        if let Some((t, r)) = pca_line(points, &piece) {
            (theta, rho) = (t, r);
        }
        let (c, s) = (cosd(theta), sind(theta));
        let along = piece.iter().map(|&i| -points[i].0 * s + points[i].1 * c);
        range = along.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), t| (a.min(t), b.max(t)));
        run = piece;
    }
    Fit { theta, rho, run, t_range: range }
}

/// Detects lines in a foreground mask.
///
/// Accumulator peaks are visited in descending vote order. Each is refined
/// by a least-squares fit to its supporting run and kept only if the run
/// spans at least `vote_threshold` pixels and at least half of its pixels
/// are not already explained by an earlier detection.
pub fn hough_lines_mask(mask: &[bool], w: usize, h: usize, p: &HoughParams) -> Result<Vec<LineDetection>> {
    if !(p.angle_step > 0.0 && p.angle_step <= 90.0 && p.rho_step > 0.0) {
        return Err(Error::param("angle and rho steps must be positive"));
    }
    if mask.len() != w * h {
        return Err(Error::param("mask size does not match dimensions"));
    }
    let points: Vec<(f64, f64)> = (0..w * h).filter(|&i| mask[i]).map(|i| ((i % w) as f64, (i / w) as f64)).collect();
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let acc = Accumulator::fill(mask, w, h, p.angle_step, p.rho_step);
    let mut peaks = acc.peaks(p.vote_threshold);
    peaks.sort_by(|a, b| b.2.cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut claimed = vec![false; points.len()];
    let mut out = Vec::new();
    for (t, r, votes) in peaks {
        let fit = refine(&points, acc.thetas[t], acc.rho_of(r));
        if fit.run.len() < 2 || fit.t_range.1 - fit.t_range.0 + 1.0 < p.vote_threshold as f64 {
            continue;
        }
        let fresh = fit.run.iter().filter(|&&i| !claimed[i]).count();
        if 2 * fresh < fit.run.len() {
            continue;
        }
        for &i in &fit.run {
            claimed[i] = true;
        }
        let (c, s) = (cosd(fit.theta), sind(fit.theta));
        let at = |u: f64| (fit.rho * c - u * s, fit.rho * s + u * c);
        let (a, b) = (at(fit.t_range.0), at(fit.t_range.1));
        out.push(LineDetection { rho: fit.rho, theta: fit.theta, endpoints: (a.0, a.1, b.0, b.1), votes });
    }
    Ok(out)
}

/// Detects lines in an image binarized against its dominant color.
pub fn hough_lines(img: &RasterImage, vote_threshold: u32, angle_step: f64, rho_step: f64) -> Result<Vec<LineDetection>> {
    let mask = foreground_mask(img, None);
    hough_lines_mask(
        &mask,
        img.width() as usize,
        img.height() as usize,
        &HoughParams { vote_threshold, angle_step, rho_step },
    )
}
