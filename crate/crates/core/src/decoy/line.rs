use rand::Rng;

use super::{symmetric, DecoyConstraints, DecoyGeometry, Provenance};
use crate::chartgen::{ChartType, Mark, Segment};
use crate::error::{Error, Result};
use crate::imageops::PixelRect;

/// Groups segments into polylines by joining endpoints closer than `tol`.
/// Shared joints are averaged. Each polyline runs left to right and keeps
/// the thickness and color of its segments.
pub fn chain_polylines(segments: &[Segment], tol: f64) -> Vec<Vec<Segment>> {
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let close = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1) <= tol;
    let flip = |s: &Segment| Segment { x0: s.x1, y0: s.y1, x1: s.x0, y1: s.y0, ..s.clone() };
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut chain = vec![segments[start].clone()];
        // Grow at the tail, then at the head.
        for at_tail in [true, false] {
            loop {
                let end = if at_tail {
                    let s = chain.last().unwrap();
                    (s.x1, s.y1)
                } else {
                    (chain[0].x0, chain[0].y0)
                };
                let next = (0..segments.len()).filter(|&i| !used[i]).find_map(|i| {
                    let s = &segments[i];
                    let (p0, p1) = ((s.x0, s.y0), (s.x1, s.y1));
                    match (at_tail, close(end, p0), close(end, p1)) {
                        (true, true, _) | (false, _, true) => Some((i, s.clone())),
                        (true, false, true) | (false, true, false) => Some((i, flip(s))),
                        _ => None,
                    }
                });
                let Some((i, s)) = next else { break };
                used[i] = true;
                if at_tail {
                    let last = chain.last_mut().unwrap();
                    let joint = ((last.x1 + s.x0) / 2.0, (last.y1 + s.y0) / 2.0);
                    (last.x1, last.y1) = joint;
                    chain.push(Segment { x0: joint.0, y0: joint.1, ..s });
                } else {
                    let first = &mut chain[0];
                    let joint = ((first.x0 + s.x1) / 2.0, (first.y0 + s.y1) / 2.0);
                    (first.x0, first.y0) = joint;
                    chain.insert(0, Segment { x1: joint.0, y1: joint.1, ..s });
                }
            }
        }
        if chain[0].x0 > chain.last().unwrap().x1 {
            chain.reverse();
            chain = chain.iter().map(flip).collect();
        }
        out.push(chain);
    }
    out
}

/// Moves values into `[lo, hi]` without changing the sign of any
/// difference: a shift when they fit, otherwise an affine squeeze.
fn fit_into(v: &mut [f64], lo: f64, hi: f64) {
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min >= lo && max <= hi {
        return;
    }
    if max - min <= hi - lo {
        let shift = if min < lo { lo - min } else { hi - max };
        for y in v.iter_mut() {
            *y = (*y + shift).clamp(lo, hi);
        }
    } else {
        let k = (hi - lo) / (max - min);
        for y in v.iter_mut() {
            *y = (lo + (*y - min) * k).clamp(lo, hi);
        }
    }
}

/// Decoy polylines sharing the originals' x anchors.
///
/// Vertices are jittered vertically by up to `line_jitter` of the plot
/// height. Each segment's rise is then negated with probability
/// `line_trend_flip_prob`, accumulating from the first vertex so a flip
/// reflects the later vertex about the earlier one's height. The two end
/// vertices move along their segment by up to `line_length_jitter` of its
/// length. Finally x is clamped to the plot and the y values are shifted,
/// or squeezed if taller than the plot, so that they fit while every
/// segment keeps its direction.
pub fn gen_decoy_line(segments: &[Segment], plot: PixelRect, canvas: (u32, u32), c: &DecoyConstraints) -> Result<DecoyGeometry> {
    c.validate()?;
    if segments.is_empty() {
        return Err(Error::param("line decoy needs at least one original segment"));
    }
    let tol = 4.0 * segments.iter().map(|s| s.thickness).fold(1.0, f64::max);
    let polylines = chain_polylines(segments, tol);
    let mut rng = c.rng();
    let plot_h = plot.h as f64;
    let (x_lo, x_hi) = (plot.x as f64, plot.right() as f64);
    let (y_lo, y_hi) = (plot.y as f64, plot.bottom() as f64);

    let mut marks = Vec::new();
    let mut provenance = Vec::new();
    for (pi, poly) in polylines.iter().enumerate() {
        let mut xs: Vec<f64> = std::iter::once(poly[0].x0).chain(poly.iter().map(|s| s.x1)).collect();
        let jittered: Vec<f64> = std::iter::once(poly[0].y0)
            .chain(poly.iter().map(|s| s.y1))
            .map(|y| y + symmetric(&mut rng) * c.line_jitter * plot_h)
            .collect();
        let mut ys = vec![jittered[0]];
        for i in 0..poly.len() {
            let rise = jittered[i + 1] - jittered[i];
            let flip = rng.random::<f64>() < c.line_trend_flip_prob;
            ys.push(ys[i] + if flip { -rise } else { rise });
        }
        let n = xs.len();
        for (end, inner) in [(0, 1), (n - 1, n - 2)] {
            let f = symmetric(&mut rng) * c.line_length_jitter;
            let (dx, dy) = (xs[end] - xs[inner], ys[end] - ys[inner]);
            xs[end] += f * dx;
            ys[end] += f * dy;
        }
        for x in xs.iter_mut() {
            *x = x.clamp(x_lo, x_hi);
        }
        fit_into(&mut ys, y_lo, y_hi);
        for (si, s) in poly.iter().enumerate() {
            marks.push(Mark::Segment(Segment {
                x0: xs[si],
                y0: ys[si],
                x1: xs[si + 1],
                y1: ys[si + 1],
                thickness: s.thickness,
                color: s.color,
            }));
            provenance.push(Provenance::PerturbedFrom { polyline: pi, segment: si });
        }
    }
    Ok(DecoyGeometry { chart_type: ChartType::Line, canvas_width: canvas.0, canvas_height: canvas.1, plot_rect: plot, marks, provenance })
}
