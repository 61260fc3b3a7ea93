use super::{unit_open_closed, DecoyConstraints, DecoyGeometry, Provenance};
use crate::chartgen::{BarRect, ChartType, GeometrySet, Mark};
use crate::error::{Error, Result};

/// Decoy bars interleaved with the originals: one at each midpoint between
/// neighbors (plus `bar_count_extra` more per gap) and one on each flank.
///
/// Each decoy's height is uniform in `((1 + e)·h_ref, max(plot_h, (1 + e)²·h_ref)]`
/// where `h_ref` is the taller adjacent original, capped by the distance
/// from the baseline to the top of the canvas.
pub fn gen_decoy_bar(orig: &GeometrySet, c: &DecoyConstraints) -> Result<DecoyGeometry> {
    if orig.chart_type != ChartType::Bar {
        return Err(Error::param("bar decoy requested for a non-bar chart"));
    }
    c.validate()?;
    let bars = orig.bars();
    if bars.is_empty() {
        return Err(Error::param("bar decoy needs at least one original bar"));
    }
    let plot = orig.plot_rect;
    let base = bars.iter().map(|b| b.y + b.h).fold(f64::NEG_INFINITY, f64::max);
    let centers: Vec<f64> = bars.iter().map(|b| b.x + b.w / 2.0).collect();
    let n = bars.len();
    let spacing = if n >= 2 {
        (centers[n - 1] - centers[0]) / (n - 1) as f64
    } else {
        (centers[0] - plot.x as f64).min(plot.right() as f64 - centers[0]).max(bars[0].w)
    };

    let mut slots: Vec<(f64, Option<usize>, Option<usize>)> = vec![(centers[0] - spacing / 2.0, None, Some(0))];
    for i in 0..n.saturating_sub(1) {
        let per_gap = c.bar_count_extra as usize + 1;
        for j in 0..per_gap {
            let t = (j + 1) as f64 / (per_gap + 1) as f64;
            slots.push((centers[i] + t * (centers[i + 1] - centers[i]), Some(i), Some(i + 1)));
        }
    }
    slots.push((centers[n - 1] + spacing / 2.0, Some(n - 1), None));

    let mut rng = c.rng();
    let mut marks = Vec::with_capacity(slots.len());
    let mut provenance = Vec::with_capacity(slots.len());
    for (center, left, right) in slots {
        let adjacent: Vec<&BarRect> = [left, right].iter().flatten().map(|&i| bars[i]).collect();
        let h_ref = adjacent.iter().map(|b| b.h).fold(0.0, f64::max);
        let width = adjacent.iter().map(|b| b.w).sum::<f64>() / adjacent.len() as f64;
        let lo = (1.0 + c.bar_min_excess) * h_ref;
        let hi = (plot.h as f64).max(lo * (1.0 + c.bar_min_excess)).min(base);
        if lo >= hi {
            return Err(Error::param(format!(
                "no headroom for a decoy bar taller than {lo:.1} px above a baseline at y = {base:.1}"
            )));
        }
        let h = lo + (hi - lo) * unit_open_closed(&mut rng);
        let x = (center - width / 2.0).round().clamp(plot.x as f64, (plot.right() as f64 - width).max(plot.x as f64));
        marks.push(Mark::BarRect(BarRect { x, y: base - h, w: width, h, color: adjacent[0].color }));
        provenance.push(Provenance::InterleavedAt { left, right, reference_height: h_ref });
    }
    Ok(DecoyGeometry {
        chart_type: ChartType::Bar,
        canvas_width: orig.canvas_width,
        canvas_height: orig.canvas_height,
        plot_rect: plot,
        marks,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgen::Element;
    use crate::imageops::{PixelRect, Srgb};

    fn bars(heights: &[f64], plot: PixelRect) -> GeometrySet {
        let elements = heights
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                let x = plot.x as f64 + 20.0 + 40.0 * i as f64;
                Element::data(Mark::BarRect(BarRect { x, y: plot.bottom() as f64 - h, w: 12.0, h, color: Srgb::BLACK }))
            })
            .collect();
        GeometrySet::new(ChartType::Bar, (300, 300), plot, elements)
    }

    fn heights(d: &DecoyGeometry) -> Vec<f64> {
        d.marks
            .iter()
            .map(|m| match m {
                Mark::BarRect(b) => b.h,
                _ => unreachable!(),
            })
            .collect()
    }

    #[test]
    fn between_bar_bound() {
        let plot = PixelRect::new(40, 60, 200, 200);
        let g = bars(&[30.0, 60.0], plot);
        for seed in 0..1000 {
            let d = gen_decoy_bar(&g, &DecoyConstraints { seed, ..Default::default() }).unwrap();
            assert_eq!(d.marks.len(), 3);
            let h = heights(&d)[1];
            assert!(h > 66.0 && h <= 200.0, "seed {seed}: {h}");
            assert_eq!(d.provenance[1], Provenance::InterleavedAt { left: Some(0), right: Some(1), reference_height: 60.0 });
        }
    }

    #[test]
    fn single_bar_gets_two_taller_flanks() {
        let plot = PixelRect::new(40, 60, 200, 200);
        let g = bars(&[150.0], plot);
        let d = gen_decoy_bar(&g, &DecoyConstraints::default()).unwrap();
        assert_eq!(d.marks.len(), 2);
        assert!(heights(&d).iter().all(|&h| h > 165.0));
        let xs: Vec<f64> = d.marks.iter().map(|m| m.extent().0).collect();
        assert!(xs[0] < 60.0 && xs[1] > 60.0);
    }

    #[test]
    fn full_height_bar_uses_headroom() {
        let plot = PixelRect::new(40, 60, 200, 200);
        let d = gen_decoy_bar(&bars(&[200.0, 10.0], plot), &DecoyConstraints::default()).unwrap();
        for (m, h) in d.marks.iter().zip(heights(&d)) {
            assert!(m.extent().1 >= 0.0);
            assert!(h > 10.0 * 1.1);
        }
        // No room above a bar filling the whole canvas height.
        let tight = PixelRect::new(40, 0, 200, 260);
        assert!(gen_decoy_bar(&bars(&[260.0], tight), &DecoyConstraints::default()).is_err());
    }

    #[test]
    fn extra_bars_per_gap() {
        let plot = PixelRect::new(40, 60, 200, 200);
        let g = bars(&[30.0, 60.0, 40.0], plot);
        let d = gen_decoy_bar(&g, &DecoyConstraints { bar_count_extra: 2, ..Default::default() }).unwrap();
        assert_eq!(d.marks.len(), 2 + 2 * 3);
    }

    #[test]
    fn deterministic_and_typed() {
        let plot = PixelRect::new(40, 60, 200, 200);
        let g = bars(&[30.0, 60.0, 90.0], plot);
        let c = DecoyConstraints { seed: 42, ..Default::default() };
        let a = gen_decoy_bar(&g, &c).unwrap();
        assert_eq!(a.to_json(), gen_decoy_bar(&g, &c).unwrap().to_json());
        assert_eq!(a.chart_type, ChartType::Bar);
        assert!(gen_decoy_bar(&GeometrySet::new(ChartType::Bar, (10, 10), plot, vec![]), &c).is_err());
    }
}
