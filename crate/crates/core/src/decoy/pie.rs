use super::{DecoyConstraints, DecoyGeometry, Provenance};
use crate::chartgen::{ChartType, Mark, Slice};
use crate::error::{Error, Result};
use crate::imageops::PixelRect;

const SWEEP_TOLERANCE: f64 = 1e-6;

/// Re-partitioned pie: slices wider than `pie_split_threshold` are cut into
/// `pie_split_parts` equal parts, then every maximal run of two or more
/// adjacent slices narrower than `pie_merge_threshold` becomes one slice.
/// Runs do not wrap from the last slice to the first. The radius grows by
/// `pie_radius_scale`; center and starting angle are kept. No randomness.
pub fn gen_decoy_pie(slices: &[Slice], plot: PixelRect, canvas: (u32, u32), c: &DecoyConstraints) -> Result<DecoyGeometry> {
    c.validate()?;
    if slices.is_empty() {
        return Err(Error::param("pie decoy needs at least one original slice"));
    }
    let total: f64 = slices.iter().map(|s| s.sweep_angle).sum();
    if (total - 360.0).abs() > SWEEP_TOLERANCE {
        return Err(Error::param(format!("pie sweeps sum to {total}, not 360")));
    }

    // (sweep, [(source, split part)])
    let mut items: Vec<(f64, Vec<(usize, Option<u32>)>)> = Vec::new();
    for (i, s) in slices.iter().enumerate() {
        if s.sweep_angle > c.pie_split_threshold {
            let part = s.sweep_angle / c.pie_split_parts as f64;
            items.extend((0..c.pie_split_parts).map(|k| (part, vec![(i, Some(k))])));
        } else {
            items.push((s.sweep_angle, vec![(i, None)]));
        }
    }
    let mut merged: Vec<(f64, Vec<(usize, Option<u32>)>)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let mut j = i;
        while j < items.len() && items[j].0 < c.pie_merge_threshold {
            j += 1;
        }
        if j - i >= 2 {
            let sweep = items[i..j].iter().map(|x| x.0).sum();
            let sources = items[i..j].iter().flat_map(|x| x.1.clone()).collect();
            merged.push((sweep, sources));
            i = j;
        } else {
            merged.push(items[i].clone());
            i += 1;
        }
    }

    let first = &slices[0];
    let radius = c.pie_radius_scale * first.radius;
    let mut start = first.start_angle;
    let mut marks = Vec::with_capacity(merged.len());
    let mut provenance = Vec::with_capacity(merged.len());
    for (sweep, sources) in merged {
        let lead = sources[0].0;
        marks.push(Mark::Slice(Slice {
            cx: first.cx,
            cy: first.cy,
            radius,
            start_angle: start,
            sweep_angle: sweep,
            color: slices[lead].color,
        }));
        start += sweep;
        provenance.push(match sources.as_slice() {
            [(s, None)] => Provenance::KeptFrom { source: *s },
            [(s, Some(k))] => Provenance::SplitFrom { source: *s, part: *k },
            many => {
                let mut ids: Vec<usize> = many.iter().map(|x| x.0).collect();
                ids.dedup();
                Provenance::MergedFrom { sources: ids }
            }
        });
    }
    Ok(DecoyGeometry { chart_type: ChartType::Pie, canvas_width: canvas.0, canvas_height: canvas.1, plot_rect: plot, marks, provenance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imageops::Srgb;
    use proptest::prelude::*;

    fn pie(sweeps: &[f64]) -> Vec<Slice> {
        let mut start = 0.0;
        sweeps
            .iter()
            .map(|&s| {
                let sl = Slice { cx: 100.0, cy: 100.0, radius: 50.0, start_angle: start, sweep_angle: s, color: Srgb::BLACK };
                start += s;
                sl
            })
            .collect()
    }

    fn sweeps(d: &DecoyGeometry) -> Vec<f64> {
        d.marks
            .iter()
            .map(|m| match m {
                Mark::Slice(s) => s.sweep_angle,
                _ => unreachable!(),
            })
            .collect()
    }

    fn run(s: &[f64]) -> DecoyGeometry {
        gen_decoy_pie(&pie(s), PixelRect::new(0, 0, 200, 200), (200, 200), &DecoyConstraints::default()).unwrap()
    }

    #[test]
    fn split_example() {
        let d = run(&[200.0, 100.0, 60.0]);
        assert_eq!(sweeps(&d), vec![100.0, 100.0, 100.0, 60.0]);
        assert_eq!(d.provenance[1], Provenance::SplitFrom { source: 0, part: 1 });
        assert_eq!(d.provenance[3], Provenance::KeptFrom { source: 2 });
    }

    #[test]
    fn merge_example() {
        let d = run(&[20.0, 15.0, 325.0]);
        // 325 is split too under the default threshold.
        assert_eq!(sweeps(&d), vec![35.0, 162.5, 162.5]);
        assert_eq!(d.provenance[0], Provenance::MergedFrom { sources: vec![0, 1] });
        let no_split = DecoyConstraints { pie_split_threshold: 360.0, ..Default::default() };
        let d = gen_decoy_pie(&pie(&[20.0, 15.0, 325.0]), PixelRect::new(0, 0, 200, 200), (200, 200), &no_split).unwrap();
        assert_eq!(sweeps(&d), vec![35.0, 325.0]);
    }

    #[test]
    fn radius_grows_and_geometry_kept() {
        let d = run(&[90.0, 90.0, 180.0]);
        for m in &d.marks {
            let Mark::Slice(s) = m else { panic!() };
            assert!(s.radius > 50.0);
            assert_eq!((s.cx, s.cy), (100.0, 100.0));
        }
        let Mark::Slice(s0) = &d.marks[0] else { panic!() };
        assert_eq!(s0.start_angle, 0.0);
    }

    #[test]
    fn bad_sum_rejected() {
        let c = DecoyConstraints::default();
        assert!(gen_decoy_pie(&pie(&[100.0, 100.0]), PixelRect::new(0, 0, 9, 9), (9, 9), &c).is_err());
        assert!(gen_decoy_pie(&[], PixelRect::new(0, 0, 9, 9), (9, 9), &c).is_err());
    }

    proptest! {
        #[test]
        fn conservation(raw in proptest::collection::vec(0.01f64..10.0, 1..12)) {
            let total: f64 = raw.iter().sum();
            let mut s: Vec<f64> = raw.iter().map(|v| v / total * 360.0).collect();
            let head: f64 = s[..s.len() - 1].iter().sum();
            *s.last_mut().unwrap() = 360.0 - head;
            prop_assume!(s.iter().all(|&v| v > 0.0));
            let d = run(&s);
            let out = sweeps(&d);
            prop_assert!((out.iter().sum::<f64>() - 360.0).abs() <= 1e-6);
            prop_assert!(out.iter().all(|&v| v > 0.0));
        }
    }
}
