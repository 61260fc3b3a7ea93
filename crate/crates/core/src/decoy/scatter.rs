use rand::Rng;

use super::{DecoyConstraints, DecoyGeometry, DisplacementUnit, Provenance};
use crate::chartgen::{ChartType, Dot, Mark};
use crate::error::{Error, Result};
use crate::imageops::PixelRect;

/// Keeps a dot of radius `r` inside the plot; centers it on an axis that is
/// too short to hold it.
fn clamp_center(v: f64, r: f64, lo: f64, hi: f64) -> f64 {
    if hi - lo < 2.0 * r {
        (lo + hi) / 2.0
    } else {
        v.clamp(lo + r, hi - r)
    }
}

/// One enlarged decoy per original dot, displaced in a uniform direction by
/// a uniform distance in `[scatter_disp_min, scatter_disp_max]`, plus
/// `scatter_count_extra` dots placed uniformly in the plot.
pub fn gen_decoy_scatter(dots: &[Dot], plot: PixelRect, canvas: (u32, u32), c: &DecoyConstraints) -> Result<DecoyGeometry> {
    c.validate()?;
    if dots.is_empty() {
        return Err(Error::param("scatter decoy needs at least one original dot"));
    }
    let mut rng = c.rng();
    let (x_lo, x_hi) = (plot.x as f64, plot.right() as f64);
    let (y_lo, y_hi) = (plot.y as f64, plot.bottom() as f64);
    let mut marks = Vec::new();
    let mut provenance = Vec::new();
    for (i, d) in dots.iter().enumerate() {
        let unit = match c.scatter_disp_unit {
            DisplacementUnit::Radius => d.r,
            DisplacementUnit::Px => 1.0,
        };
        let angle = rng.random::<f64>() * std::f64::consts::TAU;
        let dist = unit * (c.scatter_disp_min + (c.scatter_disp_max - c.scatter_disp_min) * rng.random::<f64>());
        let r = c.scatter_radius_scale * d.r;
        let (cx, cy) = (d.cx + dist * angle.cos(), d.cy + dist * angle.sin());
        let (kx, ky) = (clamp_center(cx, r, x_lo, x_hi), clamp_center(cy, r, y_lo, y_hi));
        marks.push(Mark::Dot(Dot { cx: kx, cy: ky, r, color: d.color }));
        provenance.push(Provenance::DisplacedFrom { source: i, clipped: (kx, ky) != (cx, cy) });
    }
    let mean_r = dots.iter().map(|d| d.r).sum::<f64>() / dots.len() as f64;
    let r = c.scatter_radius_scale * mean_r;
    for _ in 0..c.scatter_count_extra {
        let cx = clamp_center(x_lo + rng.random::<f64>() * (x_hi - x_lo), r, x_lo, x_hi);
        let cy = clamp_center(y_lo + rng.random::<f64>() * (y_hi - y_lo), r, y_lo, y_hi);
        marks.push(Mark::Dot(Dot { cx, cy, r, color: dots[0].color }));
        provenance.push(Provenance::Added);
    }
    Ok(DecoyGeometry { chart_type: ChartType::Scatter, canvas_width: canvas.0, canvas_height: canvas.1, plot_rect: plot, marks, provenance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imageops::Srgb;

    fn plot() -> PixelRect {
        PixelRect::new(0, 0, 400, 400)
    }

    #[test]
    fn displacement_within_pixel_range() {
        let dots: Vec<Dot> = (0..1000)
            .map(|i| Dot { cx: 50.0 + (i % 30) as f64 * 10.0, cy: 50.0 + (i / 30) as f64 * 9.0, r: 5.0, color: Srgb::BLACK })
            .collect();
        let c = DecoyConstraints {
            scatter_disp_unit: DisplacementUnit::Px,
            scatter_disp_min: 3.0,
            scatter_disp_max: 6.0,
            seed: 17,
            ..Default::default()
        };
        let d = gen_decoy_scatter(&dots, plot(), (400, 400), &c).unwrap();
        assert_eq!(d.marks.len(), dots.len());
        let mut checked = 0;
        for (m, p) in d.marks.iter().zip(&d.provenance) {
            let Provenance::DisplacedFrom { source, clipped } = *p else { panic!() };
            if clipped {
                continue;
            }
            let (x, y) = m.center();
            let dist = (x - dots[source].cx).hypot(y - dots[source].cy);
            assert!((3.0 - 1e-9..=6.0 + 1e-9).contains(&dist), "{dist}");
            checked += 1;
        }
        assert!(checked > 900);
    }

    #[test]
    fn radius_scaled_and_count_kept() {
        let dots = vec![Dot { cx: 100.0, cy: 100.0, r: 5.0, color: Srgb::BLACK }; 7];
        let d = gen_decoy_scatter(&dots, plot(), (400, 400), &DecoyConstraints::default()).unwrap();
        assert_eq!(d.marks.len(), 7);
        for m in &d.marks {
            let Mark::Dot(dot) = m else { panic!() };
            assert_eq!(dot.r, 8.0);
        }
        let extra = DecoyConstraints { scatter_count_extra: 3, ..Default::default() };
        let d = gen_decoy_scatter(&dots, plot(), (400, 400), &extra).unwrap();
        assert_eq!(d.marks.len(), 10);
        assert_eq!(d.provenance[9], Provenance::Added);
    }

    #[test]
    fn clipped_dots_stay_inside() {
        let dots = vec![Dot { cx: 2.0, cy: 398.0, r: 6.0, color: Srgb::BLACK }; 20];
        let d = gen_decoy_scatter(&dots, plot(), (400, 400), &DecoyConstraints::default()).unwrap();
        for m in &d.marks {
            let (x0, y0, x1, y1) = m.extent();
            assert!(x0 >= 0.0 && y0 >= 0.0 && x1 <= 400.0 && y1 <= 400.0);
        }
        assert!(d.provenance.iter().any(|p| matches!(p, Provenance::DisplacedFrom { clipped: true, .. })));
    }
}
