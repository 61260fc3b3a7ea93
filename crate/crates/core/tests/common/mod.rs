#![allow(dead_code)]

use decoyvis_core::chartgen::{render_chart_with, ChartData, ChartSpec, ChartType, GeometrySet, Margins, RenderOptions};
use decoyvis_core::imageops::RasterImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn spec(chart_type: ChartType, data: ChartData, w: u32, h: u32, margins: Margins) -> ChartSpec {
    ChartSpec { chart_type, canvas_width: w, canvas_height: h, margins, palette: decoyvis_core::chartgen::default_palette(), data, line_width: None }
}

/// A random chart of the given type on a `w`x`h` canvas.
pub fn random_spec(chart_type: ChartType, seed: u64, w: u32, h: u32, margins: Margins) -> ChartSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = match chart_type {
        ChartType::Bar => {
            let n = rng.random_range(3..=7);
            ChartData::Bar { bar_heights: (0..n).map(|_| rng.random_range(1.0..10.0)).collect(), labels: None }
        }
        ChartType::Line => {
            let n = rng.random_range(4..=7);
            let pts = (0..n).map(|i| (i as f64, rng.random_range(0.0..10.0))).collect();
            ChartData::Line { line_series: vec![pts] }
        }
        ChartType::Scatter => {
            let n = rng.random_range(4..=9);
            let pts = (0..n)
                .map(|_| (rng.random_range(0.0..10.0), rng.random_range(0.0..10.0), rng.random_range(4.0..7.0)))
                .collect();
            ChartData::Scatter { scatter_points: pts }
        }
        ChartType::Pie => {
            let n = rng.random_range(3..=6);
            let raw: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..5.0)).collect();
            let total: f64 = raw.iter().sum();
            ChartData::Pie { pie_fractions: raw.iter().map(|v| v / total).collect() }
        }
    };
    spec(chart_type, data, w, h, margins)
}

pub fn render(spec: &ChartSpec, antialias: bool) -> (RasterImage, GeometrySet) {
    render_chart_with(spec, &RenderOptions { antialias, ..Default::default() }).expect("fixture renders")
}

/// Ten 256x256 charts mixing all four types.
pub fn metric_corpus() -> Vec<RasterImage> {
    (0..10u64)
        .map(|i| {
            let t = ChartType::ALL[i as usize % 4];
            render(&random_spec(t, 100 + i, 256, 256, Margins::uniform(48)), i % 2 == 0).0
        })
        .collect()
}

/// Adds uniform integer noise in `[-amp, amp]` to every channel.
pub fn add_noise(img: &RasterImage, amp: i32, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = img.clone();
    for p in out.pixels_mut() {
        for c in p.iter_mut().take(3) {
            *c = (*c as i32 + rng.random_range(-amp..=amp)).clamp(0, 255) as u8;
        }
    }
    out
}

/// Shifts content by `(dx, dy)`, filling with `fill`. Panics if any
/// non-fill pixel would leave the canvas.
pub fn translate(img: &RasterImage, dx: i64, dy: i64, fill: [u8; 4]) -> RasterImage {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let mut out = RasterImage::filled(img.width(), img.height(), fill).unwrap();
    for y in 0..h {
        for x in 0..w {
            let p = img.get(x as u32, y as u32);
            let (nx, ny) = (x + dx, y + dy);
            if nx >= 0 && ny >= 0 && nx < w && ny < h {
                out.put(nx as u32, ny as u32, p);
            } else {
                assert_eq!(p, fill, "content would leave the canvas at ({x}, {y})");
            }
        }
    }
    out
}
