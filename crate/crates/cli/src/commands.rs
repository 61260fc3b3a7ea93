use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use decoyvis_core::chartgen::{render_chart, ChartSpec, ChartType, GeometrySet};
use decoyvis_core::decoy::{generate_decoy, plan_decoy_colors, DecoyGeometry, HuePlan};
use decoyvis_core::imageops::{RasterImage, Srgb};
use decoyvis_core::optimizer::{optimize, BundleReport, GridPreset, Objective, ProtectedBundle, SearchGrid, SearchInputs};
use decoyvis_core::percept::{gap_scores, gamma, simulate_perception, GapScores, PerceivedPair, ViewingContext};
use decoyvis_core::vision::{extract_geometry, ExtractOptions};
use serde::{Deserialize, Serialize};

use crate::config::{GridConfig, InputMode, RunConfig};
use crate::error::{CliError, ErrorKind};

/// Charts are rendered on, and extracted against, a white background.
pub const BACKGROUND: Srgb = Srgb::WHITE;

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn load_png(path: &Path) -> Result<RasterImage, CliError> {
    RasterImage::load_png(path).map_err(|e| CliError { kind: ErrorKind::Io, message: format!("{}: {e}", path.display()) })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

pub fn load_spec(path: &Path) -> Result<ChartSpec, CliError> {
    let spec = ChartSpec::from_json(&read_text(path)?)?;
    spec.validate()?;
    Ok(spec)
}

/// The original image and its geometry: rendered from a spec, or extracted
/// from a PNG of the configured chart type.
pub fn load_original(cfg: &RunConfig) -> Result<(RasterImage, GeometrySet, InputMode), CliError> {
    let input = cfg.input.as_deref().ok_or_else(|| CliError::validation("no input given"))?;
    let mode = cfg.mode.unwrap_or_else(|| InputMode::detect(input));
    match mode {
        InputMode::SpecInput => {
            let spec = load_spec(input)?;
            if let Some(t) = cfg.chart_type {
                if t != spec.chart_type {
                    return Err(CliError::validation(format!("config says {t} but the spec is a {} chart", spec.chart_type)));
                }
            }
            let (img, geom) = render_chart(&spec)?;
            Ok((img, geom, mode))
        }
        InputMode::ImageInput => {
            let img = load_png(input)?;
            let t = cfg.chart_type.ok_or_else(|| CliError::validation("image input needs a chart type"))?;
            let geom = extract_geometry(&img, t, BACKGROUND, &ExtractOptions::default())?;
            Ok((img, geom, mode))
        }
    }
}

pub fn objective(cfg: &RunConfig, width: u32, height: u32) -> Objective {
    Objective {
        close: cfg.viewing.close(width, height),
        far: cfg.viewing.far(width, height),
        alpha: cfg.weights.alpha,
        beta: cfg.weights.beta,
    }
}

pub struct ProtectOutcome {
    pub bundle: ProtectedBundle,
    pub report: BundleReport,
    pub decoy: DecoyGeometry,
    pub hues: HuePlan,
}

/// Runs the whole pipeline in memory.
pub fn protect(cfg: &RunConfig) -> Result<ProtectOutcome, CliError> {
    cfg.validate()?;
    let (img, geom, mode) = load_original(cfg)?;
    let mut constraints = cfg.constraints.clone();
    constraints.seed = cfg.seed;
    let decoy = generate_decoy(&geom, &constraints)?;
    let hues = plan_decoy_colors(&geom, &decoy);
    let (w, h) = img.dims();
    let objective = objective(cfg, w, h);
    let (vw, vh) = geom.element_extent;
    let grid = cfg.grid.resolve(w, h, vw.min(vh));
    let inputs = SearchInputs { orig_img: &img, orig_geom: &geom, decoy: &decoy, hues: &hues, background: BACKGROUND };
    let bundle = optimize(&inputs, &grid, &objective, cfg.parallel)?;
    let effective = RunConfig {
        mode: Some(mode),
        chart_type: Some(geom.chart_type),
        constraints,
        grid: explicit_grid(&cfg.grid, &grid),
        ..cfg.clone()
    };
    let config = serde_json::to_value(&effective).expect("config serializes");
    let report = BundleReport::new(&bundle, &objective, config);
    Ok(ProtectOutcome { bundle, report, decoy, hues })
}

fn explicit_grid(cfg: &GridConfig, g: &SearchGrid) -> GridConfig {
    GridConfig {
        preset: Some(cfg.preset.unwrap_or(GridPreset::Coarse)),
        l_values: Some(g.l_values.clone()),
        c_values: Some(g.c_values.clone()),
        k_values: Some(g.k_values.clone()),
        m_values: Some(g.m_values.clone()),
        stage_plan: Some(g.stage_plan),
    }
}

#[derive(Serialize)]
struct DecoyDump<'a> {
    geometry: &'a DecoyGeometry,
    hues: &'a HuePlan,
}

/// Protects `cfg.input` and writes the bundle to `cfg.output_dir`; with
/// `emit_decoy`, also `decoy.json` holding the decoy geometry and hues.
pub fn cmd_protect(cfg: &RunConfig, emit_decoy: bool) -> Result<ProtectOutcome, CliError> {
    let out = cfg.output_dir.clone().ok_or_else(|| CliError::validation("no output directory given"))?;
    let outcome = protect(cfg)?;
    outcome.bundle.write_dir(&out, &outcome.report).map_err(|e| CliError::io(format!("{}: {e}", out.display())))?;
    if emit_decoy {
        let dump = DecoyDump { geometry: &outcome.decoy, hues: &outcome.hues };
        let mut text = serde_json::to_string_pretty(&dump).expect("decoy serializes");
        text.push('\n');
        write_file(&out.join("decoy.json"), text.as_bytes())?;
    }
    Ok(outcome)
}

/// The bundle's protected image as seen from `distance_cm`, using the
/// viewing parameters recorded in its report.
pub fn cmd_preview(bundle_dir: &Path, distance_cm: f64) -> Result<RasterImage, CliError> {
    let report_path = bundle_dir.join("report.json");
    if !report_path.is_file() {
        return Err(CliError::io(format!("{}: no bundle report", bundle_dir.display())));
    }
    let report = BundleReport::load(&report_path).map_err(|e| CliError::io(format!("{}: {e}", report_path.display())))?;
    let protected = load_png(&bundle_dir.join("protected.png"))?;
    let ctx = ViewingContext { distance_cm, ..report.viewing.close };
    ctx.validate()?;
    Ok(simulate_perception(&protected, &ctx)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub gap1: f64,
    pub gap2: f64,
    pub score: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma_close: f64,
    pub gamma_far: f64,
}

/// Scores an externally produced original, decoy and protected triple.
pub fn cmd_score(original: &Path, decoy: &Path, protected: &Path, cfg: &RunConfig) -> Result<ScoreReport, CliError> {
    cfg.validate()?;
    let (o, d, p) = (load_png(original)?, load_png(decoy)?, load_png(protected)?);
    o.same_dims(&d)?;
    o.same_dims(&p)?;
    let (w, h) = o.dims();
    let obj = objective(cfg, w, h);
    let pairs = [&o, &d, &p].map(|img| PerceivedPair::new(img, &obj.close, &obj.far));
    let [po, pd, pp] = pairs;
    let GapScores { gap1, gap2, score, alpha, beta } = gap_scores(&po?, &pd?, &pp?, obj.alpha, obj.beta)?;
    Ok(ScoreReport { gap1, gap2, score, alpha, beta, gamma_close: gamma(&obj.close)?, gamma_far: gamma(&obj.far)? })
}

/// The geometry of `cfg.input` as JSON.
pub fn cmd_inspect(cfg: &RunConfig) -> Result<String, CliError> {
    let (_, geom, _) = load_original(cfg)?;
    Ok(geom.to_json())
}

/// Renders a spec to `out`, optionally writing its geometry JSON too.
pub fn cmd_render(spec_path: &Path, out: &Path, geometry_out: Option<&Path>) -> Result<(), CliError> {
    let (img, geom) = render_chart(&load_spec(spec_path)?)?;
    img.save_png(out).map_err(|e| CliError::io(format!("{}: {e}", out.display())))?;
    if let Some(g) = geometry_out {
        write_file(g, geom.to_json().as_bytes())?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub spec: String,
    pub chart_type: ChartType,
    pub gap1: f64,
    pub gap2: f64,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchFailure {
    pub spec: String,
    pub kind: String,
    pub exit: i32,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeSummary {
    pub chart_type: ChartType,
    pub count: usize,
    pub mean_gap1: f64,
    pub mean_gap2: f64,
    pub mean_score: f64,
}

/// Deterministic batch summary; wall-clock times go to a separate file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub rows: Vec<BatchRow>,
    pub per_type: Vec<TypeSummary>,
    pub failures: Vec<BatchFailure>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BatchTiming {
    pub per_spec_seconds: BTreeMap<String, f64>,
    pub per_type_mean_seconds: BTreeMap<String, f64>,
}

/// Protects every `*.json` spec in `spec_dir` (sorted by file name) into
/// `out_dir/<stem>/`, then writes `summary.json` and `timing.json`.
/// Returns the summary and the exit code of the first failure, if any.
pub fn cmd_batch(spec_dir: &Path, out_dir: &Path, cfg: &RunConfig) -> Result<(BatchSummary, Option<i32>), CliError> {
    cfg.validate()?;
    let entries = fs::read_dir(spec_dir).map_err(|e| CliError::io(format!("{}: {e}", spec_dir.display())))?;
    let mut specs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "json"))
        .collect();
    specs.sort();
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(format!("{}: {e}", out_dir.display())))?;

    let mut summary = BatchSummary::default();
    let mut timing = BatchTiming::default();
    let mut type_times: BTreeMap<ChartType, Vec<f64>> = BTreeMap::new();
    let mut first_exit = None;
    for spec in &specs {
        let name = spec.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let stem = spec.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let run = RunConfig {
            input: Some(spec.clone()),
            output_dir: Some(out_dir.join(&stem)),
            mode: Some(InputMode::SpecInput),
            ..cfg.clone()
        };
        let start = Instant::now();
        match cmd_protect(&run, false) {
            Ok(o) => {
                let secs = start.elapsed().as_secs_f64();
                let chart_type = o.decoy.chart_type;
                let s = o.bundle.best.scores;
                summary.rows.push(BatchRow { spec: name.clone(), chart_type, gap1: s.gap1, gap2: s.gap2, score: s.score });
                timing.per_spec_seconds.insert(name, secs);
                type_times.entry(chart_type).or_default().push(secs);
            }
            Err(e) => {
                first_exit.get_or_insert(e.kind.exit_code());
                summary.failures.push(BatchFailure { spec: name, kind: e.kind.name().into(), exit: e.kind.exit_code(), message: e.message });
            }
        }
    }
    for t in ChartType::ALL {
        let rows: Vec<&BatchRow> = summary.rows.iter().filter(|r| r.chart_type == t).collect();
        if rows.is_empty() {
            continue;
        }
        let mean = |f: fn(&BatchRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / rows.len() as f64;
        summary.per_type.push(TypeSummary {
            chart_type: t,
            count: rows.len(),
            mean_gap1: mean(|r| r.gap1),
            mean_gap2: mean(|r| r.gap2),
            mean_score: mean(|r| r.score),
        });
    }
    for (t, v) in type_times {
        timing.per_type_mean_seconds.insert(t.name().into(), v.iter().sum::<f64>() / v.len() as f64);
    }
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    write_file(&out_dir.join("summary.json"), text.as_bytes())?;
    let mut text = serde_json::to_string_pretty(&timing).expect("timing serializes");
    text.push('\n');
    write_file(&out_dir.join("timing.json"), text.as_bytes())?;
    Ok((summary, first_exit))
}
