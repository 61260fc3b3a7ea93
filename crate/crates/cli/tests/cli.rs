use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use decoyvis_cli::commands::{cmd_preview, cmd_protect, cmd_score};
use decoyvis_cli::config::RunConfig;
use decoyvis_core::imageops::RasterImage;
use decoyvis_core::optimizer::BUNDLE_FILES;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn spec(name: &str) -> PathBuf {
    fixtures().join("specs").join(format!("{name}.json"))
}

fn fast_config() -> RunConfig {
    RunConfig::load(&fixtures().join("fast.toml")).unwrap()
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decoyvis")).args(args).env_remove("DECOYVIS_CONFIG").output().unwrap()
}

fn stderr_line(o: &Output) -> String {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "stderr: {text}");
    text.trim_end().to_string()
}

fn protect_into(name: &str, dir: &Path) -> RunConfig {
    let cfg = RunConfig { input: Some(spec(name)), output_dir: Some(dir.to_path_buf()), ..fast_config() };
    cmd_protect(&cfg, false).unwrap();
    cfg
}

#[test]
fn bundle_has_all_files_and_previews_match() {
    let tmp = tempfile::tempdir().unwrap();
    protect_into("bar", tmp.path());
    for f in BUNDLE_FILES {
        assert!(tmp.path().join(f).is_file(), "{f}");
    }
    let close = cmd_preview(tmp.path(), 30.0).unwrap();
    assert_eq!(close.to_png_bytes().unwrap(), fs::read(tmp.path().join("preview_close.png")).unwrap());
    let far = cmd_preview(tmp.path(), 90.0).unwrap();
    assert_eq!(far.to_png_bytes().unwrap(), fs::read(tmp.path().join("preview_far.png")).unwrap());
    let mid = cmd_preview(tmp.path(), 60.0).unwrap();
    assert!(mid.width() < close.width() && mid.width() > far.width());
    assert!(mid.height() < close.height() && mid.height() > far.height());
}

#[test]
fn score_command_identities() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = protect_into("line", tmp.path());
    let p = |f: &str| tmp.path().join(f);
    let same = cmd_score(&p("original.png"), &p("decoy.png"), &p("original.png"), &cfg).unwrap();
    assert!(same.gap1.abs() < 1e-9);
    let triple = cmd_score(&p("original.png"), &p("decoy.png"), &p("protected.png"), &cfg).unwrap();
    for v in [triple.gap1, triple.gap2, triple.score, triple.gamma_close, triple.gamma_far] {
        assert!(v.is_finite());
    }
    assert!(triple.gamma_far < triple.gamma_close);
    cfg.weights.alpha = 0.0;
    cfg.weights.beta = 0.0;
    assert_eq!(cmd_score(&p("original.png"), &p("decoy.png"), &p("protected.png"), &cfg).unwrap().score, 0.0);
}

#[test]
fn binary_protect_and_preview() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("b");
    let cfg = fixtures().join("fast.toml");
    let o = bin(&["protect", spec("scatter").to_str().unwrap(), "--out", out.to_str().unwrap(), "--config", cfg.to_str().unwrap(), "--emit-decoy"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(summary["score"].is_number());
    assert!(out.join("decoy.json").is_file());
    let o = bin(&["preview", out.to_str().unwrap(), "--distance", "90"]);
    assert!(o.status.success());
    assert_eq!(o.stdout, fs::read(out.join("preview_far.png")).unwrap());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = fixtures().join("fast.toml");
    let cfg = cfg.to_str().unwrap();

    // Pie images cannot be extracted.
    let pie_png = tmp.path().join("pie.png");
    let o = bin(&["render", spec("pie").to_str().unwrap(), "--out", pie_png.to_str().unwrap()]);
    assert!(o.status.success());
    let out = tmp.path().join("x");
    let o = bin(&["protect", pie_png.to_str().unwrap(), "--chart-type", "pie", "--out", out.to_str().unwrap(), "--config", cfg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr_line(&o).starts_with("error kind=extraction exit=3 message="));

    // Image input without a chart type is a validation error.
    let o = bin(&["protect", pie_png.to_str().unwrap(), "--out", out.to_str().unwrap(), "--config", cfg]);
    assert_eq!(o.status.code(), Some(2));
    stderr_line(&o);

    let o = bin(&["preview", tmp.path().join("missing").to_str().unwrap(), "--distance", "30"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr_line(&o).starts_with("error kind=io exit=4"));

    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "seed = \"seven\"\n").unwrap();
    let o = bin(&["protect", spec("bar").to_str().unwrap(), "--out", out.to_str().unwrap(), "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    stderr_line(&o);

    let o = bin(&["protect", tmp.path().join("nope.json").to_str().unwrap(), "--out", out.to_str().unwrap(), "--config", cfg]);
    assert_eq!(o.status.code(), Some(4));

    // Score with mismatched sizes.
    let small = tmp.path().join("small.png");
    RasterImage::filled(40, 40, [255, 255, 255, 255]).unwrap().save_png(&small).unwrap();
    let o = bin(&["score", pie_png.to_str().unwrap(), pie_png.to_str().unwrap(), small.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    stderr_line(&o);
}

#[test]
fn config_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("b");
    let o = Command::new(env!("CARGO_BIN_EXE_decoyvis"))
        .args(["protect", spec("bar").to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "11"])
        .env("DECOYVIS_CONFIG", fixtures().join("fast.toml"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 11);
    assert_eq!(report["candidates_evaluated"], 16);
}

#[test]
fn inspect_prints_geometry() {
    let o = bin(&["inspect", spec("bar").to_str().unwrap()]);
    assert!(o.status.success());
    let g: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(g["chart_type"], "bar");
}

#[test]
fn batch_runs_and_summarizes() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = tmp.path().join("out");
    let cfg = fixtures().join("fast.toml");
    let o = bin(&["batch", empty.to_str().unwrap(), "--out", out.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s["rows"].as_array().unwrap().len(), 0);

    let specs = tmp.path().join("specs");
    fs::create_dir(&specs).unwrap();
    fs::copy(spec("bar"), specs.join("a_bar.json")).unwrap();
    fs::write(specs.join("b_broken.json"), "{}").unwrap();
    let o = bin(&["batch", specs.to_str().unwrap(), "--out", out.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s["rows"][0]["spec"], "a_bar.json");
    assert_eq!(s["failures"][0]["spec"], "b_broken.json");
    assert_eq!(s["per_type"].as_array().unwrap().len(), 1);
    assert!(out.join("timing.json").is_file());
    assert!(out.join("a_bar").join("report.json").is_file());
}
