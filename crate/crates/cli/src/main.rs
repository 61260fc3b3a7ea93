use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use decoyvis_cli::commands::{cmd_batch, cmd_inspect, cmd_preview, cmd_protect, cmd_render, cmd_score};
use decoyvis_cli::config::{RunConfig, CONFIG_ENV};
use decoyvis_cli::CliError;
use decoyvis_core::chartgen::ChartType;
use decoyvis_core::optimizer::GridPreset;

#[derive(Parser)]
#[command(name = "decoyvis", version, about = "Protect charts from shoulder surfing with a distance-dependent decoy overlay")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured grid preset.
    #[arg(long, value_parser = parse_preset)]
    grid_preset: Option<GridPreset>,
    /// Chart type of a PNG input.
    #[arg(long, value_parser = parse_chart_type)]
    chart_type: Option<ChartType>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load_or_default(self.config.as_deref())?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(p) = self.grid_preset {
            cfg.grid.preset = Some(p);
        }
        if let Some(t) = self.chart_type {
            cfg.chart_type = Some(t);
        }
        Ok(cfg)
    }
}

fn parse_preset(s: &str) -> Result<GridPreset, String> {
    s.parse().map_err(|e: decoyvis_core::Error| e.to_string())
}

fn parse_chart_type(s: &str) -> Result<ChartType, String> {
    s.parse().map_err(|e: decoyvis_core::Error| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Render a chart spec to PNG.
    Render {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the mark geometry as JSON.
        #[arg(long)]
        geometry: Option<PathBuf>,
    },
    /// Build a protected chart and write its bundle directory.
    Protect {
        /// Chart spec JSON or PNG; defaults to the configured input.
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write decoy.json with the decoy geometry and hues.
        #[arg(long)]
        emit_decoy: bool,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Simulate viewing a bundle's protected image from some distance.
    Preview {
        bundle: PathBuf,
        #[arg(long)]
        distance: f64,
        /// Output PNG; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the geometry of a spec or PNG as JSON.
    Inspect {
        input: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Score an original, decoy and protected PNG triple.
    Score {
        original: PathBuf,
        decoy: PathBuf,
        protected: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Protect every spec in a directory and summarize.
    Batch {
        spec_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).expect("output serializes");
    writeln!(std::io::stdout(), "{text}").map_err(|e| CliError::io(format!("stdout: {e}")))
}

fn run(cli: Cli) -> Result<Option<i32>, CliError> {
    match cli.command {
        Command::Render { spec, out, geometry } => cmd_render(&spec, &out, geometry.as_deref())?,
        Command::Protect { input, out, emit_decoy, cfg } => {
            let mut run = cfg.load()?;
            if input.is_some() {
                run.input = input;
            }
            if out.is_some() {
                run.output_dir = out;
            }
            let o = cmd_protect(&run, emit_decoy)?;
            let r = &o.report;
            print_json(&serde_json::json!({ "params": r.params, "gap1": r.gap1, "gap2": r.gap2, "score": r.score }))?;
        }
        Command::Preview { bundle, distance, out } => {
            let img = cmd_preview(&bundle, distance)?;
            match out {
                Some(p) => img.save_png(&p).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?,
                None => {
                    let bytes = img.to_png_bytes()?;
                    std::io::stdout().write_all(&bytes).map_err(|e| CliError::io(format!("stdout: {e}")))?;
                }
            }
        }
        Command::Inspect { input, cfg } => {
            let mut run = cfg.load()?;
            run.input = Some(input);
            let text = cmd_inspect(&run)?;
            writeln!(std::io::stdout(), "{text}").map_err(|e| CliError::io(format!("stdout: {e}")))?;
        }
        Command::Score { original, decoy, protected, cfg } => print_json(&cmd_score(&original, &decoy, &protected, &cfg.load()?)?)?,
        Command::Batch { spec_dir, out, cfg } => {
            let (summary, failed) = cmd_batch(&spec_dir, Path::new(&out), &cfg.load()?)?;
            print_json(&summary)?;
            return Ok(failed);
        }
    }
    Ok(None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(code)) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.stderr_line());
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
