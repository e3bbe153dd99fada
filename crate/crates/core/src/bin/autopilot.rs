//! Command-line front end for scenarios and sweeps.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 failed run.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adaptive_autopilot::airframe::trim_search;
use adaptive_autopilot::airframe::Environment;
use adaptive_autopilot::mission::Mission;
use adaptive_autopilot::scenario::{
    emit_plots, output_dir, read_telemetry_file, run_scenario, summarize, sweep, RunStatus, RunSummary, ScenarioConfig,
    SweepBase, SweepConfig,
};
use adaptive_autopilot::Result;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "autopilot", version, about = "Fixed-wing autopilot scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fly one scenario (JSON file or preset name) and write telemetry, summary and plots.
    Run {
        scenario: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; overrides the environment and the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fly the cartesian product of a sweep file and write normalised summaries.
    Sweep {
        sweep: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario without flying it.
    Validate { scenario: String },
    /// Render SVG plots from a telemetry CSV.
    Plot {
        telemetry: PathBuf,
        /// Mission drawn as reference: preset name or JSON file.
        #[arg(long, default_value = "sim_profile")]
        mission: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in scenario presets.
    Presets,
}

fn load_scenario(arg: &str) -> Result<ScenarioConfig> {
    let path = Path::new(arg);
    if !path.exists() && ScenarioConfig::PRESETS.contains(&arg) {
        return ScenarioConfig::preset(arg);
    }
    ScenarioConfig::load(path)
}

fn load_mission(arg: &str) -> Result<Mission> {
    let path = Path::new(arg);
    if path.exists() {
        let mission: Mission = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        mission.validate()?;
        return Ok(mission);
    }
    Mission::builtin(arg)
}

fn report(summary: &RunSummary) {
    match &summary.metrics {
        Some(m) => println!(
            "{}: {:?} J_traj={:.4} m J_phi={:.5} rad J_theta={:.5} rad (n={})",
            summary.name, summary.status, m.j_traj, m.j_phi, m.j_theta, summary.n
        ),
        None => println!("{}: {:?} (empty metric window)", summary.name, summary.status),
    }
}

fn run(scenario: &str, seed: Option<u64>, out: Option<PathBuf>) -> Result<ExitCode> {
    let mut cfg = load_scenario(scenario)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let dir = out.unwrap_or_else(|| output_dir(&cfg));
    let (csv, summary) = run_scenario(&cfg, &dir)?;
    report(&summary);
    println!("telemetry: {}", csv.display());
    let telemetry = read_telemetry_file(&csv)?;
    if !telemetry.is_empty() {
        let mission = cfg.mission.resolve()?;
        for p in emit_plots(&telemetry, &summary, Some(&mission), &dir)? {
            println!("plot: {}", p.display());
        }
    }
    Ok(if summary.status.is_failed() { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn run_sweep(path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<ExitCode> {
    let mut cfg = SweepConfig::load(path)?;
    if let Some(seed) = seed {
        let mut base = cfg.base.resolve(cfg.source_dir.as_deref())?;
        base.seed = seed;
        cfg.base = SweepBase::Inline(Box::new(base));
    }
    let dir = out.unwrap_or_else(|| cfg.output_dir());
    let summaries = sweep(&cfg, &dir)?;
    for s in &summaries {
        report(s);
        if let Some(n) = s.normalized {
            println!("    normalised: traj={:.3} phi={:.3} theta={:.3}", n.j_traj, n.j_phi, n.j_theta);
        }
    }
    println!("summary: {}", dir.join("summary.csv").display());
    // a failed degraded run is a result; only a failed baseline fails the sweep
    Ok(if summaries[0].status.is_failed() { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn validate(scenario: &str) -> Result<ExitCode> {
    let cfg = load_scenario(scenario)?;
    cfg.validate()?;
    let params = cfg.airframe_params()?;
    let mission = cfg.mission.resolve()?;
    let trim = trim_search(&params, &Environment::default(), mission.cruise_speed)?;
    println!(
        "{}: ok (trim at {} m/s: alpha={:.4} rad, throttle={:.3})",
        cfg.name, mission.cruise_speed, trim.alpha, trim.command.throttle
    );
    Ok(ExitCode::SUCCESS)
}

fn plot(telemetry: &Path, mission: &str, out: Option<PathBuf>) -> Result<ExitCode> {
    let records = read_telemetry_file(telemetry)?;
    let stem = telemetry.file_stem().and_then(|s| s.to_str()).unwrap_or("telemetry").to_string();
    let summary_path = telemetry.with_file_name(format!("{stem}.summary.json"));
    let summary: RunSummary = if summary_path.exists() {
        serde_json::from_str(&std::fs::read_to_string(&summary_path)?)?
    } else {
        summarize(&ScenarioConfig::baseline(stem), RunStatus::Completed, &records)
    };
    let mission = load_mission(mission)?;
    let dir = out.unwrap_or_else(|| telemetry.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf));
    for p in emit_plots(&records, &summary, Some(&mission), &dir)? {
        println!("plot: {}", p.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, seed, out } => run(&scenario, seed, out),
        Command::Sweep { sweep, seed, out } => run_sweep(&sweep, seed, out),
        Command::Validate { scenario } => validate(&scenario),
        Command::Plot { telemetry, mission, out } => plot(&telemetry, &mission, out),
        Command::Presets => {
            for p in ScenarioConfig::PRESETS {
                println!("{p}");
            }
            Ok(ExitCode::SUCCESS)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
