use std::path::Path;
use std::process::Command;

use adaptive_autopilot::scenario::{
    emit_plots, ground_trace_svg, read_telemetry_file, simulate, sweep, ScenarioConfig, SweepBase, SweepConfig,
};
use adaptive_autopilot::Error;

fn autopilot(args: &[&str], root: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_autopilot"))
        .args(args)
        .env("AUTOPILOT_OUTPUT_ROOT", root)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn exit_codes_follow_run_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.json", r#"{"name": "ok", "duration": 5.0}"#);
    let bad = write(dir.path(), "bad.json", r#"{"name": "bad", "dt": -1.0}"#);
    let crash = write(
        dir.path(),
        "crash.json",
        r#"{"name": "crash", "duration": 30.0,
            "fault": {"surface": "elevator", "stuck_value": 1.0, "t_start": 0.0}}"#,
    );
    assert_eq!(autopilot(&["validate", &ok], dir.path()).0, 0);
    assert_eq!(autopilot(&["validate", &bad], dir.path()).0, 1);
    assert_eq!(autopilot(&["run", &bad], dir.path()).0, 1);
    assert_eq!(autopilot(&["run", "/no/such/file.json"], dir.path()).0, 1);
    assert_eq!(autopilot(&["run", &ok], dir.path()).0, 0);
    assert!(dir.path().join("ok.csv").exists());
    assert!(dir.path().join("ok_ground.svg").exists());

    let (code, _) = autopilot(&["run", &crash], dir.path());
    assert_eq!(code, 2);
    // failed runs still leave their telemetry behind
    assert!(!read_telemetry_file(dir.path().join("crash.csv")).unwrap().is_empty());
}

#[test]
fn seeded_runs_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "noisy.json",
        r#"{"name": "noisy", "duration": 4.0, "noise": {"attitude": 0.002, "position": 0.1}}"#,
    );
    let read = |sub: &str, seed: &str| {
        let root = dir.path().join(sub);
        assert_eq!(autopilot(&["run", &cfg, "--seed", seed], &root).0, 0);
        std::fs::read(root.join("noisy.csv")).unwrap()
    };
    let a = read("a", "5");
    assert_eq!(a, read("b", "5"));
    assert_ne!(a, read("c", "6"));
}

#[test]
fn plot_verb_renders_existing_telemetry() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.json", r#"{"name": "p", "duration": 3.0}"#);
    assert_eq!(autopilot(&["run", &cfg], dir.path()).0, 0);
    let csv = dir.path().join("p.csv");
    let out = dir.path().join("plots");
    let (code, _) = autopilot(&["plot", csv.to_str().unwrap(), "--out", out.to_str().unwrap()], dir.path());
    assert_eq!(code, 0);
    let gains = std::fs::read_to_string(out.join("p_gains.svg")).unwrap();
    assert!(gains.contains("stroke-dasharray"));

    let empty = write(dir.path(), "empty.csv", "");
    assert_eq!(autopilot(&["plot", &empty], dir.path()).0, 1);
}

#[test]
fn ground_trace_has_one_polyline_per_run() {
    let mut cfg = ScenarioConfig::preset("nominal").unwrap();
    cfg.duration = 20.0;
    let a = simulate(&cfg).unwrap();
    cfg.degradation_factor = 0.5;
    let b = simulate(&cfg).unwrap();
    let mission = cfg.mission.resolve().unwrap();
    let svg = ground_trace_svg(&[("a", &a.telemetry), ("b", &b.telemetry)], Some(&mission)).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(matches!(emit_plots(&[], &a.summary, None, Path::new(".")), Err(Error::EmptyTelemetry)));
}

fn small_sweep(factors: Vec<f64>) -> SweepConfig {
    let mut base = ScenarioConfig::preset("nominal").unwrap();
    base.duration = 40.0;
    base.noise.attitude = 0.001;
    SweepConfig::new("small", SweepBase::Inline(Box::new(base)), factors, vec![false, true], vec![false])
}

#[test]
fn sweep_writes_normalised_table_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_sweep(vec![0.5, 1.0]);
    let rows = sweep(&cfg, &dir.path().join("a")).unwrap();
    assert_eq!(rows.len(), 4);
    let baseline = rows[0].normalized.expect("baseline has a metric window");
    assert_eq!((baseline.j_traj, baseline.j_phi, baseline.j_theta), (1.0, 1.0, 1.0));
    for f in ["summary.csv", "summary.svg", "ground_traces.svg", "nominal_ad0.5_adaptive_healthy_ground.svg"] {
        assert!(dir.path().join("a").join(f).exists(), "{f} missing");
    }
    sweep(&cfg, &dir.path().join("b")).unwrap();
    let table = |d: &str| std::fs::read(dir.path().join(d).join("summary.csv")).unwrap();
    assert_eq!(table("a"), table("b"));
}

#[test]
fn sweep_without_baseline_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_sweep(vec![0.5]);
    assert!(matches!(sweep(&cfg, dir.path()), Err(Error::MissingBaseline)));
    let file = write(dir.path(), "s.json", r#"{"base": "nominal", "degradation_factors": [0.5]}"#);
    assert_eq!(autopilot(&["sweep", &file], dir.path()).0, 1);
}

#[test]
fn bundled_scenario_files_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.contains("sweep") {
            SweepConfig::load(&path).unwrap().expand().unwrap();
        } else {
            ScenarioConfig::load(&path).unwrap().validate().unwrap();
        }
    }
}
