use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ScenarioConfig, ScenarioFault};
use super::plot::{emit_plots, ground_trace_svg, summary_bars_svg};
use super::runner::{simulate, RunResult, RunStatus, RunSummary, OUTPUT_ROOT_ENV};
use super::telemetry::write_telemetry_file;
use crate::{Error, Result};

/// Base scenario of a sweep: a preset name, a path to a scenario file, or an
/// inline scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepBase {
    Named(String),
    Inline(Box<ScenarioConfig>),
}

impl Default for SweepBase {
    fn default() -> Self {
        SweepBase::Named("nominal".into())
    }
}

impl SweepBase {
    /// Relative paths resolve against `base_dir`.
    pub fn resolve(&self, base_dir: Option<&Path>) -> Result<ScenarioConfig> {
        match self {
            SweepBase::Inline(cfg) => Ok((**cfg).clone()),
            SweepBase::Named(name) if ScenarioConfig::PRESETS.contains(&name.as_str()) => ScenarioConfig::preset(name),
            SweepBase::Named(path) => {
                let path = PathBuf::from(path);
                match base_dir {
                    Some(dir) if path.is_relative() => ScenarioConfig::load(dir.join(path)),
                    _ => ScenarioConfig::load(path),
                }
            }
        }
    }
}

fn default_factors() -> Vec<f64> {
    vec![1.0]
}

fn default_flags() -> Vec<bool> {
    vec![false]
}

/// Cartesian sweep over degradation factor, adaptation and fault injection.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_sweep_name")]
    pub name: String,
    #[serde(default)]
    pub base: SweepBase,
    #[serde(default = "default_factors")]
    pub degradation_factors: Vec<f64>,
    #[serde(default = "default_flags")]
    pub adaptive: Vec<bool>,
    #[serde(default = "default_flags")]
    pub fault: Vec<bool>,
    /// Fault used when the fault axis is on; the base scenario's fault, or a
    /// stuck left aileron from loiter entry, if absent.
    #[serde(default)]
    pub fault_spec: Option<ScenarioFault>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Directory of the sweep file, for relative base paths.
    #[serde(skip)]
    pub source_dir: Option<PathBuf>,
}

fn default_sweep_name() -> String {
    "sweep".into()
}

impl SweepConfig {
    pub fn new(
        name: impl Into<String>,
        base: SweepBase,
        degradation_factors: Vec<f64>,
        adaptive: Vec<bool>,
        fault: Vec<bool>,
    ) -> Self {
        Self {
            name: name.into(),
            base,
            degradation_factors,
            adaptive,
            fault,
            fault_spec: None,
            output_dir: None,
            source_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::from_json(&std::fs::read_to_string(path)?)?;
        cfg.source_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Whether the settings include degradation 1, adaptation off and no
    /// fault.
    pub fn has_baseline(&self) -> bool {
        self.degradation_factors.contains(&1.0) && self.adaptive.contains(&false) && self.fault.contains(&false)
    }

    /// Expanded run configurations; the baseline is first.
    pub fn expand(&self) -> Result<Vec<ScenarioConfig>> {
        if self.degradation_factors.is_empty() || self.adaptive.is_empty() || self.fault.is_empty() {
            return Err(Error::invalid("sweep axes must not be empty"));
        }
        if !self.has_baseline() {
            return Err(Error::MissingBaseline);
        }
        let base = self.base.resolve(self.source_dir.as_deref())?;
        let fault = self.fault_spec.or(base.fault).unwrap_or_else(ScenarioFault::stuck_left_aileron);
        let stem = base.name.clone();
        let mut runs = Vec::new();
        for &alpha in &self.degradation_factors {
            for &adaptive in &self.adaptive {
                for &faulty in &self.fault {
                    let mut cfg = base.clone();
                    cfg.name = run_name(&stem, alpha, adaptive, faulty);
                    cfg.degradation_factor = alpha;
                    cfg.adaptive = adaptive;
                    cfg.fault = faulty.then_some(fault);
                    cfg.validate()?;
                    runs.push(cfg);
                }
            }
        }
        let baseline = runs.iter().position(is_baseline).ok_or(Error::MissingBaseline)?;
        let first = runs.remove(baseline);
        runs.insert(0, first);
        Ok(runs)
    }

    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) if !root.is_empty() => PathBuf::from(root),
            _ => self.output_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(&self.name)),
        }
    }
}

fn is_baseline(cfg: &ScenarioConfig) -> bool {
    cfg.degradation_factor == 1.0 && !cfg.adaptive && cfg.fault.is_none()
}

pub fn run_name(stem: &str, alpha: f64, adaptive: bool, fault: bool) -> String {
    format!(
        "{stem}_ad{alpha}_{}_{}",
        if adaptive { "adaptive" } else { "nominal" },
        if fault { "fault" } else { "healthy" }
    )
}

/// Flies every run of the sweep and normalises each summary against the
/// baseline run. Order follows [`SweepConfig::expand`].
pub fn sweep_runs(cfg: &SweepConfig) -> Result<Vec<RunResult>> {
    let configs = cfg.expand()?;
    let mut results = configs.par_iter().map(simulate).collect::<Result<Vec<_>>>()?;
    let baseline = results[0].summary.clone();
    for r in &mut results {
        r.summary.normalize_against(&baseline);
    }
    Ok(results)
}

/// One row of `summary.csv`. Empty cells mean the metric window was empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub name: String,
    pub status: String,
    pub reason: String,
    pub degradation_factor: f64,
    pub adaptive: bool,
    pub fault: bool,
    pub n: usize,
    pub j_traj: Option<f64>,
    pub j_phi: Option<f64>,
    pub j_theta: Option<f64>,
    pub norm_j_traj: Option<f64>,
    pub norm_j_phi: Option<f64>,
    pub norm_j_theta: Option<f64>,
    pub max_abs_phi: f64,
    pub gain_theta_end: Option<f64>,
    pub gain_phi_end: Option<f64>,
}

impl From<&RunSummary> for SweepRow {
    fn from(s: &RunSummary) -> Self {
        let (status, reason) = match &s.status {
            RunStatus::Completed => ("completed", String::new()),
            RunStatus::Incomplete => ("incomplete", String::new()),
            RunStatus::Failed(r) => ("failed", r.clone()),
        };
        Self {
            name: s.name.clone(),
            status: status.into(),
            reason,
            degradation_factor: s.degradation_factor,
            adaptive: s.adaptive,
            fault: s.fault,
            n: s.n,
            j_traj: s.metrics.map(|m| m.j_traj),
            j_phi: s.metrics.map(|m| m.j_phi),
            j_theta: s.metrics.map(|m| m.j_theta),
            norm_j_traj: s.normalized.map(|m| m.j_traj),
            norm_j_phi: s.normalized.map(|m| m.j_phi),
            norm_j_theta: s.normalized.map(|m| m.j_theta),
            max_abs_phi: s.max_abs_phi,
            gain_theta_end: s.loiter_end_gains.map(|g| g.theta),
            gain_phi_end: s.loiter_end_gains.map(|g| g.phi),
        }
    }
}

/// Runs the sweep and writes into `out_dir`: per-run telemetry and plots,
/// `summary.csv`, `summary.svg` and `ground_traces.svg` with every run.
pub fn sweep(cfg: &SweepConfig, out_dir: &Path) -> Result<Vec<RunSummary>> {
    let results = sweep_runs(cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let base = cfg.base.resolve(cfg.source_dir.as_deref())?;
    let mission = base.mission.resolve()?;
    for r in &results {
        write_telemetry_file(&r.telemetry, out_dir.join(format!("{}.csv", r.summary.name)))?;
        if !r.telemetry.is_empty() {
            emit_plots(&r.telemetry, &r.summary, Some(&mission), out_dir)?;
        }
    }
    let summaries: Vec<RunSummary> = results.iter().map(|r| r.summary.clone()).collect();
    let mut w = csv::Writer::from_path(out_dir.join("summary.csv"))?;
    for s in &summaries {
        w.serialize(SweepRow::from(s))?;
    }
    w.flush()?;
    std::fs::write(out_dir.join("summary.json"), serde_json::to_string_pretty(&summaries)?)?;
    std::fs::write(out_dir.join("summary.svg"), summary_bars_svg(&summaries)?)?;
    let traces: Vec<(&str, &[_])> = results.iter().map(|r| (r.summary.name.as_str(), r.telemetry.as_slice())).collect();
    std::fs::write(out_dir.join("ground_traces.svg"), ground_trace_svg(&traces, Some(&mission))?)?;
    Ok(summaries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(factors: Vec<f64>, adaptive: Vec<bool>) -> SweepConfig {
        let mut base = ScenarioConfig::baseline("t");
        base.duration = 0.4;
        SweepConfig::new("s", SweepBase::Inline(Box::new(base)), factors, adaptive, vec![false])
    }

    #[test]
    fn cardinality_is_product_with_baseline_first() {
        let runs = short(vec![0.0, 0.5, 1.0], vec![true, false]).expand().unwrap();
        assert_eq!(runs.len(), 6);
        assert!(is_baseline(&runs[0]));
        assert_eq!(runs[0].name, "t_ad1_nominal_healthy");
    }

    #[test]
    fn missing_baseline_is_error() {
        assert!(matches!(short(vec![0.5], vec![true, false]).expand(), Err(Error::MissingBaseline)));
        assert!(matches!(short(vec![1.0], vec![true]).expand(), Err(Error::MissingBaseline)));
    }

    #[test]
    fn named_base_resolves_presets() {
        let cfg = SweepConfig::from_json(r#"{"base": "adaptive", "degradation_factors": [1]}"#).unwrap();
        assert_eq!(cfg.base.resolve(None).unwrap().name, "adaptive");
        assert!(SweepConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }
}
