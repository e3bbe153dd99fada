//! Python bindings: scenarios, closed-loop runs, sweeps and the RCAC
//! recursion.

use std::path::PathBuf;

use adaptive_autopilot::rcac::{self, RcacHyper, RcacState, RetroSample};
use adaptive_autopilot::scenario::{
    self, metrics, read_telemetry_file, RunResult, ScenarioConfig, SweepConfig, TelemetryRecord,
};
use adaptive_autopilot::Error;
use nalgebra::DVector;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        Error::GimbalLock { .. } | Error::NonFinite { .. } | Error::GroundImpact { .. } => {
            PyRuntimeError::new_err(err.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Serialisable value to a native Python object through `json`.
fn to_object<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A scenario configuration.
#[pyclass(name = "Scenario", module = "pyautopilot")]
struct PyScenario {
    inner: ScenarioConfig,
}

#[pymethods]
impl PyScenario {
    /// Built-in preset, `nominal` by default.
    #[new]
    #[pyo3(signature = (preset = "nominal"))]
    fn new(preset: &str) -> PyResult<Self> {
        Ok(Self { inner: ScenarioConfig::preset(preset).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: ScenarioConfig::from_json(text).map_err(to_py)? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: ScenarioConfig::load(path).map_err(to_py)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(to_py)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[setter]
    fn set_name(&mut self, name: String) {
        self.inner.name = name;
    }

    #[getter]
    fn degradation_factor(&self) -> f64 {
        self.inner.degradation_factor
    }

    #[setter]
    fn set_degradation_factor(&mut self, value: f64) {
        self.inner.degradation_factor = value;
    }

    #[getter]
    fn adaptive(&self) -> bool {
        self.inner.adaptive
    }

    #[setter]
    fn set_adaptive(&mut self, value: bool) {
        self.inner.adaptive = value;
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, value: u64) {
        self.inner.seed = value;
    }

    #[getter]
    fn duration(&self) -> f64 {
        self.inner.duration
    }

    #[setter]
    fn set_duration(&mut self, value: f64) {
        self.inner.duration = value;
    }

    /// Flies the scenario in memory. The GIL is released while flying.
    fn simulate(&self, py: Python<'_>) -> PyResult<PyRunResult> {
        let cfg = self.inner.clone();
        let inner = py.detach(move || scenario::simulate(&cfg)).map_err(to_py)?;
        Ok(PyRunResult { inner })
    }

    /// Flies the scenario and writes telemetry and summary into `out_dir`.
    /// Returns the telemetry path.
    fn run(&self, py: Python<'_>, out_dir: PathBuf) -> PyResult<PathBuf> {
        let cfg = self.inner.clone();
        let (path, _) = py.detach(move || scenario::run_scenario(&cfg, &out_dir)).map_err(to_py)?;
        Ok(path)
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(name={:?}, degradation_factor={}, adaptive={})",
            self.inner.name, self.inner.degradation_factor, self.inner.adaptive
        )
    }
}

fn column(records: &[TelemetryRecord], name: &str) -> Option<Vec<f64>> {
    let get: fn(&TelemetryRecord) -> f64 = match name {
        "t" => |r| r.t,
        "north" => |r| r.north,
        "east" => |r| r.east,
        "down" => |r| r.down,
        "h" => |r| r.h,
        "airspeed" => |r| r.airspeed,
        "phi" => |r| r.phi,
        "theta" => |r| r.theta,
        "psi" => |r| r.psi,
        "phi_s" => |r| r.phi_s,
        "theta_s" => |r| r.theta_s,
        "h_s" => |r| r.h_s,
        "p" => |r| r.p,
        "q" => |r| r.q,
        "r" => |r| r.r,
        "aileron_left" => |r| r.aileron_left,
        "aileron_right" => |r| r.aileron_right,
        "elevator" => |r| r.elevator,
        "rudder" => |r| r.rudder,
        "throttle" => |r| r.throttle,
        "u_theta" => |r| r.u_theta,
        "u_phi" => |r| r.u_phi,
        "gain_theta" => |r| r.gain_theta,
        "gain_phi" => |r| r.gain_phi,
        "xtrack" => |r| r.xtrack,
        _ => return None,
    };
    Some(records.iter().map(get).collect())
}

/// Telemetry and summary of one run.
#[pyclass(name = "RunResult", module = "pyautopilot")]
struct PyRunResult {
    inner: RunResult,
}

#[pymethods]
impl PyRunResult {
    /// Summary as a dict.
    #[getter]
    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_object(py, &self.inner.summary)
    }

    #[getter]
    fn failed(&self) -> bool {
        self.inner.summary.status.is_failed()
    }

    /// One telemetry column by CSV header name.
    fn column(&self, name: &str) -> PyResult<Vec<f64>> {
        column(&self.inner.telemetry, name).ok_or_else(|| PyValueError::new_err(format!("unknown column {name:?}")))
    }

    fn phases(&self) -> Vec<&'static str> {
        self.inner.telemetry.iter().map(|r| r.phase.name()).collect()
    }

    fn write_csv(&self, path: PathBuf) -> PyResult<()> {
        scenario::write_telemetry_file(&self.inner.telemetry, path).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.telemetry.len()
    }
}

/// One RCAC channel with a caller-supplied regressor.
#[pyclass(name = "RcacChannel", module = "pyautopilot")]
struct PyRcacChannel {
    hyper: RcacHyper,
    state: RcacState,
}

#[pymethods]
impl PyRcacChannel {
    #[new]
    #[pyo3(signature = (dim, p0 = 1.0, ru = 0.001, rz = 1.0, sigma = -0.1, theta0 = None, theta_max = None))]
    fn new(
        dim: usize,
        p0: f64,
        ru: f64,
        rz: f64,
        sigma: f64,
        theta0: Option<Vec<f64>>,
        theta_max: Option<Vec<f64>>,
    ) -> PyResult<Self> {
        let hyper = RcacHyper { theta0: theta0.unwrap_or_default(), theta_max, ..RcacHyper::new(p0, ru, rz, sigma) };
        hyper.validate(dim).map_err(to_py)?;
        let state = RcacState::new(dim, &hyper);
        Ok(Self { hyper, state })
    }

    /// One step with performance `z` and regressor `phi`; returns the control.
    fn update(&mut self, z: f64, phi: Vec<f64>) -> PyResult<f64> {
        if phi.len() != self.state.dim() {
            return Err(PyValueError::new_err(format!("regressor must have {} entries", self.state.dim())));
        }
        Ok(self.state.update(z, &DVector::from_vec(phi), &self.hyper))
    }

    #[getter]
    fn theta(&self) -> Vec<f64> {
        self.state.theta.as_slice().to_vec()
    }

    /// Covariance as a list of rows.
    #[getter]
    fn p(&self) -> Vec<Vec<f64>> {
        self.state.p.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    #[getter]
    fn frozen(&self) -> bool {
        self.state.frozen.is_some()
    }
}

/// Minimiser of the cumulative retrospective cost over
/// `[(phi_prev, u_prev, z), ...]`.
#[pyfunction]
#[pyo3(signature = (history, p0 = 1.0, ru = 0.001, rz = 1.0, sigma = -0.1))]
fn batch_oracle(history: Vec<(Vec<f64>, f64, f64)>, p0: f64, ru: f64, rz: f64, sigma: f64) -> PyResult<Vec<f64>> {
    let Some(dim) = history.first().map(|h| h.0.len()) else {
        return Err(PyValueError::new_err("history must not be empty"));
    };
    let hyper = RcacHyper::new(p0, ru, rz, sigma);
    hyper.validate(dim).map_err(to_py)?;
    if history.iter().any(|h| h.0.len() != dim) {
        return Err(PyValueError::new_err("regressors must share one length"));
    }
    let samples: Vec<RetroSample> =
        history.into_iter().map(|(phi, u, z)| RetroSample { phi_prev: DVector::from_vec(phi), u_prev: u, z }).collect();
    Ok(rcac::batch_oracle(&samples, &hyper).as_slice().to_vec())
}

/// Metrics of a telemetry CSV as a dict, with the window record count.
#[pyfunction]
fn telemetry_metrics<'py>(py: Python<'py>, path: PathBuf) -> PyResult<(Bound<'py, PyAny>, usize)> {
    let records = read_telemetry_file(path).map_err(to_py)?;
    let (m, n) = metrics(&records).map_err(to_py)?;
    Ok((to_object(py, &m)?, n))
}

/// Runs a sweep file into `out_dir`; returns the normalised summaries.
#[pyfunction]
fn sweep<'py>(py: Python<'py>, path: PathBuf, out_dir: PathBuf) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SweepConfig::load(path).map_err(to_py)?;
    let rows = py.detach(move || scenario::sweep(&cfg, &out_dir)).map_err(to_py)?;
    to_object(py, &rows)
}

#[pyfunction]
fn presets() -> Vec<&'static str> {
    ScenarioConfig::PRESETS.to_vec()
}

#[pymodule]
fn pyautopilot(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyRunResult>()?;
    m.add_class::<PyRcacChannel>()?;
    m.add_function(wrap_pyfunction!(batch_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(telemetry_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    Ok(())
}
