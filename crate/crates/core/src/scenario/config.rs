use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::airframe::{AircraftParams, FaultConfig, NoiseSpec, Surface};
use crate::attitude::{AttitudeConfig, AttitudeGains};
use crate::mission::Mission;
use crate::position::PositionConfig;
use crate::rcac::{ChannelId, RcacBank, RcacChannel, RcacHyper, RegressorKind};
use crate::{Error, Result};

/// Multiple of the nominal fixed gain used as the default adaptive-gain bound.
pub const DEFAULT_GAIN_BOUND_FACTOR: f64 = 10.0;

/// Hyperparameters and switch for one adaptive channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(rename = "P0")]
    pub p0: f64,
    #[serde(rename = "Ru")]
    pub ru: f64,
    #[serde(rename = "Rz")]
    pub rz: f64,
    pub sigma: f64,
    #[serde(default)]
    pub theta0: Vec<f64>,
    /// Absent means the default bound derived from the nominal gains.
    #[serde(default)]
    pub theta_max: Option<Vec<f64>>,
}

fn yes() -> bool {
    true
}

impl ChannelConfig {
    pub fn new(p0: f64, ru: f64, rz: f64, sigma: f64) -> Self {
        Self { enabled: true, p0, ru, rz, sigma, theta0: Vec::new(), theta_max: None }
    }

    fn hyper(&self, default_bound: Vec<f64>) -> RcacHyper {
        RcacHyper {
            p0: self.p0,
            ru: self.ru,
            rz: self.rz,
            sigma: self.sigma,
            theta0: self.theta0.clone(),
            theta_max: Some(self.theta_max.clone().unwrap_or(default_bound)),
        }
    }
}

/// Adaptive channel settings. The attitude channels default to the
/// simulation hyperparameter set (`P0 = 1`, `Ru = 0.001`, `Rz = 1`,
/// `sigma = -0.1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RcacConfig {
    pub theta: ChannelConfig,
    pub phi: ChannelConfig,
    pub omega_x: ChannelConfig,
    pub omega_y: ChannelConfig,
    pub omega_z: ChannelConfig,
}

impl Default for RcacConfig {
    fn default() -> Self {
        let attitude = ChannelConfig::new(1.0, 0.001, 1.0, -0.1);
        let rate = ChannelConfig::new(1.0, 0.001, 1.0, -0.1);
        Self { theta: attitude.clone(), phi: attitude, omega_x: rate.clone(), omega_y: rate.clone(), omega_z: rate }
    }
}

impl RcacConfig {
    /// Hyperparameters used for the physical flight experiments.
    pub fn flight_experiment() -> Self {
        Self {
            theta: ChannelConfig::new(0.1, 0.001, 1.0, 0.1),
            phi: ChannelConfig::new(0.1, 0.001, 1.0, -0.1),
            ..Self::default()
        }
    }

    pub fn channel(&self, id: ChannelId) -> &ChannelConfig {
        match id {
            ChannelId::Theta => &self.theta,
            ChannelId::Phi => &self.phi,
            ChannelId::OmegaX => &self.omega_x,
            ChannelId::OmegaY => &self.omega_y,
            ChannelId::OmegaZ => &self.omega_z,
        }
    }

    /// Builds the five channels. Default bounds are `DEFAULT_GAIN_BOUND_FACTOR`
    /// times the matching nominal gains.
    pub fn build(&self, nominal: &AttitudeGains, attitude: &AttitudeConfig) -> Result<RcacBank> {
        let f = DEFAULT_GAIN_BOUND_FACTOR;
        let p = |id: ChannelId, k: f64| {
            let c = self.channel(id);
            RcacChannel::new(id, RegressorKind::Proportional, c.hyper(vec![f * k]), c.enabled)
        };
        let pi = |id: ChannelId, axis: usize| {
            let c = self.channel(id);
            let bound = vec![f * nominal.k_omega_p[axis], f * nominal.k_omega_i[axis]];
            let kind = RegressorKind::ProportionalIntegral { bound: attitude.integrator_bound[axis] };
            RcacChannel::new(id, kind, c.hyper(bound), c.enabled)
        };
        Ok(RcacBank::new(
            p(ChannelId::Theta, nominal.k_theta)?,
            p(ChannelId::Phi, nominal.k_phi)?,
            [pi(ChannelId::OmegaX, 0)?, pi(ChannelId::OmegaY, 1)?, pi(ChannelId::OmegaZ, 2)?],
        ))
    }
}

/// Built-in mission name or an inline mission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MissionSpec {
    Builtin(String),
    Inline(Box<Mission>),
}

impl MissionSpec {
    pub fn resolve(&self) -> Result<Mission> {
        match self {
            MissionSpec::Builtin(name) => Mission::builtin(name),
            MissionSpec::Inline(m) => Ok((**m).clone()),
        }
    }
}

/// Stuck-surface fault. `t_start` is ignored when `at_loiter_entry` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFault {
    pub surface: Surface,
    pub stuck_value: f64,
    #[serde(default)]
    pub t_start: f64,
    #[serde(default)]
    pub at_loiter_entry: bool,
}

impl ScenarioFault {
    /// Left aileron frozen at 40 % of its travel from loiter entry.
    pub fn stuck_left_aileron() -> Self {
        Self { surface: Surface::AileronLeft, stuck_value: 0.4, t_start: 0.0, at_loiter_entry: true }
    }

    pub fn config(&self, t_start: f64) -> FaultConfig {
        FaultConfig { surface: self.surface, stuck_value: self.stuck_value, t_start }
    }
}

/// Launch condition: trimmed level flight at the mission cruise speed,
/// heading along the climb line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InitialCondition {
    /// m
    pub altitude: f64,
    /// Airspeed at release; the mission cruise speed when absent.
    pub airspeed: Option<f64>,
}

impl Default for InitialCondition {
    fn default() -> Self {
        Self { altitude: 5.0, airspeed: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default = "default_mission")]
    pub mission: MissionSpec,
    #[serde(default = "one")]
    pub degradation_factor: f64,
    #[serde(default)]
    pub adaptive: bool,
    #[serde(default)]
    pub rcac: RcacConfig,
    #[serde(default)]
    pub fault: Option<ScenarioFault>,
    /// Airframe JSON; the bundled airframe when absent. Relative paths are
    /// resolved against the scenario file.
    #[serde(default)]
    pub airframe: Option<PathBuf>,
    /// s
    #[serde(default = "default_duration")]
    pub duration: f64,
    /// s
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseSpec,
    /// Earth-frame wind, m/s.
    #[serde(default)]
    pub wind: [f64; 3],
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub attitude_gains: AttitudeGains,
    #[serde(default)]
    pub attitude: AttitudeConfig,
    #[serde(default)]
    pub outer_loop: PositionConfig,
    #[serde(default)]
    pub initial: InitialCondition,
}

fn default_mission() -> MissionSpec {
    MissionSpec::Builtin("sim_profile".into())
}
fn one() -> f64 {
    1.0
}
fn default_duration() -> f64 {
    200.0
}
fn default_dt() -> f64 {
    0.004
}

impl ScenarioConfig {
    /// Nominal fixed-gain run of the simulation mission.
    pub fn baseline(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            mission: default_mission(),
            degradation_factor: 1.0,
            adaptive: false,
            rcac: RcacConfig::default(),
            fault: None,
            airframe: None,
            duration: default_duration(),
            dt: default_dt(),
            seed: 0,
            noise: NoiseSpec::default(),
            wind: [0.0; 3],
            output_dir: None,
            attitude_gains: AttitudeGains::default(),
            attitude: AttitudeConfig::default(),
            outer_loop: PositionConfig::default(),
            initial: InitialCondition::default(),
        }
    }

    /// Built-in scenarios by name.
    pub fn preset(name: &str) -> Result<Self> {
        let base = Self::baseline(name);
        let cfg = match name {
            "nominal" => base,
            "adaptive" => Self { adaptive: true, ..base },
            "degraded" => Self { degradation_factor: 0.5, ..base },
            "degraded_adaptive" => Self { degradation_factor: 0.5, adaptive: true, ..base },
            "cold_start" => Self { degradation_factor: 0.0, adaptive: true, ..base },
            "stuck_aileron" => Self { fault: Some(ScenarioFault::stuck_left_aileron()), ..base },
            "stuck_aileron_adaptive" => {
                Self { fault: Some(ScenarioFault::stuck_left_aileron()), adaptive: true, ..base }
            }
            "experiment" => Self {
                mission: MissionSpec::Builtin("exp_profile".into()),
                adaptive: true,
                rcac: RcacConfig::flight_experiment(),
                noise: NoiseSpec { position: 0.3, attitude: 0.005, rate: 0.01, airspeed: 0.2, velocity: 0.1 },
                initial: InitialCondition { altitude: 2.0, airspeed: Some(12.0) },
                duration: 250.0,
                ..base
            },
            other => return Err(Error::invalid(format!("unknown preset `{other}`"))),
        };
        Ok(cfg)
    }

    pub const PRESETS: [&'static str; 8] = [
        "nominal",
        "adaptive",
        "degraded",
        "degraded_adaptive",
        "cold_start",
        "stuck_aileron",
        "stuck_aileron_adaptive",
        "experiment",
    ];

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a scenario file and makes a relative airframe path absolute.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::from_json(&std::fs::read_to_string(path)?)?;
        if let (Some(af), Some(dir)) = (&cfg.airframe, path.parent()) {
            if af.is_relative() {
                cfg.airframe = Some(dir.join(af));
            }
        }
        Ok(cfg)
    }

    pub fn airframe_params(&self) -> Result<AircraftParams> {
        match &self.airframe {
            Some(p) => {
                if !p.exists() {
                    return Err(Error::invalid(format!("airframe file {} not found", p.display())));
                }
                AircraftParams::load(p)
            }
            None => Ok(AircraftParams::default()),
        }
    }

    /// Checks every invariant that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::invalid("scenario name must be a non-empty file stem"));
        }
        if !(self.dt > 0.0) || !(self.duration > 0.0) {
            return Err(Error::invalid("dt and duration must be positive"));
        }
        if !(self.degradation_factor >= 0.0) || !self.degradation_factor.is_finite() {
            return Err(Error::invalid("degradation factor must be non-negative"));
        }
        if !self.wind.iter().all(|w| w.is_finite()) {
            return Err(Error::NonFinite { quantity: "wind" });
        }
        self.mission.resolve()?.validate()?;
        self.airframe_params()?;
        self.attitude_gains.validate()?;
        self.outer_loop.validate()?;
        if let Some(f) = &self.fault {
            f.config(f.t_start).validate()?;
        }
        if !(self.initial.altitude > 0.0) {
            return Err(Error::invalid("initial altitude must be positive"));
        }
        self.rcac.build(&self.attitude_gains, &self.attitude)?;
        Ok(())
    }
}
