use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::metrics::{cross_track_error, metrics, Metrics};
use super::telemetry::{flags, write_telemetry_file, TelemetryRecord};
use crate::airframe::trim_search;
use crate::airframe::{apply_fault, measure, step, AircraftState, Environment, EulerAngles, FaultConfig};
use crate::attitude::{attitude_update_with, AttitudeOutput, ControlAllocator, NoAugmentation, RateLoopState};
use crate::mission::{mission_update, scripted_pilot, Mode, Phase, PhaseState};
use crate::position::{position_update, PositionState};
use crate::rcac::{ChannelId, RcacBank};
use crate::{Error, Result};

/// Environment variable that overrides every output directory.
pub const OUTPUT_ROOT_ENV: &str = "AUTOPILOT_OUTPUT_ROOT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum RunStatus {
    /// All phases flown through touchdown.
    Completed,
    /// Duration elapsed before touchdown.
    Incomplete,
    Failed(String),
}

impl RunStatus {
    pub fn is_failed(&self) -> bool {
        matches!(self, RunStatus::Failed(_))
    }
}

/// Adaptive gains of the attitude channels at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainSnapshot {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub status: RunStatus,
    pub degradation_factor: f64,
    pub adaptive: bool,
    pub fault: bool,
    /// `None` when the metric window is empty.
    pub metrics: Option<Metrics>,
    /// Records in the metric window.
    pub n: usize,
    pub normalized: Option<Metrics>,
    pub baseline: Option<String>,
    pub loiter_entry: Option<f64>,
    pub loiter_exit: Option<f64>,
    /// Largest measured bank magnitude over the run, rad.
    pub max_abs_phi: f64,
    /// Adaptive gains at the last loiter record.
    pub loiter_end_gains: Option<GainSnapshot>,
    /// Fixed attitude gains after degradation.
    pub fixed_gains: GainSnapshot,
    pub final_time: f64,
}

impl RunSummary {
    /// Fills the normalised metrics from a baseline summary.
    pub fn normalize_against(&mut self, baseline: &RunSummary) {
        self.baseline = Some(baseline.name.clone());
        self.normalized = match (&self.metrics, &baseline.metrics) {
            (Some(m), Some(b)) => Some(m.normalized(b)),
            _ => None,
        };
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub summary: RunSummary,
    pub telemetry: Vec<TelemetryRecord>,
}

/// Builds the summary of a finished run from its telemetry.
pub fn summarize(cfg: &ScenarioConfig, status: RunStatus, telemetry: &[TelemetryRecord]) -> RunSummary {
    let (metrics, n) = match metrics(telemetry) {
        Ok((m, n)) => (Some(m), n),
        Err(_) => (None, 0),
    };
    let loiter_entry = telemetry.iter().find(|r| r.phase == Phase::Loiter).map(|r| r.t);
    let loiter_exit = telemetry.iter().find(|r| r.phase > Phase::Loiter).map(|r| r.t);
    let loiter_end_gains = telemetry
        .iter()
        .rev()
        .find(|r| r.phase == Phase::Loiter)
        .map(|r| GainSnapshot { theta: r.gain_theta, phi: r.gain_phi });
    RunSummary {
        name: cfg.name.clone(),
        status,
        degradation_factor: cfg.degradation_factor,
        adaptive: cfg.adaptive,
        fault: cfg.fault.is_some(),
        metrics,
        n,
        normalized: None,
        baseline: None,
        loiter_entry,
        loiter_exit,
        max_abs_phi: telemetry.iter().map(|r| r.phi.abs()).fold(0.0, f64::max),
        loiter_end_gains,
        fixed_gains: GainSnapshot {
            theta: cfg.degradation_factor * cfg.attitude_gains.k_theta,
            phi: cfg.degradation_factor * cfg.attitude_gains.k_phi,
        },
        final_time: telemetry.last().map_or(0.0, |r| r.t),
    }
}

struct Controllers {
    bank: Option<RcacBank>,
}

impl Controllers {
    fn gains(&self) -> [f64; 8] {
        let mut g = [0.0; 8];
        if let Some(bank) = &self.bank {
            g[0] = bank.theta.state.theta[0];
            g[1] = bank.phi.state.theta[0];
            for i in 0..3 {
                g[2 + 2 * i] = bank.omega[i].state.theta[0];
                g[3 + 2 * i] = bank.omega[i].state.theta[1];
            }
        }
        g
    }

    fn frozen_flags(&self) -> u32 {
        let Some(bank) = &self.bank else {
            return 0;
        };
        let bits = [
            (ChannelId::Theta, flags::THETA_FROZEN),
            (ChannelId::Phi, flags::PHI_FROZEN),
            (ChannelId::OmegaX, flags::OMEGA_X_FROZEN),
            (ChannelId::OmegaY, flags::OMEGA_Y_FROZEN),
            (ChannelId::OmegaZ, flags::OMEGA_Z_FROZEN),
        ];
        bits.iter().filter(|(id, _)| bank.channel(*id).frozen().is_some()).fold(0, |acc, (_, b)| acc | b)
    }
}

fn initial_state(cfg: &ScenarioConfig, env: &Environment) -> Result<AircraftState> {
    let params = cfg.airframe_params()?;
    let mission = cfg.mission.resolve()?;
    let calm = Environment { wind: [0.0; 3], ..*env };
    let speed = cfg.initial.airspeed.unwrap_or(mission.cruise_speed);
    let trim = trim_search(&params, &calm, speed)?;
    let dir = nalgebra::Vector2::from(mission.target) - nalgebra::Vector2::from(mission.launch);
    let psi = dir.y.atan2(dir.x);
    Ok(AircraftState {
        r: Vector3::new(mission.launch[0], mission.launch[1], -cfg.initial.altitude),
        v: Vector3::new(speed * psi.cos(), speed * psi.sin(), 0.0) + env.wind(),
        euler: EulerAngles::new(psi, trim.alpha, 0.0),
        omega: Vector3::zeros(),
        t: 0.0,
    })
}

/// Flies the scenario in memory. Configuration problems are errors; flight
/// problems (ground impact, non-finite state) end the run with a failed
/// status and the telemetry recorded so far.
pub fn simulate(cfg: &ScenarioConfig) -> Result<RunResult> {
    cfg.validate()?;
    let params = cfg.airframe_params()?;
    let env = Environment { wind: cfg.wind, ..Environment::default() };
    let mission = cfg.mission.resolve()?;
    let calm = Environment { wind: [0.0; 3], ..env };
    let cruise = trim_search(&params, &calm, mission.cruise_speed)?;
    let mut pos_cfg = cfg.outer_loop;
    pos_cfg.tecs.trim_throttle = cruise.command.throttle;
    pos_cfg.tecs.trim_pitch = cruise.alpha;

    let gains = cfg.attitude_gains.degrade(cfg.degradation_factor)?;
    let allocator = ControlAllocator::new(&params, &env)?;
    let mut ctl = Controllers {
        bank: if cfg.adaptive { Some(cfg.rcac.build(&cfg.attitude_gains, &cfg.attitude)?) } else { None },
    };
    let mut fault: Option<FaultConfig> = cfg.fault.filter(|f| !f.at_loiter_entry).map(|f| f.config(f.t_start));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = initial_state(cfg, &env)?;
    let mut ps = PhaseState::start(&mission, 0.0);
    let mut pos_state = PositionState::default();
    let mut rate_state = RateLoopState::default();
    let steps = (cfg.duration / cfg.dt).round() as usize;
    let mut telemetry = Vec::with_capacity(steps);
    let dt = cfg.dt;

    let mut status = RunStatus::Incomplete;
    for _ in 0..steps {
        let t = state.t;
        let meas = measure(&state, &env, Some(&cfg.noise), &mut rng);
        let (sp, segment, next_ps) = mission_update(&meas, &mission, &ps)?;
        if ps.phase == Phase::Climb && next_ps.phase == Phase::Loiter {
            if let Some(f) = cfg.fault.filter(|f| f.at_loiter_entry) {
                fault = Some(f.config(t));
            }
        }
        ps = next_ps;
        if ps.phase == Phase::Done {
            status = RunStatus::Completed;
            break;
        }

        let (pos_out, next_pos) = match position_update(&meas, &sp, &segment, &pos_state, &pos_cfg, dt) {
            Ok(v) => v,
            Err(e) => {
                status = RunStatus::Failed(e.to_string());
                break;
            }
        };
        pos_state = next_pos;
        let (att_sp, throttle) = match scripted_pilot(&meas, &ps, &mission) {
            Some(cmd) => (cmd.setpoint, cmd.throttle),
            None => (pos_out.setpoint, pos_out.throttle),
        };

        let (att, next_rate): (AttitudeOutput, RateLoopState) = match ctl.bank.as_mut() {
            Some(bank) => {
                bank.learning = ps.mode == Mode::Mission;
                attitude_update_with(&meas, &att_sp, &gains, &params, &rate_state, bank, &cfg.attitude, dt)
            }
            None => attitude_update_with(
                &meas,
                &att_sp,
                &gains,
                &params,
                &rate_state,
                &mut NoAugmentation,
                &cfg.attitude,
                dt,
            ),
        };
        rate_state = next_rate;
        let command = allocator.allocate(&att.alpha_s, throttle);
        let applied = apply_fault(&command, fault.as_ref(), t);

        let mut bits = ctl.frozen_flags();
        let set = |cond: bool, flag: u32| if cond { flag } else { 0 };
        bits |= set(att.flags.turn_rate_saturated, flags::TURN_RATE_SATURATED)
            | set(att.flags.rate_loop.scale_saturated, flags::SCALE_SATURATED)
            | set(att.flags.rate_loop.integrator_saturated, flags::INTEGRATOR_SATURATED)
            | set(pos_out.underspeed, flags::UNDERSPEED)
            | set(pos_out.guidance_degenerate, flags::GUIDANCE_DEGENERATE)
            | set(fault.is_some_and(|f| t >= f.t_start), flags::FAULT_ACTIVE)
            | set(ctl.bank.as_ref().is_some_and(|b| b.learning), flags::LEARNING);
        let g = ctl.gains();
        telemetry.push(TelemetryRecord {
            t,
            phase: ps.phase,
            mode: ps.mode,
            north: meas.r.x,
            east: meas.r.y,
            down: meas.r.z,
            h: meas.h,
            airspeed: meas.true_airspeed,
            phi: meas.euler.phi,
            theta: meas.euler.theta,
            psi: meas.euler.psi,
            phi_s: att_sp.phi,
            theta_s: att_sp.theta,
            h_s: sp.h_s(),
            p: meas.omega.x,
            q: meas.omega.y,
            r: meas.omega.z,
            p_s: att.omega_s.x,
            q_s: att.omega_s.y,
            r_s: att.omega_s.z,
            alpha_x: att.alpha_s.x,
            alpha_y: att.alpha_s.y,
            alpha_z: att.alpha_s.z,
            aileron_left: applied.aileron_left,
            aileron_right: applied.aileron_right,
            elevator: applied.elevator,
            rudder: applied.rudder,
            throttle: applied.throttle,
            u_theta: att.adaptive.u_theta,
            u_phi: att.adaptive.u_phi,
            u_omega_x: att.adaptive.u_omega.x,
            u_omega_y: att.adaptive.u_omega.y,
            u_omega_z: att.adaptive.u_omega.z,
            gain_theta: g[0],
            gain_phi: g[1],
            gain_omega_x_p: g[2],
            gain_omega_x_i: g[3],
            gain_omega_y_p: g[4],
            gain_omega_y_i: g[5],
            gain_omega_z_p: g[6],
            gain_omega_z_i: g[7],
            xtrack: cross_track_error(&meas.r, &segment),
            flags: bits,
        });

        state = match step(&state, &applied, &env, &params, dt) {
            Ok(s) => s,
            Err(e) => {
                status = RunStatus::Failed(e.to_string());
                break;
            }
        };
        if state.altitude() <= 0.0 {
            status = if ps.phase == Phase::Land {
                RunStatus::Completed
            } else {
                RunStatus::Failed(Error::GroundImpact { t: state.t }.to_string())
            };
            break;
        }
    }
    let summary = summarize(cfg, status, &telemetry);
    Ok(RunResult { summary, telemetry })
}

/// Output directory for a scenario: the override variable, then the config,
/// then `out`.
pub fn output_dir(cfg: &ScenarioConfig) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if !root.is_empty() => PathBuf::from(root),
        _ => cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("out")),
    }
}

/// Runs the scenario and writes `<name>.csv` and `<name>.summary.json` into
/// `out_dir`. Returns the telemetry path and the summary.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<(PathBuf, RunSummary)> {
    let result = simulate(cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("{}.csv", cfg.name));
    write_telemetry_file(&result.telemetry, &csv_path)?;
    let summary_path = out_dir.join(format!("{}.summary.json", cfg.name));
    std::fs::write(summary_path, serde_json::to_string_pretty(&result.summary)?)?;
    Ok((csv_path, result.summary))
}
