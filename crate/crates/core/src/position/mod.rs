//! Outer loop: energy control for elevation and throttle, L1 guidance for
//! bank.

mod guidance;
mod path;
mod tecs;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

pub use guidance::{lateral_guidance, GuidanceOutput, L1Config};
pub use path::{horizontal, PathSegment, SegmentKind, TurnDirection};
pub use tecs::{tecs_update, EnergyInputs, TecsGains, TecsOutput, TecsState};

use crate::airframe::Measurements;
use crate::attitude::AttitudeSetpoint;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionSetpoint {
    /// Earth-frame position setpoint (north, east, down), m.
    pub r_s: Vector3<f64>,
    /// True-airspeed setpoint, m/s.
    pub v_ts: f64,
}

impl PositionSetpoint {
    pub fn new(r_s: Vector3<f64>, v_ts: f64) -> Result<Self> {
        let sp = Self { r_s, v_ts };
        sp.validate()?;
        Ok(sp)
    }

    /// Altitude setpoint, m.
    pub fn h_s(&self) -> f64 {
        -self.r_s.z
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_ts > 0.0) || !self.v_ts.is_finite() {
            return Err(Error::invalid("airspeed setpoint must be positive"));
        }
        if !self.r_s.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite { quantity: "position setpoint" });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PositionConfig {
    pub tecs: TecsGains,
    pub l1: L1Config,
    /// Time constant of the airspeed-rate estimate, s.
    pub accel_filter_tau: f64,
}

impl Default for PositionConfig {
    fn default() -> Self {
        Self { tecs: TecsGains::default(), l1: L1Config::default(), accel_filter_tau: 0.3 }
    }
}

impl PositionConfig {
    pub fn validate(&self) -> Result<()> {
        self.tecs.validate()?;
        if !(self.l1.period > 0.0 && self.l1.damping > 0.0 && self.l1.phi_max > 0.0) {
            return Err(Error::invalid("L1 period, damping and bank limit must be positive"));
        }
        if !(self.accel_filter_tau > 0.0) {
            return Err(Error::invalid("accel_filter_tau must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PositionState {
    pub tecs: TecsState,
    prev_airspeed: Option<f64>,
    /// Filtered true-airspeed rate, m/s^2.
    pub accel: f64,
    pub phi_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionOutput {
    pub setpoint: AttitudeSetpoint,
    pub throttle: f64,
    pub underspeed: bool,
    pub guidance_degenerate: bool,
}

/// One outer-loop step producing attitude and throttle setpoints.
pub fn position_update(
    meas: &Measurements,
    sp: &PositionSetpoint,
    segment: &PathSegment,
    state: &PositionState,
    cfg: &PositionConfig,
    dt: f64,
) -> Result<(PositionOutput, PositionState)> {
    let mut next = *state;
    let v = meas.true_airspeed;
    let raw_accel = match state.prev_airspeed {
        Some(prev) => (v - prev) / dt,
        None => 0.0,
    };
    let blend = dt / (cfg.accel_filter_tau + dt);
    next.accel = state.accel + blend * (raw_accel - state.accel);
    next.prev_airspeed = Some(v);

    let input = EnergyInputs {
        h_s: sp.h_s(),
        h_m: meas.h,
        v_ts: sp.v_ts,
        v_t: v,
        climb_rate: meas.climb_rate(),
        accel: next.accel,
    };
    let (tecs, tecs_state) = tecs_update(&input, &state.tecs, &cfg.tecs, dt)?;
    next.tecs = tecs_state;

    let lateral = lateral_guidance(&meas.r, &meas.ground_velocity, segment, &cfg.l1, cfg.tecs.g, state.phi_s);
    next.phi_s = lateral.phi_s;

    let out = PositionOutput {
        setpoint: AttitudeSetpoint { phi: lateral.phi_s, theta: tecs.theta_s },
        throttle: tecs.throttle,
        underspeed: tecs.underspeed,
        guidance_degenerate: lateral.degenerate,
    };
    Ok((out, next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airframe::EulerAngles;
    use nalgebra::Vector2;

    fn cruise(h: f64, v: f64) -> Measurements {
        Measurements {
            r: Vector3::new(50.0, 0.0, -h),
            h,
            euler: EulerAngles::default(),
            omega: Vector3::zeros(),
            true_airspeed: v,
            indicated_airspeed: v,
            ground_speed: v,
            ground_velocity: Vector3::new(v, 0.0, 0.0),
            t: 0.0,
        }
    }

    #[test]
    fn on_path_at_setpoint_gives_trim() {
        let cfg = PositionConfig::default();
        let seg = PathSegment::line(Vector2::new(0.0, 0.0), Vector2::new(300.0, 0.0)).unwrap();
        let sp = PositionSetpoint::new(Vector3::new(50.0, 0.0, -20.0), 13.0).unwrap();
        let (out, _) = position_update(&cruise(20.0, 13.0), &sp, &seg, &PositionState::default(), &cfg, 0.004).unwrap();
        assert_eq!(out.setpoint.phi, 0.0);
        assert_eq!(out.setpoint.theta, cfg.tecs.trim_pitch);
        assert_eq!(out.throttle, cfg.tecs.trim_throttle);
    }

    #[test]
    fn setpoint_validation() {
        assert!(PositionSetpoint::new(Vector3::zeros(), 0.0).is_err());
        assert!(PositionSetpoint::new(Vector3::new(f64::NAN, 0.0, 0.0), 13.0).is_err());
        assert_eq!(PositionSetpoint::new(Vector3::new(0.0, 0.0, -20.0), 13.0).unwrap().h_s(), 20.0);
    }
}
