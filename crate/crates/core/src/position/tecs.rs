use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Energy controller tuning. Energy rates are specific and divided by `g`,
/// so every rate below is in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TecsGains {
    /// Altitude error to climb-rate setpoint, 1/s.
    pub k_h: f64,
    /// Airspeed error to acceleration setpoint, 1/s.
    pub k_v: f64,
    pub max_climb_rate: f64,
    pub max_sink_rate: f64,
    /// Throttle per unit total-energy-rate setpoint.
    pub throttle_ff: f64,
    pub throttle_p: f64,
    pub throttle_i: f64,
    pub pitch_p: f64,
    pub pitch_i: f64,
    /// Anti-windup bound shared by both integrators.
    pub integrator_bound: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub throttle_max: f64,
    /// Underspeed threshold on true airspeed, m/s.
    pub v_min: f64,
    pub underspeed_pitch: f64,
    /// Level-flight trim at the cruise speed.
    pub trim_throttle: f64,
    pub trim_pitch: f64,
    pub g: f64,
}

impl Default for TecsGains {
    fn default() -> Self {
        Self {
            k_h: 0.4,
            k_v: 0.5,
            max_climb_rate: 2.5,
            max_sink_rate: 2.0,
            throttle_ff: 0.12,
            throttle_p: 0.15,
            throttle_i: 0.05,
            pitch_p: 0.6,
            pitch_i: 0.25,
            integrator_bound: 4.0,
            theta_min: -0.35,
            theta_max: 0.4,
            throttle_max: 1.0,
            v_min: 8.0,
            underspeed_pitch: -0.05,
            trim_throttle: 0.2,
            trim_pitch: 0.0,
            g: 9.81,
        }
    }
}

impl TecsGains {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            self.k_h,
            self.k_v,
            self.max_climb_rate,
            self.max_sink_rate,
            self.throttle_ff,
            self.throttle_p,
            self.throttle_i,
            self.pitch_p,
            self.pitch_i,
            self.integrator_bound,
        ];
        if !nonneg.iter().all(|x| *x >= 0.0 && x.is_finite()) {
            return Err(Error::invalid("TECS gains and limits must be finite and non-negative"));
        }
        if !(self.theta_min < self.theta_max) || !(self.throttle_max > 0.0) {
            return Err(Error::invalid("TECS output limits are empty"));
        }
        if !(self.v_min > 0.0) || !(self.g > 0.0) {
            return Err(Error::invalid("TECS v_min and g must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TecsState {
    /// Integral of the total-energy-rate error, m.
    pub throttle_integ: f64,
    /// Integral of the energy-balance-rate error, m.
    pub pitch_integ: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TecsOutput {
    /// Normalised throttle in `[0, throttle_max]`.
    pub throttle: f64,
    /// Elevation setpoint, rad.
    pub theta_s: f64,
    pub underspeed: bool,
}

/// Measured and commanded energy quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyInputs {
    pub h_s: f64,
    pub h_m: f64,
    pub v_ts: f64,
    pub v_t: f64,
    /// m/s, positive up
    pub climb_rate: f64,
    /// True-airspeed rate, m/s^2.
    pub accel: f64,
}

/// Total-energy control step.
///
/// With `E/g = h + V^2 / (2g)` the potential and kinetic energy rates are
/// `hdot` and `V Vdot / g`. Their sum is regulated by throttle and their
/// difference (potential minus kinetic) by pitch, each through a PI around
/// the trim point.
pub fn tecs_update(
    input: &EnergyInputs,
    state: &TecsState,
    gains: &TecsGains,
    dt: f64,
) -> Result<(TecsOutput, TecsState)> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt must be positive"));
    }
    let values = [input.h_s, input.h_m, input.v_ts, input.v_t, input.climb_rate, input.accel];
    if !values.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite { quantity: "TECS input" });
    }
    if input.v_t <= gains.v_min {
        let out = TecsOutput {
            throttle: gains.throttle_max,
            theta_s: gains.underspeed_pitch.clamp(gains.theta_min, gains.theta_max),
            underspeed: true,
        };
        return Ok((out, *state));
    }
    let g = gains.g;
    let v = input.v_t;
    let h_rate_sp = (gains.k_h * (input.h_s - input.h_m)).clamp(-gains.max_sink_rate, gains.max_climb_rate);
    let accel_sp = gains.k_v * (input.v_ts - v);

    let spe_rate_sp = h_rate_sp;
    let ske_rate_sp = v * accel_sp / g;
    let spe_rate = input.climb_rate;
    let ske_rate = v * input.accel / g;

    let ste_rate_sp = spe_rate_sp + ske_rate_sp;
    let ste_err = ste_rate_sp - (spe_rate + ske_rate);
    let seb_rate_sp = spe_rate_sp - ske_rate_sp;
    let seb_err = seb_rate_sp - (spe_rate - ske_rate);

    let bound = gains.integrator_bound;
    let next = TecsState {
        throttle_integ: (state.throttle_integ + ste_err * dt).clamp(-bound, bound),
        pitch_integ: (state.pitch_integ + seb_err * dt).clamp(-bound, bound),
    };
    let throttle = gains.trim_throttle
        + gains.throttle_ff * ste_rate_sp
        + gains.throttle_p * ste_err
        + gains.throttle_i * next.throttle_integ;
    let theta_s = gains.trim_pitch + (seb_rate_sp + gains.pitch_p * seb_err + gains.pitch_i * next.pitch_integ) / v;
    let out = TecsOutput {
        throttle: throttle.clamp(0.0, gains.throttle_max),
        theta_s: theta_s.clamp(gains.theta_min, gains.theta_max),
        underspeed: false,
    };
    Ok((out, next))
}
