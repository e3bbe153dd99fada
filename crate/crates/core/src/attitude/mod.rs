//! Inner loop: attitude P laws, coordinated-turn azimuth rate, body-rate
//! map, feedforward + PI angular-acceleration law and control allocation.
//!
//! Adaptive signals enter additively: `u_theta` and `u_phi` on the Euler-rate
//! setpoints, `u_omega` on the angular-acceleration setpoint. With all three
//! zero the loop is exactly the fixed-gain autopilot.

mod allocation;
mod laws;

pub use allocation::{control_allocation, ControlAllocator};
pub use laws::{
    angular_accel_setpoint, bank_rate_setpoint, body_rate_map, coordinated_turn_rate, elevation_rate_setpoint,
    euler_rates_to_body, RateLoopFlags, SCALE_MAX, SCALE_MIN,
};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::airframe::{AircraftParams, Measurements};
use crate::{Error, Result};

/// The eleven fixed gains of the attitude controller. The rate-loop matrices
/// are diagonal and stored as their diagonals (roll, pitch, yaw).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttitudeGains {
    /// 1/s
    pub k_theta: f64,
    /// 1/s
    pub k_phi: f64,
    pub k_omega_ff: [f64; 3],
    pub k_omega_p: [f64; 3],
    pub k_omega_i: [f64; 3],
}

impl Default for AttitudeGains {
    fn default() -> Self {
        Self {
            k_theta: 2.0,
            k_phi: 2.0,
            k_omega_ff: [30.0, 8.0, 4.0],
            k_omega_p: [10.0, 8.0, 5.0],
            k_omega_i: [20.0, 15.0, 5.0],
        }
    }
}

impl AttitudeGains {
    pub const COUNT: usize = 11;

    pub fn to_array(&self) -> [f64; Self::COUNT] {
        let [f0, f1, f2] = self.k_omega_ff;
        let [p0, p1, p2] = self.k_omega_p;
        let [i0, i1, i2] = self.k_omega_i;
        [self.k_theta, self.k_phi, f0, f1, f2, p0, p1, p2, i0, i1, i2]
    }

    pub fn from_array(a: [f64; Self::COUNT]) -> Self {
        Self {
            k_theta: a[0],
            k_phi: a[1],
            k_omega_ff: [a[2], a[3], a[4]],
            k_omega_p: [a[5], a[6], a[7]],
            k_omega_i: [a[8], a[9], a[10]],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.to_array().iter().all(|g| g.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid("attitude gains must be finite"))
        }
    }

    /// Scales all eleven gains by `factor`. `1` is the identity, `0` switches
    /// the fixed-gain controller off.
    pub fn degrade(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(Error::invalid(format!("degradation factor {factor} must be >= 0")));
        }
        Ok(Self::from_array(self.to_array().map(|g| g * factor)))
    }
}

/// Free-function form of [`AttitudeGains::degrade`].
pub fn degrade(gains: &AttitudeGains, factor: f64) -> Result<AttitudeGains> {
    gains.degrade(factor)
}

/// Integrator of the rate loop, rad.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateLoopState {
    pub integrator: Vector3<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AttitudeSetpoint {
    pub phi: f64,
    pub theta: f64,
}

/// Additive adaptive signals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdaptiveInputs {
    /// rad/s
    pub u_theta: f64,
    /// rad/s
    pub u_phi: f64,
    /// rad/s^2
    pub u_omega: Vector3<f64>,
}

impl AdaptiveInputs {
    pub fn is_zero(&self) -> bool {
        self.u_theta == 0.0 && self.u_phi == 0.0 && self.u_omega == Vector3::zeros()
    }
}

/// Tuning of the inner loop that is not one of the eleven gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttitudeConfig {
    /// Airspeed below which turn-rate and scaling computations saturate, m/s.
    pub v_min: f64,
    /// Anti-windup bound per axis on the rate integrator, rad.
    pub integrator_bound: [f64; 3],
    pub g: f64,
}

impl Default for AttitudeConfig {
    fn default() -> Self {
        Self { v_min: 5.0, integrator_bound: [1.0, 1.0, 1.0], g: 9.81 }
    }
}

/// Source of the adaptive terms, consulted at the two points where they
/// enter the loop. The attitude terms are requested first; the rate terms
/// see the rate error produced with them.
pub trait Augmentation {
    fn attitude_terms(&mut self, e_theta: f64, e_phi: f64) -> (f64, f64);
    fn rate_terms(&mut self, e_omega: &Vector3<f64>, dt: f64) -> Vector3<f64>;
}

/// Fixed-gain operation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoAugmentation;

impl Augmentation for NoAugmentation {
    fn attitude_terms(&mut self, _: f64, _: f64) -> (f64, f64) {
        (0.0, 0.0)
    }
    fn rate_terms(&mut self, _: &Vector3<f64>, _: f64) -> Vector3<f64> {
        Vector3::zeros()
    }
}

impl Augmentation for AdaptiveInputs {
    fn attitude_terms(&mut self, _: f64, _: f64) -> (f64, f64) {
        (self.u_theta, self.u_phi)
    }
    fn rate_terms(&mut self, _: &Vector3<f64>, _: f64) -> Vector3<f64> {
        self.u_omega
    }
}

/// Diagnostics raised by the inner loop.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AttitudeFlags {
    pub turn_rate_saturated: bool,
    pub rate_loop: RateLoopFlags,
}

/// Everything the inner loop computed in one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeOutput {
    pub alpha_s: Vector3<f64>,
    pub omega_s: Vector3<f64>,
    /// (bank rate, elevation rate, azimuth rate) setpoints.
    pub euler_rate_s: Vector3<f64>,
    /// Performance variables for the adaptive channels.
    pub e_theta: f64,
    pub e_phi: f64,
    pub e_omega: Vector3<f64>,
    pub adaptive: AdaptiveInputs,
    pub flags: AttitudeFlags,
}

/// One inner-loop update with the adaptive terms supplied by `aug`.
#[allow(clippy::too_many_arguments)]
pub fn attitude_update_with<A: Augmentation + ?Sized>(
    meas: &Measurements,
    setpoint: &AttitudeSetpoint,
    gains: &AttitudeGains,
    params: &AircraftParams,
    rate_state: &RateLoopState,
    aug: &mut A,
    cfg: &AttitudeConfig,
    dt: f64,
) -> (AttitudeOutput, RateLoopState) {
    let e_theta = setpoint.theta - meas.euler.theta;
    let e_phi = setpoint.phi - meas.euler.phi;
    let (u_theta, u_phi) = aug.attitude_terms(e_theta, e_phi);

    let theta_dot = elevation_rate_setpoint(setpoint.theta, meas.euler.theta, gains.k_theta, u_theta);
    let phi_dot = bank_rate_setpoint(setpoint.phi, meas.euler.phi, gains.k_phi, u_phi);
    let (psi_dot, turn_sat) = coordinated_turn_rate(setpoint.phi, setpoint.theta, meas.true_airspeed, cfg.g, cfg.v_min);
    let euler_rate_s = Vector3::new(phi_dot, theta_dot, psi_dot);
    let omega_s = euler_rates_to_body(meas.euler.theta, meas.euler.phi, &euler_rate_s);

    let e_omega = omega_s - meas.omega;
    let u_omega = aug.rate_terms(&e_omega, dt);

    let (alpha_s, next, rate_flags) = angular_accel_setpoint(
        &omega_s,
        &meas.omega,
        meas.true_airspeed,
        meas.indicated_airspeed,
        (params.trim_true_airspeed, params.trim_indicated_airspeed),
        gains,
        rate_state,
        &u_omega,
        cfg,
        dt,
    );
    let out = AttitudeOutput {
        alpha_s,
        omega_s,
        euler_rate_s,
        e_theta,
        e_phi,
        e_omega,
        adaptive: AdaptiveInputs { u_theta, u_phi, u_omega },
        flags: AttitudeFlags { turn_rate_saturated: turn_sat, rate_loop: rate_flags },
    };
    (out, next)
}

/// One inner-loop update with explicit adaptive inputs.
#[allow(clippy::too_many_arguments)]
pub fn attitude_update(
    meas: &Measurements,
    setpoint: &AttitudeSetpoint,
    gains: &AttitudeGains,
    params: &AircraftParams,
    rate_state: &RateLoopState,
    adaptive: &AdaptiveInputs,
    cfg: &AttitudeConfig,
    dt: f64,
) -> (AttitudeOutput, RateLoopState) {
    let mut fixed = *adaptive;
    attitude_update_with(meas, setpoint, gains, params, rate_state, &mut fixed, cfg, dt)
}
