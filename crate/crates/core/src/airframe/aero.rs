use nalgebra::Vector3;

use super::{AircraftParams, AircraftState, Environment, SurfaceCommand};

/// Air-relative flow quantities at the current state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirData {
    /// True airspeed, m/s.
    pub airspeed: f64,
    /// Angle of attack, rad.
    pub alpha: f64,
    /// Sideslip, rad.
    pub beta: f64,
    /// Dynamic pressure, Pa.
    pub dynamic_pressure: f64,
}

impl AirData {
    pub fn from_state(state: &AircraftState, env: &Environment) -> Self {
        let air_earth = state.v - env.wind();
        let air_body = state.euler.body_to_earth().transpose() * air_earth;
        let airspeed = air_body.norm();
        if airspeed < 1e-9 {
            return Self { airspeed: 0.0, alpha: 0.0, beta: 0.0, dynamic_pressure: 0.0 };
        }
        Self {
            airspeed,
            alpha: air_body.z.atan2(air_body.x),
            beta: (air_body.y / airspeed).clamp(-1.0, 1.0).asin(),
            dynamic_pressure: 0.5 * env.rho * airspeed * airspeed,
        }
    }
}

/// Aerodynamic force and moment in body axes.
///
/// Lift and drag act in the stability plane; side force, roll and yaw
/// moments are linear in sideslip, non-dimensional rates and deflections.
/// Lift is held constant once `|alpha|` exceeds `alpha_max`. The ailerons act
/// antisymmetrically: only `left - right` enters the roll moment, so a single
/// frozen surface shows up as a roll-moment bias.
pub fn aero_forces_moments(
    state: &AircraftState,
    cmd: &SurfaceCommand,
    env: &Environment,
    params: &AircraftParams,
) -> (Vector3<f64>, Vector3<f64>) {
    let air = AirData::from_state(state, env);
    if air.dynamic_pressure == 0.0 {
        return (Vector3::zeros(), Vector3::zeros());
    }
    let c = &params.aero;
    let cmd = cmd.clamped();
    let lim = &params.surface_limits;
    let da_left = cmd.aileron_left * lim.aileron;
    let da_right = cmd.aileron_right * lim.aileron;
    let de = cmd.elevator * lim.elevator;
    let dr = cmd.rudder * lim.rudder;

    let v = air.airspeed;
    let (p, q, r) = (state.omega.x, state.omega.y, state.omega.z);
    let p_hat = p * params.span / (2.0 * v);
    let q_hat = q * params.chord / (2.0 * v);
    let r_hat = r * params.span / (2.0 * v);

    let alpha_lift = air.alpha.clamp(-c.alpha_max, c.alpha_max);
    let cl = c.c_lift_0 + c.c_lift_alpha * alpha_lift;
    let cd = c.c_drag_0 + c.induced_drag_factor * cl * cl;
    let cy = c.c_side_beta * air.beta;

    let c_roll =
        c.c_roll_beta * air.beta + c.c_roll_p * p_hat + c.c_roll_r * r_hat + c.c_roll_aileron * (da_left - da_right);
    let c_pitch = c.c_m_0 + c.c_m_alpha * air.alpha + c.c_m_q * q_hat + c.c_m_elevator * de;
    let c_yaw = c.c_yaw_beta * air.beta + c.c_yaw_r * r_hat + c.c_yaw_p * p_hat + c.c_yaw_rudder * dr;

    let qs = air.dynamic_pressure * params.wing_area;
    let (sa, ca) = air.alpha.sin_cos();
    let force = Vector3::new(qs * (-cd * ca + cl * sa), qs * cy, qs * (-cd * sa - cl * ca));
    let moment = Vector3::new(qs * params.span * c_roll, qs * params.chord * c_pitch, qs * params.span * c_yaw);
    (force, moment)
}
