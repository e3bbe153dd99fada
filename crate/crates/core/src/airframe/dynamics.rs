use nalgebra::Vector3;

use super::{
    aero_forces_moments, AircraftParams, AircraftState, Environment, EulerAngles, SurfaceCommand, GIMBAL_GUARD,
};
use crate::{wrap_angle, Error, Result};

/// Time derivative of [`AircraftState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub r_dot: Vector3<f64>,
    pub v_dot: Vector3<f64>,
    /// (bank rate, elevation rate, azimuth rate)
    pub euler_dot: Vector3<f64>,
    pub omega_dot: Vector3<f64>,
}

/// Euler-angle rates (bank, elevation, azimuth) produced by body rates `omega`.
///
/// Inverse of the 3-2-1 map `omega = S(theta, phi) * [phi_dot, theta_dot, psi_dot]`.
pub fn euler_rates(euler: &EulerAngles, omega: &Vector3<f64>) -> Vector3<f64> {
    let (sph, cph) = euler.phi.sin_cos();
    let (sth, cth) = euler.theta.sin_cos();
    let (p, q, r) = (omega.x, omega.y, omega.z);
    let qr = q * sph + r * cph;
    Vector3::new(p + qr * sth / cth, q * cph - r * sph, qr / cth)
}

pub fn derivative(
    state: &AircraftState,
    cmd: &SurfaceCommand,
    env: &Environment,
    params: &AircraftParams,
) -> StateDerivative {
    let (aero_force, moment) = aero_forces_moments(state, cmd, env, params);
    let thrust = Vector3::new(params.max_thrust * cmd.throttle.clamp(0.0, 1.0), 0.0, 0.0);
    let dcm = state.euler.body_to_earth();
    let v_dot = dcm * (aero_force + thrust) / params.mass + Vector3::new(0.0, 0.0, env.g);

    let j = Vector3::from(params.inertia);
    let w = state.omega;
    let gyro = w.cross(&j.component_mul(&w));
    let omega_dot = (moment - gyro).component_div(&j);

    StateDerivative { r_dot: state.v, v_dot, euler_dot: euler_rates(&state.euler, &w), omega_dot }
}

fn advance(state: &AircraftState, d: &StateDerivative, h: f64) -> AircraftState {
    AircraftState {
        r: state.r + d.r_dot * h,
        v: state.v + d.v_dot * h,
        euler: EulerAngles {
            phi: state.euler.phi + d.euler_dot.x * h,
            theta: state.euler.theta + d.euler_dot.y * h,
            psi: state.euler.psi + d.euler_dot.z * h,
        },
        omega: state.omega + d.omega_dot * h,
        t: state.t + h,
    }
}

fn check_finite(d: &StateDerivative) -> Result<()> {
    let all = |v: &Vector3<f64>| v.iter().all(|x| x.is_finite());
    if !all(&d.r_dot) {
        return Err(Error::NonFinite { quantity: "position rate" });
    }
    if !all(&d.v_dot) {
        return Err(Error::NonFinite { quantity: "acceleration" });
    }
    if !all(&d.euler_dot) {
        return Err(Error::NonFinite { quantity: "euler rates" });
    }
    if !all(&d.omega_dot) {
        return Err(Error::NonFinite { quantity: "angular acceleration" });
    }
    Ok(())
}

/// Advances the state by `dt` with classical RK4, holding `cmd` constant.
pub fn step(
    state: &AircraftState,
    cmd: &SurfaceCommand,
    env: &Environment,
    params: &AircraftParams,
    dt: f64,
) -> Result<AircraftState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("time step must be positive"));
    }
    state.validate()?;
    let cmd = cmd.clamped();

    let k1 = derivative(state, &cmd, env, params);
    check_finite(&k1)?;
    let k2 = derivative(&advance(state, &k1, 0.5 * dt), &cmd, env, params);
    check_finite(&k2)?;
    let k3 = derivative(&advance(state, &k2, 0.5 * dt), &cmd, env, params);
    check_finite(&k3)?;
    let k4 = derivative(&advance(state, &k3, dt), &cmd, env, params);
    check_finite(&k4)?;

    let sum = |f: fn(&StateDerivative) -> Vector3<f64>| (f(&k1) + 2.0 * f(&k2) + 2.0 * f(&k3) + f(&k4)) / 6.0;
    let combined = StateDerivative {
        r_dot: sum(|d| d.r_dot),
        v_dot: sum(|d| d.v_dot),
        euler_dot: sum(|d| d.euler_dot),
        omega_dot: sum(|d| d.omega_dot),
    };
    let mut next = advance(state, &combined, dt);
    next.t = state.t + dt;
    next.euler.phi = wrap_angle(next.euler.phi);
    next.euler.psi = wrap_angle(next.euler.psi);

    if !next.is_finite() {
        return Err(Error::NonFinite { quantity: "state" });
    }
    if next.euler.theta.abs() >= std::f64::consts::FRAC_PI_2 - GIMBAL_GUARD {
        return Err(Error::GimbalLock { theta: next.euler.theta });
    }
    Ok(next)
}
