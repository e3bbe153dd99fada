use nalgebra::{Matrix3, Vector3};

use super::{AttitudeConfig, AttitudeGains, RateLoopState};

/// Airspeed scaling factors are held inside this range.
pub const SCALE_MIN: f64 = 0.25;
pub const SCALE_MAX: f64 = 4.0;

/// `k_theta * (theta_s - theta_m) + u_theta`
pub fn elevation_rate_setpoint(theta_s: f64, theta_m: f64, k_theta: f64, u_theta: f64) -> f64 {
    k_theta * (theta_s - theta_m) + u_theta
}

/// `k_phi * (phi_s - phi_m) + u_phi`
pub fn bank_rate_setpoint(phi_s: f64, phi_m: f64, k_phi: f64, u_phi: f64) -> f64 {
    k_phi * (phi_s - phi_m) + u_phi
}

/// Azimuth rate for a coordinated turn, `g tan(phi_s) cos(theta_s) / V_T`.
///
/// Airspeeds below `v_min` are replaced by `v_min`; the second return value
/// reports whether that happened.
pub fn coordinated_turn_rate(phi_s: f64, theta_s: f64, v_t: f64, g: f64, v_min: f64) -> (f64, bool) {
    let saturated = !(v_t >= v_min);
    let v = if saturated { v_min } else { v_t };
    (g * phi_s.tan() * theta_s.cos() / v, saturated)
}

/// Euler-rate to body-rate map for the 3-2-1 sequence.
pub fn body_rate_map(theta: f64, phi: f64) -> Matrix3<f64> {
    let (sth, cth) = theta.sin_cos();
    let (sph, cph) = phi.sin_cos();
    Matrix3::new(1.0, 0.0, -sth, 0.0, cph, sph * cth, 0.0, -sph, cph * cth)
}

/// Body angular-velocity setpoint from (bank, elevation, azimuth) rates.
pub fn euler_rates_to_body(theta_m: f64, phi_m: f64, rates: &Vector3<f64>) -> Vector3<f64> {
    body_rate_map(theta_m, phi_m) * rates
}

/// Diagnostics from [`angular_accel_setpoint`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateLoopFlags {
    /// One of the airspeed scaling factors hit its clamp.
    pub scale_saturated: bool,
    /// An integrator component hit its anti-windup bound.
    pub integrator_saturated: bool,
}

fn scale(reference: f64, speed: f64) -> (f64, bool) {
    let raw = if speed > 0.0 { reference / speed } else { f64::INFINITY };
    let clamped = raw.clamp(SCALE_MIN, SCALE_MAX);
    (clamped, clamped != raw)
}

/// Angular-acceleration setpoint from the feedforward and PI rate laws.
///
/// `alpha_s = (V_T0 / V_T) k_ff w_s + (V_I0 / V_I)^2 (k_P e + k_I x) + u`
/// with `e = w_s - w_m` and `x` the integrator. The integrator realises
/// `k_I / (q - 1)`: the output uses the accumulated value from previous
/// steps, then `e * dt` is added and the result clamped per axis.
#[allow(clippy::too_many_arguments)]
pub fn angular_accel_setpoint(
    omega_s: &Vector3<f64>,
    omega_m: &Vector3<f64>,
    v_t: f64,
    v_i: f64,
    trim_speeds: (f64, f64),
    gains: &AttitudeGains,
    rate_state: &RateLoopState,
    u_omega: &Vector3<f64>,
    cfg: &AttitudeConfig,
    dt: f64,
) -> (Vector3<f64>, RateLoopState, RateLoopFlags) {
    let (ff_scale, ff_sat) = scale(trim_speeds.0, v_t.max(cfg.v_min));
    let (pi_scale, pi_sat) = scale(trim_speeds.1, v_i.max(cfg.v_min));
    let pi_scale = pi_scale * pi_scale;
    let e = omega_s - omega_m;

    let ff = Vector3::from(gains.k_omega_ff).component_mul(omega_s) * ff_scale;
    let pi = Vector3::from(gains.k_omega_p).component_mul(&e)
        + Vector3::from(gains.k_omega_i).component_mul(&rate_state.integrator);
    let alpha = ff + pi * pi_scale + u_omega;

    let mut next = *rate_state;
    let mut integrator_saturated = false;
    for i in 0..3 {
        let bound = cfg.integrator_bound[i];
        let raw = rate_state.integrator[i] + e[i] * dt;
        next.integrator[i] = raw.clamp(-bound, bound);
        integrator_saturated |= next.integrator[i] != raw;
    }
    let flags =
        RateLoopFlags { scale_saturated: ff_sat || pi_sat || v_t < cfg.v_min || v_i < cfg.v_min, integrator_saturated };
    (alpha, next, flags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn elevation_rate_examples() {
        assert_eq!(elevation_rate_setpoint(0.4, 0.4, 7.0, 0.0), 0.0);
        assert!((elevation_rate_setpoint(0.2, 0.1, 3.0, 0.0) - 0.3).abs() < 1e-15);
        assert!((elevation_rate_setpoint(0.2, 0.1, 3.0, -0.05) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bank_rate_examples() {
        assert_eq!(bank_rate_setpoint(-0.3, -0.3, 5.0, 0.0), 0.0);
        assert!((bank_rate_setpoint(0.2, 0.1, 3.0, 0.0) - 0.3).abs() < 1e-15);
        assert!((bank_rate_setpoint(0.2, 0.1, 3.0, -0.05) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn coordinated_turn_examples() {
        let g = 9.81;
        assert_eq!(coordinated_turn_rate(0.0, 0.1, 13.0, g, 3.0).0, 0.0);
        let (rate, sat) = coordinated_turn_rate(FRAC_PI_4, 0.0, g, g, 3.0);
        assert!((rate - 1.0).abs() < 1e-15);
        assert!(!sat);
        let near = coordinated_turn_rate(0.5, std::f64::consts::FRAC_PI_2 - 1e-9, 13.0, g, 3.0).0;
        assert!(near.abs() < 1e-8);
        let (slow, sat) = coordinated_turn_rate(0.3, 0.0, 1.0, g, 3.0);
        assert!(sat);
        assert_eq!(slow, coordinated_turn_rate(0.3, 0.0, 3.0, g, 3.0).0);
    }

    #[test]
    fn body_map_examples() {
        let r = Vector3::new(0.3, -0.1, 0.2);
        assert_eq!(euler_rates_to_body(0.0, 0.0, &r), r);
        let w = euler_rates_to_body(0.0, std::f64::consts::FRAC_PI_2, &Vector3::new(0.0, 1.0, 0.0));
        assert!(w.x.abs() < 1e-15);
        assert!(w.y.abs() < 1e-15);
        assert!((w.z + 1.0).abs() < 1e-15);
    }

    fn scalar_gains(ff: f64, p: f64, i: f64) -> AttitudeGains {
        AttitudeGains { k_theta: 0.0, k_phi: 0.0, k_omega_ff: [ff; 3], k_omega_p: [p; 3], k_omega_i: [i; 3] }
    }

    #[test]
    fn rate_law_examples() {
        let cfg = AttitudeConfig::default();
        let rs = RateLoopState::default();
        let zero = Vector3::zeros();
        let g = scalar_gains(0.2, 0.1, 0.0);
        let (a, _, _) = angular_accel_setpoint(&zero, &zero, 13.0, 13.0, (13.0, 13.0), &g, &rs, &zero, &cfg, 0.004);
        assert_eq!(a, zero);

        let ws = Vector3::new(1.0, 0.0, 0.0);
        let wm = Vector3::new(0.5, 0.0, 0.0);
        let (a, _, _) = angular_accel_setpoint(&ws, &wm, 13.0, 13.0, (13.0, 13.0), &g, &rs, &zero, &cfg, 0.004);
        assert!((a.x - 0.25).abs() < 1e-15);

        // halving indicated airspeed quadruples the PI term
        let g = scalar_gains(0.0, 0.1, 0.0);
        let (a_half, _, _) = angular_accel_setpoint(&ws, &wm, 13.0, 6.5, (13.0, 13.0), &g, &rs, &zero, &cfg, 0.004);
        let (a_full, _, _) = angular_accel_setpoint(&ws, &wm, 13.0, 13.0, (13.0, 13.0), &g, &rs, &zero, &cfg, 0.004);
        assert_eq!(a_half.x, 4.0 * a_full.x);
    }

    #[test]
    fn scale_factors_clamp() {
        let cfg = AttitudeConfig { v_min: 0.1, ..Default::default() };
        let rs = RateLoopState::default();
        let ws = Vector3::new(1.0, 1.0, 1.0);
        let zero = Vector3::zeros();
        let g = scalar_gains(1.0, 0.0, 0.0);
        let (a, _, flags) = angular_accel_setpoint(&ws, &zero, 1.0, 1.0, (13.0, 13.0), &g, &rs, &zero, &cfg, 0.004);
        assert_eq!(a.x, SCALE_MAX);
        assert!(flags.scale_saturated);
    }

    #[test]
    fn integrator_clamps() {
        let cfg = AttitudeConfig { integrator_bound: [0.01, 0.01, 0.01], ..Default::default() };
        let mut rs = RateLoopState::default();
        let ws = Vector3::new(1.0, -1.0, 0.0);
        let zero = Vector3::zeros();
        let g = scalar_gains(0.0, 0.0, 1.0);
        let mut sat = false;
        for _ in 0..10 {
            let (_, next, flags) =
                angular_accel_setpoint(&ws, &zero, 13.0, 13.0, (13.0, 13.0), &g, &rs, &zero, &cfg, 0.004);
            rs = next;
            sat |= flags.integrator_saturated;
        }
        assert_eq!(rs.integrator, Vector3::new(0.01, -0.01, 0.0));
        assert!(sat);
    }
}
