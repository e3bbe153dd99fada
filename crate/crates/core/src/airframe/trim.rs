use nalgebra::{Matrix3, Vector3};

use super::{derivative, AircraftParams, AircraftState, Environment, EulerAngles, SurfaceCommand};
use crate::{Error, Result};

/// Straight-and-level equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trim {
    pub state: AircraftState,
    pub command: SurfaceCommand,
    /// Angle of attack at trim, rad (equal to the elevation angle).
    pub alpha: f64,
}

const MAX_ITERATIONS: usize = 50;
const TOLERANCE: f64 = 1e-6;

fn trim_point(speed: f64, x: &Vector3<f64>) -> (AircraftState, SurfaceCommand) {
    let (alpha, elevator, throttle) = (x[0], x[1], x[2]);
    let state = AircraftState {
        r: Vector3::zeros(),
        v: Vector3::new(speed, 0.0, 0.0),
        euler: EulerAngles::new(0.0, alpha, 0.0),
        omega: Vector3::zeros(),
        t: 0.0,
    };
    let cmd = SurfaceCommand { elevator, throttle, ..Default::default() };
    (state, cmd)
}

/// Longitudinal residual: north acceleration, down acceleration, pitch
/// acceleration.
fn residual(params: &AircraftParams, env: &Environment, speed: f64, x: &Vector3<f64>) -> Vector3<f64> {
    let (state, cmd) = trim_point(speed, x);
    let d = derivative(&state, &cmd, env, params);
    Vector3::new(d.v_dot.x, d.v_dot.z, d.omega_dot.y)
}

/// Finds the wings-level, zero-sideslip equilibrium at the given airspeed by
/// Newton iteration on (angle of attack, elevator, throttle).
pub fn trim_search(params: &AircraftParams, env: &Environment, speed: f64) -> Result<Trim> {
    if !(speed > 0.0) || env.wind().norm() > 0.0 {
        return Err(Error::invalid("trim requires positive airspeed and calm air"));
    }
    let mut x = Vector3::new(0.05, 0.0, 0.3);
    let mut res = residual(params, env, speed, &x);
    for _ in 0..MAX_ITERATIONS {
        if res.amax() < 1e-12 {
            break;
        }
        let h = 1e-7;
        let mut jac = Matrix3::zeros();
        for j in 0..3 {
            let mut xp = x;
            xp[j] += h;
            let mut xm = x;
            xm[j] -= h;
            let col = (residual(params, env, speed, &xp) - residual(params, env, speed, &xm)) / (2.0 * h);
            jac.set_column(j, &col);
        }
        let Some(dx) = jac.lu().solve(&(-res)) else {
            break;
        };
        x += dx;
        res = residual(params, env, speed, &x);
    }

    let (state, command) = trim_point(speed, &x);
    let d = derivative(&state, &command, env, params);
    let worst = d.v_dot.amax().max(d.omega_dot.amax());
    let in_range = (-1.0..=1.0).contains(&command.elevator)
        && (0.0..=1.0).contains(&command.throttle)
        && x[0].abs() < params.aero.alpha_max;
    if !(worst < TOLERANCE) || !in_range {
        return Err(Error::TrimFailure { residual: worst, iterations: MAX_ITERATIONS });
    }
    Ok(Trim { state, command, alpha: x[0] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airframe::step;

    #[test]
    fn trim_residual_is_small() {
        let params = AircraftParams::default();
        let env = Environment::default();
        let trim = trim_search(&params, &env, 13.0).unwrap();
        let d = derivative(&trim.state, &trim.command, &env, &params);
        assert!(d.v_dot.amax() < 1e-6);
        assert!(d.omega_dot.amax() < 1e-6);
        assert_eq!(trim.state.euler.phi, 0.0);
        assert_eq!(trim.command.aileron_left, 0.0);
        assert_eq!(trim.command.aileron_right, 0.0);
        assert_eq!(trim.command.rudder, 0.0);
    }

    #[test]
    fn slower_trim_needs_more_alpha() {
        let params = AircraftParams::default();
        let env = Environment::default();
        let slow = trim_search(&params, &env, 11.0).unwrap();
        let fast = trim_search(&params, &env, 16.0).unwrap();
        assert!(slow.alpha > fast.alpha);
    }

    #[test]
    fn trim_holds_altitude_for_one_second() {
        let params = AircraftParams::default();
        let env = Environment::default();
        let trim = trim_search(&params, &env, 13.0).unwrap();
        let mut s = trim.state;
        s.r.z = -50.0;
        for _ in 0..250 {
            s = step(&s, &trim.command, &env, &params, 0.004).unwrap();
        }
        assert!((s.altitude() - 50.0).abs() < 0.5);
    }

    #[test]
    fn unreachable_speed_fails() {
        let params = AircraftParams::default();
        let env = Environment::default();
        assert!(matches!(trim_search(&params, &env, 60.0), Err(Error::TrimFailure { .. })));
    }
}
