use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{AircraftState, Environment, EulerAngles};
use crate::wrap_angle;

/// What the autopilot sees of the aircraft.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurements {
    /// Position, Earth frame, m.
    pub r: Vector3<f64>,
    /// Altitude, m.
    pub h: f64,
    pub euler: EulerAngles,
    /// Body rates, rad/s.
    pub omega: Vector3<f64>,
    pub true_airspeed: f64,
    pub indicated_airspeed: f64,
    /// Horizontal ground speed, m/s.
    pub ground_speed: f64,
    /// Ground velocity, Earth frame, m/s.
    pub ground_velocity: Vector3<f64>,
    pub t: f64,
}

impl Measurements {
    /// Climb rate, m/s (positive up).
    pub fn climb_rate(&self) -> f64 {
        -self.ground_velocity.z
    }
}

/// Standard deviations of zero-mean additive sensor noise. All zero by default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    pub position: f64,
    pub attitude: f64,
    pub rate: f64,
    pub airspeed: f64,
    pub velocity: f64,
}

impl NoiseSpec {
    pub fn is_silent(&self) -> bool {
        self.position == 0.0 && self.attitude == 0.0 && self.rate == 0.0 && self.airspeed == 0.0 && self.velocity == 0.0
    }
}

fn draw<R: Rng + ?Sized>(rng: &mut R, std: f64) -> f64 {
    if std > 0.0 {
        Normal::new(0.0, std).map(|n| n.sample(rng)).unwrap_or(0.0)
    } else {
        0.0
    }
}

/// Extracts measurements from the true state. Without noise this is exact.
pub fn measure<R: Rng + ?Sized>(
    state: &AircraftState,
    env: &Environment,
    noise: Option<&NoiseSpec>,
    rng: &mut R,
) -> Measurements {
    let mut r = state.r;
    let mut euler = state.euler;
    let mut omega = state.omega;
    let mut vg = state.v;
    let mut vt = (state.v - env.wind()).norm();

    if let Some(n) = noise.filter(|n| !n.is_silent()) {
        for i in 0..3 {
            r[i] += draw(rng, n.position);
        }
        euler.phi = wrap_angle(euler.phi + draw(rng, n.attitude));
        euler.theta += draw(rng, n.attitude);
        euler.psi = wrap_angle(euler.psi + draw(rng, n.attitude));
        for i in 0..3 {
            omega[i] += draw(rng, n.rate);
        }
        for i in 0..3 {
            vg[i] += draw(rng, n.velocity);
        }
        vt = (vt + draw(rng, n.airspeed)).max(0.0);
    }

    Measurements {
        r,
        h: -r.z,
        euler,
        omega,
        true_airspeed: vt,
        indicated_airspeed: vt * (env.rho / env.rho0).sqrt(),
        ground_speed: (vg.x * vg.x + vg.y * vg.y).sqrt(),
        ground_velocity: vg,
        t: state.t,
    }
}
