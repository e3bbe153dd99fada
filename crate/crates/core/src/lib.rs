//! Fixed-wing cascaded autopilot with retrospective-cost adaptive augmentation.
//!
//! The crate is organised the same way the control loop is wired:
//!
//! - [`airframe`]: 6-DOF rigid-body plant, actuator faults, sensors, trim.
//! - [`mission`]: waypoint sequencing (climb, loiter, land) and scripted pilot.
//! - [`position`]: energy-based longitudinal control and L1 lateral guidance.
//! - [`attitude`]: attitude and rate laws, gain degradation, control allocation.
//! - [`rcac`]: retrospective cost adaptive control channels and the batch oracle.
//! - [`scenario`]: closed-loop runner, metrics, sweeps, CSV telemetry and SVG plots.
//!
//! Frames follow the usual flight-dynamics conventions: the Earth frame is
//! north-east-down, the body frame is forward-right-down, and attitude is a
//! 3-2-1 (azimuth, elevation, bank) Euler sequence.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod airframe;
pub mod attitude;
pub mod error;
pub mod mission;
pub mod position;
pub mod rcac;
pub mod scenario;

pub use error::{Error, Result};

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(angle: f64) -> f64 {
    use std::f64::consts::PI;
    let mut a = angle % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}
