//! Deterministic 6-DOF fixed-wing plant.
//!
//! The aircraft is a rigid body with diagonal inertia driven by a
//! linear-coefficient aerodynamic model, a body-axis thrust line and gravity.
//! The state is integrated with fixed-step RK4. Ailerons are modelled as two
//! independent surfaces so that a single one can be frozen by a
//! [`FaultConfig`].

mod aero;
mod dynamics;
mod fault;
mod sensors;
mod trim;

pub use aero::{aero_forces_moments, AirData};
pub use dynamics::{derivative, euler_rates, step, StateDerivative};
pub use fault::apply_fault;
pub use sensors::{measure, Measurements, NoiseSpec};
pub use trim::{trim_search, Trim};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default airframe shipped with the crate.
pub const DEFAULT_AIRFRAME_JSON: &str = include_str!("../../data/airframe.json");

/// Margin kept between the elevation angle and +/- pi/2.
pub const GIMBAL_GUARD: f64 = 0.01;

/// 3-2-1 Euler angles, radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerAngles {
    /// Azimuth (yaw), wrapped to (-pi, pi].
    pub psi: f64,
    /// Elevation (pitch), inside (-pi/2, pi/2).
    pub theta: f64,
    /// Bank (roll), wrapped to (-pi, pi].
    pub phi: f64,
}

impl EulerAngles {
    pub fn new(psi: f64, theta: f64, phi: f64) -> Self {
        Self { psi, theta, phi }
    }

    /// Direction cosine matrix taking body-frame vectors to the Earth frame.
    pub fn body_to_earth(&self) -> Matrix3<f64> {
        let (sps, cps) = self.psi.sin_cos();
        let (sth, cth) = self.theta.sin_cos();
        let (sph, cph) = self.phi.sin_cos();
        Matrix3::new(
            cth * cps,
            sph * sth * cps - cph * sps,
            cph * sth * cps + sph * sps,
            cth * sps,
            sph * sth * sps + cph * cps,
            cph * sth * sps - sph * cps,
            -sth,
            sph * cth,
            cph * cth,
        )
    }
}

/// Full simulation state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AircraftState {
    /// Position of the center of mass, Earth frame (NED), m.
    pub r: Vector3<f64>,
    /// Velocity relative to the ground, Earth frame, m/s.
    pub v: Vector3<f64>,
    pub euler: EulerAngles,
    /// Body angular velocity (roll, pitch, yaw rate), rad/s.
    pub omega: Vector3<f64>,
    /// Simulation time, s.
    pub t: f64,
}

impl AircraftState {
    /// Altitude above the origin; the Earth z axis points down.
    pub fn altitude(&self) -> f64 {
        -self.r.z
    }

    pub fn is_finite(&self) -> bool {
        self.r.iter().all(|x| x.is_finite())
            && self.v.iter().all(|x| x.is_finite())
            && self.omega.iter().all(|x| x.is_finite())
            && self.euler.psi.is_finite()
            && self.euler.theta.is_finite()
            && self.euler.phi.is_finite()
            && self.t.is_finite()
    }

    /// Checks the state invariants used as preconditions by [`step`].
    pub fn validate(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::NonFinite { quantity: "state" });
        }
        if self.euler.theta.abs() >= std::f64::consts::FRAC_PI_2 - GIMBAL_GUARD {
            return Err(Error::GimbalLock { theta: self.euler.theta });
        }
        Ok(())
    }
}

/// Linear aerodynamic coefficients. Angles in rad, rates non-dimensionalised
/// with `b / 2V` (roll, yaw) or `c / 2V` (pitch).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AeroCoefficients {
    pub c_lift_0: f64,
    pub c_lift_alpha: f64,
    pub c_drag_0: f64,
    pub induced_drag_factor: f64,
    pub c_side_beta: f64,
    pub c_m_0: f64,
    pub c_m_alpha: f64,
    pub c_m_q: f64,
    pub c_m_elevator: f64,
    pub c_roll_beta: f64,
    pub c_roll_p: f64,
    pub c_roll_r: f64,
    /// Roll moment per radian of a single aileron.
    pub c_roll_aileron: f64,
    pub c_yaw_beta: f64,
    pub c_yaw_r: f64,
    pub c_yaw_p: f64,
    pub c_yaw_rudder: f64,
    /// Angle of attack beyond which lift is held constant.
    pub alpha_max: f64,
}

impl AeroCoefficients {
    /// All coefficients zero: the airframe produces no aerodynamic load.
    pub fn zero() -> Self {
        Self {
            c_lift_0: 0.0,
            c_lift_alpha: 0.0,
            c_drag_0: 0.0,
            induced_drag_factor: 0.0,
            c_side_beta: 0.0,
            c_m_0: 0.0,
            c_m_alpha: 0.0,
            c_m_q: 0.0,
            c_m_elevator: 0.0,
            c_roll_beta: 0.0,
            c_roll_p: 0.0,
            c_roll_r: 0.0,
            c_roll_aileron: 0.0,
            c_yaw_beta: 0.0,
            c_yaw_r: 0.0,
            c_yaw_p: 0.0,
            c_yaw_rudder: 0.0,
            alpha_max: 0.25,
        }
    }
}

/// Maximum surface deflections, rad. Normalised commands scale these.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceLimits {
    pub aileron: f64,
    pub elevator: f64,
    pub rudder: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AircraftParams {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    /// kg
    pub mass: f64,
    /// Principal moments of inertia (roll, pitch, yaw), kg m^2.
    pub inertia: [f64; 3],
    /// m^2
    pub wing_area: f64,
    /// m
    pub span: f64,
    /// m
    pub chord: f64,
    pub aero: AeroCoefficients,
    pub surface_limits: SurfaceLimits,
    /// Static thrust at full throttle, N.
    pub max_thrust: f64,
    /// True airspeed at the reference trim condition, m/s.
    pub trim_true_airspeed: f64,
    /// Indicated airspeed at the reference trim condition, m/s.
    pub trim_indicated_airspeed: f64,
}

fn default_schema_version() -> u32 {
    1
}

impl Default for AircraftParams {
    fn default() -> Self {
        Self::from_json(DEFAULT_AIRFRAME_JSON).expect("bundled airframe is valid")
    }
}

impl AircraftParams {
    pub fn from_json(text: &str) -> Result<Self> {
        let params: Self = serde_json::from_str(text)?;
        params.validate()?;
        Ok(params)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) {
            return Err(Error::invalid("mass must be positive"));
        }
        if !self.inertia.iter().all(|&j| j > 0.0) {
            return Err(Error::invalid("inertia diagonal must be positive"));
        }
        if !(self.wing_area > 0.0 && self.span > 0.0 && self.chord > 0.0) {
            return Err(Error::invalid("wing geometry must be positive"));
        }
        let l = &self.surface_limits;
        if !(l.aileron > 0.0 && l.elevator > 0.0 && l.rudder > 0.0) {
            return Err(Error::invalid("deflection limits must be positive"));
        }
        if !(self.trim_true_airspeed > 0.0 && self.trim_indicated_airspeed > 0.0) {
            return Err(Error::invalid("trim airspeeds must be positive"));
        }
        if !(self.max_thrust >= 0.0) {
            return Err(Error::invalid("max thrust must be non-negative"));
        }
        Ok(())
    }

    pub fn inertia_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::from(self.inertia))
    }
}

/// Identifies one control surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surface {
    AileronLeft,
    AileronRight,
    Elevator,
    Rudder,
}

/// Normalised actuator command. Surfaces in [-1, 1], throttle in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SurfaceCommand {
    pub aileron_left: f64,
    pub aileron_right: f64,
    pub elevator: f64,
    pub rudder: f64,
    pub throttle: f64,
}

impl SurfaceCommand {
    pub fn clamped(&self) -> Self {
        Self {
            aileron_left: self.aileron_left.clamp(-1.0, 1.0),
            aileron_right: self.aileron_right.clamp(-1.0, 1.0),
            elevator: self.elevator.clamp(-1.0, 1.0),
            rudder: self.rudder.clamp(-1.0, 1.0),
            throttle: self.throttle.clamp(0.0, 1.0),
        }
    }

    pub fn get(&self, surface: Surface) -> f64 {
        match surface {
            Surface::AileronLeft => self.aileron_left,
            Surface::AileronRight => self.aileron_right,
            Surface::Elevator => self.elevator,
            Surface::Rudder => self.rudder,
        }
    }

    pub fn set(&mut self, surface: Surface, value: f64) {
        match surface {
            Surface::AileronLeft => self.aileron_left = value,
            Surface::AileronRight => self.aileron_right = value,
            Surface::Elevator => self.elevator = value,
            Surface::Rudder => self.rudder = value,
        }
    }
}

/// A surface frozen at a fixed normalised deflection from `t_start` onwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultConfig {
    pub surface: Surface,
    pub stuck_value: f64,
    pub t_start: f64,
}

impl FaultConfig {
    pub fn validate(&self) -> Result<()> {
        if !(-1.0..=1.0).contains(&self.stuck_value) {
            return Err(Error::invalid("stuck value outside [-1, 1]"));
        }
        if !(self.t_start >= 0.0) {
            return Err(Error::invalid("fault onset must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    /// Earth-frame wind velocity, m/s.
    pub wind: [f64; 3],
    /// Air density, kg/m^3.
    pub rho: f64,
    /// Sea-level density used for indicated airspeed, kg/m^3.
    pub rho0: f64,
    /// m/s^2
    pub g: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Self { wind: [0.0; 3], rho: 1.225, rho0: 1.225, g: 9.81 }
    }
}

impl Environment {
    pub fn wind(&self) -> Vector3<f64> {
        Vector3::from(self.wind)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho0 > 0.0 && self.g > 0.0) {
            return Err(Error::invalid("density and gravity must be positive"));
        }
        if !self.wind.iter().all(|w| w.is_finite()) {
            return Err(Error::invalid("wind must be finite"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_airframe_loads() {
        let p = AircraftParams::default();
        assert_eq!(p.schema_version, 1);
        assert!(p.mass > 0.0);
    }

    #[test]
    fn rejects_bad_mass() {
        let p = AircraftParams { mass: 0.0, ..Default::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn dcm_is_orthonormal() {
        let e = EulerAngles::new(0.4, -0.3, 1.1);
        let c = e.body_to_earth();
        let err = (c * c.transpose() - Matrix3::identity()).norm();
        assert!(err < 1e-14);
        // forward body axis points along the heading at zero pitch and bank
        let c = EulerAngles::new(std::f64::consts::FRAC_PI_2, 0.0, 0.0).body_to_earth();
        let fwd = c * Vector3::x();
        assert!((fwd - Vector3::y()).norm() < 1e-15);
    }

    #[test]
    fn altitude_is_negative_down() {
        let s = AircraftState {
            r: Vector3::new(0.0, 0.0, -20.0),
            v: Vector3::zeros(),
            euler: EulerAngles::default(),
            omega: Vector3::zeros(),
            t: 0.0,
        };
        assert_eq!(s.altitude(), 20.0);
    }
}
