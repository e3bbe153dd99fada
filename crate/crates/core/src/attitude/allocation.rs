use nalgebra::{Matrix3, Matrix3x4, Matrix4x3, Vector3, Vector4};

use crate::airframe::{AircraftParams, Environment, SurfaceCommand};
use crate::{Error, Result};

/// Fixed pseudo-inverse allocator from angular acceleration to normalised
/// surface deflections.
///
/// The effectiveness matrix maps `[aileron_left, aileron_right, elevator,
/// rudder]` (normalised) to body moments at the reference dynamic pressure
/// `0.5 * rho0 * V_I0^2`. Airspeed changes are handled by the scaling in the
/// rate law, not here.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlAllocator {
    inertia: Matrix3<f64>,
    effectiveness: Matrix3x4<f64>,
    pseudo_inverse: Matrix4x3<f64>,
}

impl ControlAllocator {
    pub fn new(params: &AircraftParams, env: &Environment) -> Result<Self> {
        let qbar = 0.5 * env.rho0 * params.trim_indicated_airspeed.powi(2);
        let qs = qbar * params.wing_area;
        let c = &params.aero;
        let lim = &params.surface_limits;
        let roll = qs * params.span * c.c_roll_aileron * lim.aileron;
        let pitch = qs * params.chord * c.c_m_elevator * lim.elevator;
        let yaw = qs * params.span * c.c_yaw_rudder * lim.rudder;
        #[rustfmt::skip]
        let effectiveness = Matrix3x4::new(
            roll, -roll, 0.0,   0.0,
            0.0,  0.0,   pitch, 0.0,
            0.0,  0.0,   0.0,   yaw,
        );
        Self::with_effectiveness(params.inertia_matrix(), effectiveness)
    }

    pub fn with_effectiveness(inertia: Matrix3<f64>, effectiveness: Matrix3x4<f64>) -> Result<Self> {
        let gram = effectiveness * effectiveness.transpose();
        let svd = gram.svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smax > 0.0) || smin <= smax * 1e-12 {
            return Err(Error::RankDeficientAllocation);
        }
        let gram_inv = gram.try_inverse().ok_or(Error::RankDeficientAllocation)?;
        let pseudo_inverse = effectiveness.transpose() * gram_inv;
        Ok(Self { inertia, effectiveness, pseudo_inverse })
    }

    pub fn effectiveness(&self) -> &Matrix3x4<f64> {
        &self.effectiveness
    }

    /// Deflections before clamping, ordered as the effectiveness columns.
    pub fn unclamped(&self, alpha_s: &Vector3<f64>) -> Vector4<f64> {
        self.pseudo_inverse * (self.inertia * alpha_s)
    }

    /// Maps the angular-acceleration setpoint to surface commands; throttle is
    /// passed through.
    pub fn allocate(&self, alpha_s: &Vector3<f64>, throttle: f64) -> SurfaceCommand {
        let d = self.unclamped(alpha_s);
        SurfaceCommand { aileron_left: d[0], aileron_right: d[1], elevator: d[2], rudder: d[3], throttle }.clamped()
    }
}

/// Convenience wrapper that builds the allocator on every call.
pub fn control_allocation(
    alpha_s: &Vector3<f64>,
    throttle: f64,
    params: &AircraftParams,
    env: &Environment,
) -> Result<SurfaceCommand> {
    Ok(ControlAllocator::new(params, env)?.allocate(alpha_s, throttle))
}
