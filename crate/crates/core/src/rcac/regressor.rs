use nalgebra::DVector;

/// Regressor of a proportional channel: `[z]`.
pub fn build_regressor_p(z: f64) -> DVector<f64> {
    DVector::from_element(1, z)
}

/// Regressor of a proportional-integral channel: `[z, integ + z dt]`.
/// Returns the regressor and the updated integral, clamped to `+/- bound`.
pub fn build_regressor_pi(z: f64, integ: f64, dt: f64, bound: f64) -> (DVector<f64>, f64) {
    let next = (integ + z * dt).clamp(-bound, bound);
    (DVector::from_column_slice(&[z, next]), next)
}
