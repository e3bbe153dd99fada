//! Dense reference solution of the retrospective cost, used to check the
//! recursive update.

use nalgebra::{DMatrix, DVector};

use super::RcacHyper;

/// One retrospective sample: previous regressor, previous control, and the
/// performance measured afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct RetroSample {
    pub phi_prev: DVector<f64>,
    pub u_prev: f64,
    pub z: f64,
}

/// Cumulative retrospective cost of `theta` over `history`.
pub fn retrospective_cost(history: &[RetroSample], hyper: &RcacHyper, theta: &DVector<f64>) -> f64 {
    let theta0 = hyper.initial_theta(theta.len());
    let d = theta - &theta0;
    let mut cost = d.dot(&d) / hyper.p0;
    for s in history {
        let zhat = s.z + hyper.sigma * (s.phi_prev.dot(theta) - s.u_prev);
        let u = s.phi_prev.dot(theta);
        cost += hyper.rz * zhat * zhat + hyper.ru * u * u;
    }
    cost
}

/// Minimiser of [`retrospective_cost`] from its normal equations.
///
/// # Panics
///
/// If the history is empty or the normal matrix is not positive definite,
/// which the `1 / P0` regularisation rules out for valid hyperparameters.
pub fn batch_oracle(history: &[RetroSample], hyper: &RcacHyper) -> DVector<f64> {
    assert!(!history.is_empty(), "batch oracle needs at least one sample");
    let n = history[0].phi_prev.len();
    let theta0 = hyper.initial_theta(n);
    let mut a = DMatrix::identity(n, n) / hyper.p0;
    let mut b = &theta0 / hyper.p0;
    for s in history {
        let phi = &s.phi_prev;
        let outer = phi * phi.transpose();
        // Rz (sigma phi)(sigma phi)' + Ru phi phi'
        a += &outer * (hyper.rz * hyper.sigma * hyper.sigma + hyper.ru);
        // Rz (sigma phi)(sigma u_prev - z)
        b += phi * (hyper.rz * hyper.sigma * (hyper.sigma * s.u_prev - s.z));
    }
    a.cholesky().expect("regularised normal matrix is positive definite").solve(&b)
}
