use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// RCAC hyperparameters for one scalar channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcacHyper {
    /// Initial covariance scale, `P(0) = p0 * I`.
    pub p0: f64,
    /// Weight on the past control computed with the candidate gains.
    pub ru: f64,
    /// Weight on the retrospective performance.
    pub rz: f64,
    /// Coefficient of the filter `sigma / q`; its sign is the control direction.
    pub sigma: f64,
    /// Initial gain vector. Empty means zero.
    #[serde(default)]
    pub theta0: Vec<f64>,
    /// Per-component magnitude bound applied after each update.
    #[serde(default)]
    pub theta_max: Option<Vec<f64>>,
}

impl RcacHyper {
    pub fn new(p0: f64, ru: f64, rz: f64, sigma: f64) -> Self {
        Self { p0, ru, rz, sigma, theta0: Vec::new(), theta_max: None }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.p0 > 0.0) {
            return Err(Error::invalid("P0 must be positive"));
        }
        if !(self.rz > 0.0) {
            return Err(Error::invalid("Rz must be positive"));
        }
        if !(self.ru >= 0.0) {
            return Err(Error::invalid("Ru must be non-negative"));
        }
        if !(self.sigma != 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("sigma must be non-zero"));
        }
        if !self.theta0.is_empty() && self.theta0.len() != n {
            return Err(Error::invalid(format!("theta0 must have {n} entries")));
        }
        if let Some(b) = &self.theta_max {
            if b.len() != n || !b.iter().all(|&x| x >= 0.0) {
                return Err(Error::invalid(format!("theta_max must have {n} non-negative entries")));
            }
        }
        Ok(())
    }

    pub fn initial_theta(&self, n: usize) -> DVector<f64> {
        if self.theta0.is_empty() {
            DVector::zeros(n)
        } else {
            DVector::from_column_slice(&self.theta0)
        }
    }
}

/// Why a channel stopped adapting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreezeReason {
    /// Covariance lost positive definiteness.
    Covariance,
    /// Performance or regressor was NaN or infinite.
    NonFinite,
}

/// One-step retrospective sample kept between updates.
#[derive(Debug, Clone, PartialEq)]
struct Buffered {
    phi: DVector<f64>,
    u: f64,
}

/// Adaptive gain vector, covariance and the one-step-delayed buffers of a
/// single RCAC channel.
#[derive(Debug, Clone, PartialEq)]
pub struct RcacState {
    pub theta: DVector<f64>,
    pub p: DMatrix<f64>,
    prev: Option<Buffered>,
    /// Integral of the performance variable used by PI regressors.
    pub integ: f64,
    /// Number of gain updates performed.
    pub k: u64,
    pub frozen: Option<FreezeReason>,
}

impl RcacState {
    pub fn new(n: usize, hyper: &RcacHyper) -> Self {
        Self {
            theta: hyper.initial_theta(n),
            p: DMatrix::identity(n, n) * hyper.p0,
            prev: None,
            integ: 0.0,
            k: 0,
            frozen: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    /// Regressor and control of the previous step, if buffered.
    pub fn previous(&self) -> Option<(&DVector<f64>, f64)> {
        self.prev.as_ref().map(|b| (&b.phi, b.u))
    }

    /// Drops the buffered sample so the next call to [`update`](Self::update)
    /// performs no gain update.
    pub fn clear_buffer(&mut self) {
        self.prev = None;
    }

    /// One RCAC step.
    ///
    /// With the filter `G_f = sigma / q` the retrospective performance is
    /// `zhat(theta) = z + sigma * (phi_prev' theta - u_prev)`. The gains
    /// minimise the cumulative cost
    ///
    /// ```text
    /// sum_i [ Rz zhat_i(theta)^2 + Ru (phi_{i-1}' theta)^2 ] + (theta - theta0)' (P0 I)^-1 (theta - theta0)
    /// ```
    ///
    /// which is tracked exactly by a two-row weighted RLS update. The first
    /// call has nothing buffered and leaves the gains at `theta0`. Returns
    /// `u = phi' theta` with the updated gains; `(phi, u)` is buffered for
    /// the next step.
    pub fn update(&mut self, z: f64, phi: &DVector<f64>, hyper: &RcacHyper) -> f64 {
        if !z.is_finite() || !phi.iter().all(|x| x.is_finite()) {
            self.frozen = Some(FreezeReason::NonFinite);
            self.prev = None;
            return 0.0;
        }
        if self.frozen.is_none() {
            if let Some(prev) = self.prev.take() {
                self.rls_step(z, &prev, hyper);
            }
        }
        let u = phi.dot(&self.theta);
        self.prev = Some(Buffered { phi: phi.clone(), u });
        u
    }

    /// Output with the current gains and no learning. The buffer is dropped
    /// so learning restarts cleanly later.
    pub fn hold(&mut self, phi: &DVector<f64>) -> f64 {
        self.prev = None;
        let u = phi.dot(&self.theta);
        if u.is_finite() {
            u
        } else {
            0.0
        }
    }

    fn rls_step(&mut self, z: f64, prev: &Buffered, hyper: &RcacHyper) {
        let n = self.dim();
        let rows = if hyper.ru > 0.0 { 2 } else { 1 };
        let mut phi_bar = DMatrix::zeros(rows, n);
        let mut y_bar = DVector::zeros(rows);
        let mut weight = DVector::zeros(rows);
        phi_bar.set_row(0, &(prev.phi.transpose() * hyper.sigma));
        y_bar[0] = hyper.sigma * prev.u - z;
        weight[0] = hyper.rz;
        if rows == 2 {
            phi_bar.set_row(1, &prev.phi.transpose());
            weight[1] = hyper.ru;
        }

        let p = &self.p;
        let pt = p * phi_bar.transpose();
        let mut inner = &phi_bar * &pt;
        for i in 0..rows {
            inner[(i, i)] += 1.0 / weight[i];
        }
        let Some(inner_inv) = inner.try_inverse() else {
            self.frozen = Some(FreezeReason::Covariance);
            return;
        };
        let mut p_next = p - &pt * inner_inv * pt.transpose();
        p_next = (&p_next + p_next.transpose()) * 0.5;
        if p_next.clone().cholesky().is_none() {
            self.frozen = Some(FreezeReason::Covariance);
            return;
        }

        let residual = y_bar - &phi_bar * &self.theta;
        let weighted = residual.component_mul(&weight);
        let mut theta = &self.theta + &p_next * phi_bar.transpose() * weighted;
        if let Some(bound) = &hyper.theta_max {
            for (t, b) in theta.iter_mut().zip(bound) {
                *t = t.clamp(-b, *b);
            }
        }
        if !theta.iter().all(|x| x.is_finite()) {
            self.frozen = Some(FreezeReason::NonFinite);
            return;
        }
        self.theta = theta;
        self.p = p_next;
        self.k += 1;
    }
}
