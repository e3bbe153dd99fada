use nalgebra::{DVector, Vector3};

use super::{build_regressor_p, build_regressor_pi, FreezeReason, RcacHyper, RcacState};
use crate::attitude::{AdaptiveInputs, Augmentation};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelId {
    Theta,
    Phi,
    OmegaX,
    OmegaY,
    OmegaZ,
}

impl ChannelId {
    pub const ALL: [ChannelId; 5] =
        [ChannelId::Theta, ChannelId::Phi, ChannelId::OmegaX, ChannelId::OmegaY, ChannelId::OmegaZ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelId::Theta => "theta",
            ChannelId::Phi => "phi",
            ChannelId::OmegaX => "omega_x",
            ChannelId::OmegaY => "omega_y",
            ChannelId::OmegaZ => "omega_z",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegressorKind {
    Proportional,
    /// The integral is clamped to `+/- bound`.
    ProportionalIntegral {
        bound: f64,
    },
}

impl RegressorKind {
    pub fn dim(self) -> usize {
        match self {
            RegressorKind::Proportional => 1,
            RegressorKind::ProportionalIntegral { .. } => 2,
        }
    }
}

/// A scalar adaptive law `u = phi(z)' theta` with its RCAC state.
#[derive(Debug, Clone, PartialEq)]
pub struct RcacChannel {
    pub id: ChannelId,
    pub kind: RegressorKind,
    pub hyper: RcacHyper,
    pub state: RcacState,
    pub enabled: bool,
}

impl RcacChannel {
    pub fn new(id: ChannelId, kind: RegressorKind, hyper: RcacHyper, enabled: bool) -> Result<Self> {
        hyper.validate(kind.dim())?;
        let state = RcacState::new(kind.dim(), &hyper);
        Ok(Self { id, kind, hyper, state, enabled })
    }

    fn regressor(&mut self, z: f64, dt: f64) -> DVector<f64> {
        match self.kind {
            RegressorKind::Proportional => build_regressor_p(z),
            RegressorKind::ProportionalIntegral { bound } => {
                let (phi, integ) = build_regressor_pi(z, self.state.integ, dt, bound);
                if integ.is_finite() {
                    self.state.integ = integ;
                }
                phi
            }
        }
    }

    /// Runs the channel for one step. Disabled channels output zero and keep
    /// their gains; with `learning` off the gains are held but still applied.
    pub fn step(&mut self, z: f64, dt: f64, learning: bool) -> f64 {
        if !self.enabled {
            return 0.0;
        }
        let phi = self.regressor(z, dt);
        if learning {
            self.state.update(z, &phi, &self.hyper)
        } else {
            self.state.hold(&phi)
        }
    }

    pub fn frozen(&self) -> Option<FreezeReason> {
        self.state.frozen
    }
}

/// Performance variables consumed by the bank.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Performance {
    pub e_theta: f64,
    pub e_phi: f64,
    pub e_omega: Vector3<f64>,
}

/// The five independent channels of the adaptive attitude controller.
#[derive(Debug, Clone, PartialEq)]
pub struct RcacBank {
    pub theta: RcacChannel,
    pub phi: RcacChannel,
    pub omega: [RcacChannel; 3],
    /// Gains are only updated while this is set.
    pub learning: bool,
}

impl RcacBank {
    pub fn new(theta: RcacChannel, phi: RcacChannel, omega: [RcacChannel; 3]) -> Self {
        Self { theta, phi, omega, learning: true }
    }

    pub fn channel(&self, id: ChannelId) -> &RcacChannel {
        match id {
            ChannelId::Theta => &self.theta,
            ChannelId::Phi => &self.phi,
            ChannelId::OmegaX => &self.omega[0],
            ChannelId::OmegaY => &self.omega[1],
            ChannelId::OmegaZ => &self.omega[2],
        }
    }

    pub fn channel_mut(&mut self, id: ChannelId) -> &mut RcacChannel {
        match id {
            ChannelId::Theta => &mut self.theta,
            ChannelId::Phi => &mut self.phi,
            ChannelId::OmegaX => &mut self.omega[0],
            ChannelId::OmegaY => &mut self.omega[1],
            ChannelId::OmegaZ => &mut self.omega[2],
        }
    }

    pub fn channels(&self) -> impl Iterator<Item = &RcacChannel> {
        ChannelId::ALL.into_iter().map(|id| self.channel(id))
    }

    pub fn any_frozen(&self) -> bool {
        self.channels().any(|c| c.frozen().is_some())
    }

    pub fn update_attitude(&mut self, e_theta: f64, e_phi: f64) -> (f64, f64) {
        let learning = self.learning;
        (self.theta.step(e_theta, 0.0, learning), self.phi.step(e_phi, 0.0, learning))
    }

    pub fn update_rates(&mut self, e_omega: &Vector3<f64>, dt: f64) -> Vector3<f64> {
        let learning = self.learning;
        Vector3::from_fn(|i, _| self.omega[i].step(e_omega[i], dt, learning))
    }

    /// Updates every channel from its own performance variable.
    pub fn rcac_bank(&mut self, perf: &Performance, dt: f64) -> AdaptiveInputs {
        let (u_theta, u_phi) = self.update_attitude(perf.e_theta, perf.e_phi);
        let u_omega = self.update_rates(&perf.e_omega, dt);
        AdaptiveInputs { u_theta, u_phi, u_omega }
    }
}

impl Augmentation for RcacBank {
    fn attitude_terms(&mut self, e_theta: f64, e_phi: f64) -> (f64, f64) {
        self.update_attitude(e_theta, e_phi)
    }

    fn rate_terms(&mut self, e_omega: &Vector3<f64>, dt: f64) -> Vector3<f64> {
        self.update_rates(e_omega, dt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bank() -> RcacBank {
        let h = RcacHyper::new(1.0, 0.001, 1.0, -0.1);
        let p = |id| RcacChannel::new(id, RegressorKind::Proportional, h.clone(), true).unwrap();
        let pi =
            |id| RcacChannel::new(id, RegressorKind::ProportionalIntegral { bound: 0.5 }, h.clone(), true).unwrap();
        RcacBank::new(
            p(ChannelId::Theta),
            p(ChannelId::Phi),
            [pi(ChannelId::OmegaX), pi(ChannelId::OmegaY), pi(ChannelId::OmegaZ)],
        )
    }

    #[test]
    fn zero_performance_gives_zero_inputs() {
        let mut b = bank();
        for _ in 0..20 {
            let u = b.rcac_bank(&Performance::default(), 0.004);
            assert!(u.is_zero());
        }
    }

    #[test]
    fn disabled_channel_holds_gain() {
        let mut b = bank();
        b.phi.enabled = false;
        for i in 0..50 {
            let e = 0.1 * (i as f64 * 0.3).sin();
            let perf = Performance { e_theta: e, e_phi: e, e_omega: Vector3::new(e, e, e) };
            let u = b.rcac_bank(&perf, 0.004);
            assert_eq!(u.u_phi, 0.0);
        }
        assert_eq!(b.phi.state.theta[0], 0.0);
        assert!(b.theta.state.theta[0] != 0.0);
    }

    #[test]
    fn update_order_does_not_matter() {
        let mut a = bank();
        let mut b = bank();
        for i in 0..100 {
            let t = i as f64 * 0.05;
            let perf = Performance {
                e_theta: t.sin() * 0.1,
                e_phi: t.cos() * 0.2,
                e_omega: Vector3::new(0.3 * t.sin(), -0.1 * t.cos(), 0.05),
            };
            let ua = a.rcac_bank(&perf, 0.004);
            // reverse order on the second bank
            let uw = b.update_rates(&perf.e_omega, 0.004);
            let up = b.phi.step(perf.e_phi, 0.0, true);
            let ut = b.theta.step(perf.e_theta, 0.0, true);
            assert_eq!(ua.u_omega, uw);
            assert_eq!(ua.u_phi, up);
            assert_eq!(ua.u_theta, ut);
        }
        assert_eq!(a, b);
    }

    #[test]
    fn holding_keeps_gains_and_applies_them() {
        let mut b = bank();
        for _ in 0..100 {
            b.update_attitude(0.2, 0.0);
        }
        let theta = b.theta.state.theta[0];
        assert!(theta > 0.0);
        b.learning = false;
        let (u, _) = b.update_attitude(0.1, 0.0);
        assert_eq!(b.theta.state.theta[0], theta);
        assert_eq!(u, theta * 0.1);
        assert!(b.theta.state.previous().is_none());
    }
}
