//! Property checks shared by the invariant suite and the acceptance target.
#![allow(dead_code)]

use adaptive_autopilot::airframe::{
    apply_fault, euler_rates, step, AircraftParams, AircraftState, Environment, EulerAngles, FaultConfig, Surface,
    SurfaceCommand,
};
use adaptive_autopilot::attitude::euler_rates_to_body;
use adaptive_autopilot::mission::{Mode, Phase};
use adaptive_autopilot::rcac::{batch_oracle, RcacHyper, RcacState, RetroSample};
use adaptive_autopilot::scenario::{metrics, Metrics, TelemetryRecord};
use nalgebra::{DVector, Vector3};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const CASES: u32 = 128;

pub fn config() -> ProptestConfig {
    ProptestConfig { cases: CASES, failure_persistence: None, ..ProptestConfig::default() }
}

/// A recursive RCAC run: hyperparameters plus a stream of (z, phi).
#[derive(Debug, Clone)]
pub struct Stream {
    pub hyper: RcacHyper,
    pub steps: Vec<(f64, Vec<f64>)>,
}

pub fn hyper_strategy() -> impl Strategy<Value = RcacHyper> {
    (0.1..10.0f64, 0.0..0.1f64, 0.5..2.0f64, 0.05..1.0f64, any::<bool>())
        .prop_map(|(p0, ru, rz, s, neg)| RcacHyper::new(p0, ru, rz, if neg { -s } else { s }))
}

pub fn stream_strategy(dim: usize, max_len: usize) -> impl Strategy<Value = Stream> {
    let step = (-1.0..1.0f64, prop::collection::vec(-1.0..1.0f64, dim));
    (hyper_strategy(), prop::collection::vec(step, 2..=max_len)).prop_map(|(hyper, steps)| Stream { hyper, steps })
}

/// Runs the recursion, calling `check` with (state before, state after,
/// history so far) after every step.
pub fn run_stream(
    s: &Stream,
    mut check: impl FnMut(&RcacState, &RcacState, &[RetroSample]) -> Result<(), TestCaseError>,
) -> Result<Vec<DVector<f64>>, TestCaseError> {
    let n = s.steps[0].1.len();
    let mut state = RcacState::new(n, &s.hyper);
    let mut history = Vec::new();
    let mut thetas = Vec::new();
    for (z, phi) in &s.steps {
        let phi = DVector::from_column_slice(phi);
        if let Some((phi_prev, u_prev)) = state.previous() {
            history.push(RetroSample { phi_prev: phi_prev.clone(), u_prev, z: *z });
        }
        let before = state.clone();
        state.update(*z, &phi, &s.hyper);
        check(&before, &state, &history)?;
        thetas.push(state.theta.clone());
    }
    Ok(thetas)
}

pub fn check_rls_matches_oracle(s: &Stream, tol: f64) -> Result<(), TestCaseError> {
    run_stream(s, |_, after, history| {
        if history.is_empty() {
            prop_assert!(after.theta.iter().all(|&x| x == 0.0));
        } else {
            let oracle = batch_oracle(history, &s.hyper);
            let err = (&after.theta - &oracle).amax();
            prop_assert!(err < tol, "step {}: |dtheta| = {err:e}", history.len());
        }
        Ok(())
    })
    .map(|_| ())
}

/// `x' P' x <= x' P x` on random probes and on the eigenvectors of `P - P'`.
pub fn check_covariance_monotone(s: &Stream, probes: &[Vec<f64>]) -> Result<(), TestCaseError> {
    run_stream(s, |before, after, _| {
        let diff = &before.p - &after.p;
        let scale = before.p.amax().max(1.0);
        let eig = diff.clone().symmetric_eigenvalues();
        prop_assert!(eig.min() >= -1e-12 * scale, "P - P' has eigenvalue {}", eig.min());
        for x in probes {
            let x = DVector::from_iterator(before.p.nrows(), x.iter().copied().cycle().take(before.p.nrows()));
            let q0 = (x.transpose() * &before.p * &x)[0];
            let q1 = (x.transpose() * &after.p * &x)[0];
            prop_assert!(q1 <= q0 + 1e-12 * scale * x.norm_squared());
        }
        Ok(())
    })
    .map(|_| ())
}

pub fn check_p_symmetric(s: &Stream) -> Result<(), TestCaseError> {
    run_stream(s, |_, after, _| {
        let asym = (&after.p - after.p.transpose()).amax();
        prop_assert!(asym <= 1e-12, "asymmetry {asym:e}");
        prop_assert!(after.p.clone().cholesky().is_some(), "P lost definiteness");
        Ok(())
    })
    .map(|_| ())
}

pub fn check_rcac_deterministic(s: &Stream) -> Result<(), TestCaseError> {
    let a = run_stream(s, |_, _, _| Ok(()))?;
    let b = run_stream(s, |_, _, _| Ok(()))?;
    for (x, y) in a.iter().zip(&b) {
        prop_assert!(x.iter().zip(y.iter()).all(|(p, q)| p.to_bits() == q.to_bits()));
    }
    Ok(())
}

/// Airborne state near trim with random attitude, rates and velocity.
pub fn state_strategy() -> impl Strategy<Value = AircraftState> {
    (
        (-1.0..1.0f64, -0.6..0.6f64, -3.0..3.0f64),
        (9.0..18.0f64, -2.0..2.0f64, -2.0..2.0f64),
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
        5.0..100.0f64,
    )
        .prop_map(|((phi, theta, psi), (u, v, w), (p, q, r), h)| {
            let euler = EulerAngles::new(psi, theta, phi);
            AircraftState {
                r: Vector3::new(0.0, 0.0, -h),
                v: euler.body_to_earth() * Vector3::new(u, v, w),
                euler,
                omega: Vector3::new(p, q, r),
                t: 0.0,
            }
        })
}

pub fn command_strategy() -> impl Strategy<Value = SurfaceCommand> {
    (-1.2..1.2f64, -1.2..1.2f64, -1.2..1.2f64, -1.2..1.2f64, -0.2..1.2f64).prop_map(|(al, ar, e, r, t)| {
        SurfaceCommand { aileron_left: al, aileron_right: ar, elevator: e, rudder: r, throttle: t }
    })
}

pub fn check_step_deterministic(state: &AircraftState, cmd: &SurfaceCommand) -> Result<(), TestCaseError> {
    let params = AircraftParams::default();
    let env = Environment::default();
    let mut a = *state;
    let mut b = *state;
    for _ in 0..25 {
        a = step(&a, cmd, &env, &params, 0.004).map_err(|e| TestCaseError::fail(e.to_string()))?;
        b = step(&b, cmd, &env, &params, 0.004).map_err(|e| TestCaseError::fail(e.to_string()))?;
    }
    let bits = |s: &AircraftState| {
        [
            s.r.x,
            s.r.y,
            s.r.z,
            s.v.x,
            s.v.y,
            s.v.z,
            s.euler.phi,
            s.euler.theta,
            s.euler.psi,
            s.omega.x,
            s.omega.y,
            s.omega.z,
        ]
        .map(f64::to_bits)
    };
    prop_assert_eq!(bits(&a), bits(&b));
    Ok(())
}

/// Euler-rate to body-rate map followed by its inverse is the identity.
pub fn check_s_map_round_trip(theta: f64, phi: f64, rates: [f64; 3]) -> Result<(), TestCaseError> {
    let x = Vector3::from(rates);
    let omega = euler_rates_to_body(theta, phi, &x);
    let back = euler_rates(&EulerAngles::new(0.3, theta, phi), &omega);
    let err = (back - x).amax();
    prop_assert!(err <= 1e-12 * x.amax().max(1.0), "round trip error {err:e}");
    Ok(())
}

pub fn surface_strategy() -> impl Strategy<Value = Surface> {
    prop_oneof![Just(Surface::AileronLeft), Just(Surface::AileronRight), Just(Surface::Elevator), Just(Surface::Rudder)]
}

pub fn check_fault_passthrough(
    cmd: &SurfaceCommand,
    surface: Surface,
    stuck: f64,
    t_start: f64,
    t: f64,
) -> Result<(), TestCaseError> {
    let fault = FaultConfig { surface, stuck_value: stuck, t_start };
    let out = apply_fault(cmd, Some(&fault), t);
    for s in [Surface::AileronLeft, Surface::AileronRight, Surface::Elevator, Surface::Rudder] {
        if s == surface && t >= t_start {
            prop_assert_eq!(out.get(s), stuck);
        } else {
            prop_assert_eq!(out.get(s).to_bits(), cmd.get(s).to_bits());
        }
    }
    prop_assert_eq!(out.throttle.to_bits(), cmd.throttle.to_bits());
    prop_assert_eq!(apply_fault(cmd, None, t), *cmd);
    Ok(())
}

fn record(t: f64, mode: Mode, phase: Phase, e: (f64, f64, f64)) -> TelemetryRecord {
    TelemetryRecord {
        t,
        phase,
        mode,
        north: 0.0,
        east: 0.0,
        down: -20.0,
        h: 20.0,
        airspeed: 13.0,
        phi: 0.2,
        theta: 0.05,
        psi: 0.0,
        phi_s: 0.2 + e.0,
        theta_s: 0.05 + e.1,
        h_s: 20.0,
        p: 0.0,
        q: 0.0,
        r: 0.0,
        p_s: 0.0,
        q_s: 0.0,
        r_s: 0.0,
        alpha_x: 0.0,
        alpha_y: 0.0,
        alpha_z: 0.0,
        aileron_left: 0.0,
        aileron_right: 0.0,
        elevator: 0.0,
        rudder: 0.0,
        throttle: 0.3,
        u_theta: 0.0,
        u_phi: 0.0,
        u_omega_x: 0.0,
        u_omega_y: 0.0,
        u_omega_z: 0.0,
        gain_theta: 0.0,
        gain_phi: 0.0,
        gain_omega_x_p: 0.0,
        gain_omega_x_i: 0.0,
        gain_omega_y_p: 0.0,
        gain_omega_y_i: 0.0,
        gain_omega_z_p: 0.0,
        gain_omega_z_i: 0.0,
        xtrack: e.2,
        flags: 0,
    }
}

/// Loiter records in mission mode with the given (bank, elevation,
/// cross-track) errors.
pub fn loiter_records(errors: &[(f64, f64, f64)]) -> Vec<TelemetryRecord> {
    errors.iter().enumerate().map(|(i, &e)| record(i as f64 * 0.004, Mode::Mission, Phase::Loiter, e)).collect()
}

/// Records outside the metric window: stabilized mode in any phase.
pub fn stabilized_records(errors: &[(f64, f64, f64)], t0: f64) -> Vec<TelemetryRecord> {
    errors.iter().enumerate().map(|(i, &e)| record(t0 + i as f64 * 0.004, Mode::Stabilized, Phase::Loiter, e)).collect()
}

pub fn error_strategy() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-0.5..0.5f64, -0.5..0.5f64, 0.0..20.0f64), 1..60)
}

pub fn check_normalization_identity(errors: &[(f64, f64, f64)]) -> Result<(), TestCaseError> {
    let (m, _) = metrics(&loiter_records(errors)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let n = m.normalized(&m);
    // a zero metric normalises to NaN; the identity holds where the baseline is non-zero
    for (v, base) in [(n.j_phi, m.j_phi), (n.j_theta, m.j_theta), (n.j_traj, m.j_traj)] {
        if base != 0.0 {
            prop_assert_eq!(v, 1.0);
        }
    }
    Ok(())
}

pub fn metrics_close(a: &Metrics, b: &Metrics, tol: f64) -> bool {
    (a.j_phi - b.j_phi).abs() <= tol && (a.j_theta - b.j_theta).abs() <= tol && (a.j_traj - b.j_traj).abs() <= tol
}
