//! Mission sequencing: climb-out toward a target, timed loiter, landing.

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::airframe::Measurements;
use crate::attitude::AttitudeSetpoint;
use crate::position::{horizontal, PathSegment, PositionSetpoint, TurnDirection};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Climb,
    Loiter,
    Land,
    Done,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Climb => "climb",
            Phase::Loiter => "loiter",
            Phase::Land => "land",
            Phase::Done => "done",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Mission,
    Stabilized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub phase: Phase,
    pub phase_entry_time: f64,
    pub mode: Mode,
}

impl PhaseState {
    /// Initial state for `mission` at time `t`.
    pub fn start(mission: &Mission, t: f64) -> Self {
        let mode = if mission.takeoff_script.is_some() { Mode::Stabilized } else { Mode::Mission };
        Self { phase: Phase::Climb, phase_entry_time: t, mode }
    }
}

/// One row of a pilot script, keyed by time since phase entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScriptEntry {
    pub t: f64,
    /// rad
    pub phi: f64,
    /// rad
    pub theta: f64,
    pub throttle: f64,
}

/// Piecewise-linear attitude and throttle commands emulating a pilot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PilotScript {
    pub entries: Vec<ScriptEntry>,
}

impl PilotScript {
    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::invalid("pilot script is empty"));
        }
        if !self.entries.windows(2).all(|w| w[0].t < w[1].t) {
            return Err(Error::invalid("pilot script times must increase"));
        }
        if !self.entries.iter().all(|e| [e.t, e.phi, e.theta, e.throttle].iter().all(|x| x.is_finite())) {
            return Err(Error::NonFinite { quantity: "pilot script" });
        }
        Ok(())
    }

    /// Duration covered by the table.
    pub fn end(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.t)
    }

    /// Interpolated entry at `tau`; holds the first or last entry outside
    /// the table.
    pub fn at(&self, tau: f64) -> ScriptEntry {
        let first = self.entries[0];
        let last = *self.entries.last().expect("validated script");
        if tau <= first.t {
            return ScriptEntry { t: tau, ..first };
        }
        if tau >= last.t {
            return ScriptEntry { t: tau, ..last };
        }
        let i = self.entries.partition_point(|e| e.t <= tau);
        let (a, b) = (self.entries[i - 1], self.entries[i]);
        let s = (tau - a.t) / (b.t - a.t);
        let lerp = |x: f64, y: f64| x + s * (y - x);
        ScriptEntry {
            t: tau,
            phi: lerp(a.phi, b.phi),
            theta: lerp(a.theta, b.theta),
            throttle: lerp(a.throttle, b.throttle),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotCommand {
    pub setpoint: AttitudeSetpoint,
    pub throttle: f64,
}

/// Waypoints, loiter and landing parameters. Horizontal points are
/// (north, east) in metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mission {
    pub launch: [f64; 2],
    pub target: [f64; 2],
    pub loiter_center: [f64; 2],
    pub loiter_radius: f64,
    #[serde(default = "clockwise")]
    pub loiter_direction: TurnDirection,
    /// s
    pub loiter_duration: f64,
    pub landing_line: [[f64; 2]; 2],
    /// m/s
    pub cruise_speed: f64,
    /// m
    pub climb_altitude: f64,
    /// Altitude-setpoint descent rate on the landing line, m/s.
    #[serde(default = "default_sink_rate")]
    pub landing_sink_rate: f64,
    /// m
    #[serde(default = "default_touchdown")]
    pub touchdown_altitude: f64,
    /// Loiter capture distance as a multiple of the radius.
    #[serde(default = "default_capture")]
    pub capture_factor: f64,
    #[serde(default)]
    pub takeoff_script: Option<PilotScript>,
    #[serde(default)]
    pub landing_script: Option<PilotScript>,
}

fn clockwise() -> TurnDirection {
    TurnDirection::Clockwise
}
fn default_sink_rate() -> f64 {
    1.5
}
fn default_touchdown() -> f64 {
    2.0
}
fn default_capture() -> f64 {
    1.5
}

impl Mission {
    /// Catapult launch and fully automatic flight: 30 m loiter for 60 s at
    /// 20 m altitude.
    pub fn sim_profile() -> Self {
        Self {
            launch: [0.0, 0.0],
            target: [300.0, 0.0],
            loiter_center: [200.0, 30.0],
            loiter_radius: 30.0,
            loiter_direction: TurnDirection::Clockwise,
            loiter_duration: 60.0,
            landing_line: [[200.0, -30.0], [-100.0, -30.0]],
            cruise_speed: 13.0,
            climb_altitude: 20.0,
            landing_sink_rate: default_sink_rate(),
            touchdown_altitude: default_touchdown(),
            capture_factor: default_capture(),
            takeoff_script: None,
            landing_script: None,
        }
    }

    /// Hand-flown takeoff and landing around an automatic 20 m loiter.
    pub fn exp_profile() -> Self {
        let entry = |t, phi, theta, throttle| ScriptEntry { t, phi, theta, throttle };
        Self {
            target: [250.0, 0.0],
            loiter_center: [150.0, 20.0],
            loiter_radius: 20.0,
            loiter_duration: 90.0,
            landing_line: [[150.0, -20.0], [-100.0, -20.0]],
            takeoff_script: Some(PilotScript {
                entries: vec![entry(0.0, 0.0, 0.2, 1.0), entry(5.0, 0.0, 0.2, 1.0), entry(7.0, 0.0, 0.05, 0.6)],
            }),
            landing_script: Some(PilotScript {
                entries: vec![entry(0.0, 0.0, 0.0, 0.3), entry(3.0, 0.0, -0.08, 0.15)],
            }),
            ..Self::sim_profile()
        }
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "sim_profile" => Ok(Self::sim_profile()),
            "exp_profile" => Ok(Self::exp_profile()),
            other => Err(Error::invalid(format!("unknown built-in mission `{other}`"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.loiter_radius > 0.0) {
            return Err(Error::invalid("loiter radius must be positive"));
        }
        if !(self.loiter_duration > 0.0) {
            return Err(Error::invalid("loiter duration must be positive"));
        }
        if !(self.climb_altitude > 0.0) {
            return Err(Error::invalid("climb altitude must be positive"));
        }
        if !(self.cruise_speed > 0.0) {
            return Err(Error::invalid("cruise speed must be positive"));
        }
        if !(self.landing_sink_rate > 0.0) || !(self.capture_factor >= 1.0) {
            return Err(Error::invalid("landing sink rate must be positive and capture factor at least 1"));
        }
        if !(self.touchdown_altitude >= 0.0 && self.touchdown_altitude < self.climb_altitude) {
            return Err(Error::invalid("touchdown altitude must lie below the climb altitude"));
        }
        self.climb_segment()?;
        self.landing_segment()?;
        for script in [&self.takeoff_script, &self.landing_script].into_iter().flatten() {
            script.validate()?;
        }
        Ok(())
    }

    pub fn climb_segment(&self) -> Result<PathSegment> {
        PathSegment::line(self.launch.into(), self.target.into())
    }

    pub fn loiter_segment(&self) -> Result<PathSegment> {
        PathSegment::arc(self.loiter_center.into(), self.loiter_radius, self.loiter_direction)
    }

    pub fn landing_segment(&self) -> Result<PathSegment> {
        PathSegment::line(self.landing_line[0].into(), self.landing_line[1].into())
    }

    pub fn segment(&self, phase: Phase) -> Result<PathSegment> {
        match phase {
            Phase::Climb => self.climb_segment(),
            Phase::Loiter => self.loiter_segment(),
            Phase::Land | Phase::Done => self.landing_segment(),
        }
    }

    fn captured(&self, meas: &Measurements) -> bool {
        let d = horizontal(&meas.r) - Vector2::from(self.loiter_center);
        let dist = d.norm();
        let closing = d.dot(&horizontal(&meas.ground_velocity)) < 0.0;
        dist <= self.capture_factor * self.loiter_radius && (closing || dist <= self.loiter_radius)
    }

    /// Altitude setpoint for `phase`, `tau` seconds after entry.
    pub fn altitude_setpoint(&self, phase: Phase, tau: f64) -> f64 {
        match phase {
            Phase::Climb | Phase::Loiter => self.climb_altitude,
            Phase::Land | Phase::Done => (self.climb_altitude - self.landing_sink_rate * tau).max(0.0),
        }
    }
}

/// Advances the phase machine and returns the position setpoint and active
/// path segment.
///
/// The horizontal part of `r_s` is the aircraft's own horizontal position:
/// lateral tracking is carried by the segment, so only the altitude
/// component of `r_s` is a command. This keeps `r_s` continuous across
/// phase changes.
pub fn mission_update(
    meas: &Measurements,
    mission: &Mission,
    ps: &PhaseState,
) -> Result<(PositionSetpoint, PathSegment, PhaseState)> {
    let mut next = *ps;
    let t = meas.t;
    match ps.phase {
        Phase::Climb => {
            if let Some(script) = &mission.takeoff_script {
                next.mode = if t - ps.phase_entry_time < script.end() { Mode::Stabilized } else { Mode::Mission };
            }
            if next.mode == Mode::Mission && mission.captured(meas) {
                next = PhaseState { phase: Phase::Loiter, phase_entry_time: t, mode: Mode::Mission };
            }
        }
        Phase::Loiter => {
            if t - ps.phase_entry_time >= mission.loiter_duration {
                let mode = if mission.landing_script.is_some() { Mode::Stabilized } else { Mode::Mission };
                next = PhaseState { phase: Phase::Land, phase_entry_time: t, mode };
            }
        }
        Phase::Land => {
            if meas.h <= mission.touchdown_altitude {
                // Done keeps the Land entry time so the descent stays continuous.
                next.phase = Phase::Done;
            }
        }
        Phase::Done => {}
    }
    let h_s = mission.altitude_setpoint(next.phase, t - next.phase_entry_time);
    let r_s = Vector3::new(meas.r.x, meas.r.y, -h_s);
    let sp = PositionSetpoint::new(r_s, mission.cruise_speed)?;
    Ok((sp, mission.segment(next.phase)?, next))
}

/// Scripted attitude and throttle commands while in stabilized mode. Returns
/// `None` in mission mode or when the phase has no script.
pub fn scripted_pilot(meas: &Measurements, ps: &PhaseState, mission: &Mission) -> Option<PilotCommand> {
    if ps.mode != Mode::Stabilized {
        return None;
    }
    let script = match ps.phase {
        Phase::Climb => mission.takeoff_script.as_ref()?,
        Phase::Land | Phase::Done => mission.landing_script.as_ref()?,
        Phase::Loiter => return None,
    };
    let e = script.at(meas.t - ps.phase_entry_time);
    Some(PilotCommand { setpoint: AttitudeSetpoint { phi: e.phi, theta: e.theta }, throttle: e.throttle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airframe::EulerAngles;
    use crate::position::SegmentKind;

    fn meas_at(north: f64, east: f64, h: f64, vel: [f64; 2], t: f64) -> Measurements {
        let v = Vector3::new(vel[0], vel[1], 0.0);
        Measurements {
            r: Vector3::new(north, east, -h),
            h,
            euler: EulerAngles::default(),
            omega: Vector3::zeros(),
            true_airspeed: v.norm(),
            indicated_airspeed: v.norm(),
            ground_speed: v.norm(),
            ground_velocity: v,
            t,
        }
    }

    #[test]
    fn before_capture_flies_launch_to_target_line() {
        let m = Mission::sim_profile();
        let ps = PhaseState::start(&m, 0.0);
        let (sp, seg, next) = mission_update(&meas_at(20.0, 0.0, 5.0, [13.0, 0.0], 1.0), &m, &ps).unwrap();
        assert_eq!(next.phase, Phase::Climb);
        assert_eq!(seg, m.climb_segment().unwrap());
        assert_eq!(sp.h_s(), 20.0);
    }

    #[test]
    fn loiter_entry_is_thirty_metre_arc_at_twenty_metres() {
        let m = Mission::sim_profile();
        let ps = PhaseState::start(&m, 0.0);
        let (sp, seg, next) = mission_update(&meas_at(170.0, 0.0, 20.0, [13.0, 0.0], 14.0), &m, &ps).unwrap();
        assert_eq!(next.phase, Phase::Loiter);
        assert_eq!(next.phase_entry_time, 14.0);
        assert_eq!(sp.h_s(), 20.0);
        assert!(matches!(seg.kind, SegmentKind::Arc { radius, .. } if radius == 30.0));
    }

    #[test]
    fn receding_aircraft_is_not_captured() {
        let m = Mission::sim_profile();
        let ps = PhaseState::start(&m, 0.0);
        let (_, _, next) = mission_update(&meas_at(235.0, 0.0, 20.0, [13.0, 0.0], 14.0), &m, &ps).unwrap();
        assert_eq!(next.phase, Phase::Climb);
    }

    #[test]
    fn land_after_sixty_seconds_of_loiter() {
        let m = Mission::sim_profile();
        let ps = PhaseState { phase: Phase::Loiter, phase_entry_time: 10.0, mode: Mode::Mission };
        let (_, _, still) = mission_update(&meas_at(200.0, 0.0, 20.0, [13.0, 0.0], 69.996), &m, &ps).unwrap();
        assert_eq!(still.phase, Phase::Loiter);
        let (sp, seg, next) = mission_update(&meas_at(200.0, 0.0, 20.0, [13.0, 0.0], 70.0), &m, &ps).unwrap();
        assert_eq!(next.phase, Phase::Land);
        assert_eq!(seg, m.landing_segment().unwrap());
        assert_eq!(sp.h_s(), 20.0);
    }

    #[test]
    fn touchdown_ends_mission() {
        let m = Mission::sim_profile();
        let ps = PhaseState { phase: Phase::Land, phase_entry_time: 0.0, mode: Mode::Mission };
        let (sp, _, next) = mission_update(&meas_at(0.0, -30.0, 1.9, [-13.0, 0.0], 12.0), &m, &ps).unwrap();
        assert_eq!(next.phase, Phase::Done);
        assert_eq!(sp.h_s(), 2.0);
    }

    #[test]
    fn script_holds_and_interpolates() {
        let m = Mission::exp_profile();
        let ps = PhaseState::start(&m, 0.0);
        assert_eq!(ps.mode, Mode::Stabilized);
        let script = m.takeoff_script.as_ref().unwrap();
        let first = scripted_pilot(&meas_at(0.0, 0.0, 2.0, [12.0, 0.0], -1.0), &ps, &m).unwrap();
        assert_eq!(first.setpoint.theta, script.entries[0].theta);
        let end = scripted_pilot(&meas_at(0.0, 0.0, 2.0, [12.0, 0.0], 7.0), &ps, &m).unwrap();
        assert_eq!(end.setpoint.theta, 0.05);
        assert_eq!(end.throttle, 0.6);
        let ramp_start = scripted_pilot(&meas_at(0.0, 0.0, 2.0, [12.0, 0.0], 5.0), &ps, &m).unwrap();
        assert_eq!(ramp_start.setpoint.theta, 0.2);
        let late = scripted_pilot(&meas_at(0.0, 0.0, 2.0, [12.0, 0.0], 100.0), &ps, &m).unwrap();
        assert_eq!(late.setpoint.theta, 0.05);
    }

    #[test]
    fn pilot_unused_in_mission_mode() {
        let m = Mission::exp_profile();
        let ps = PhaseState { phase: Phase::Climb, phase_entry_time: 0.0, mode: Mode::Mission };
        assert!(scripted_pilot(&meas_at(0.0, 0.0, 2.0, [12.0, 0.0], 1.0), &ps, &m).is_none());
    }

    #[test]
    fn exp_profile_switches_to_mission_mode_after_takeoff() {
        let m = Mission::exp_profile();
        let ps = PhaseState::start(&m, 0.0);
        let (_, _, a) = mission_update(&meas_at(30.0, 0.0, 10.0, [12.0, 0.0], 3.0), &m, &ps).unwrap();
        assert_eq!(a.mode, Mode::Stabilized);
        let (_, _, b) = mission_update(&meas_at(90.0, 0.0, 18.0, [12.0, 0.0], 7.5), &m, &ps).unwrap();
        assert_eq!(b.mode, Mode::Mission);
    }

    #[test]
    fn validation() {
        assert!(Mission::sim_profile().validate().is_ok());
        assert!(Mission::exp_profile().validate().is_ok());
        let mut m = Mission::sim_profile();
        m.loiter_radius = 0.0;
        assert!(m.validate().is_err());
        let mut m = Mission::sim_profile();
        m.loiter_duration = -1.0;
        assert!(m.validate().is_err());
        assert!(Mission::builtin("nope").is_err());
    }
}
