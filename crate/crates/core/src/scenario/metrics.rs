use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::telemetry::TelemetryRecord;
use crate::position::PathSegment;
use crate::{Error, Result};

/// Minimum horizontal distance from `r_m` to the desired trajectory.
pub fn cross_track_error(r_m: &Vector3<f64>, segment: &PathSegment) -> f64 {
    segment.distance(r_m)
}

/// Root mean square; `None` for an empty input.
pub fn rms(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
    (n > 0).then(|| (sum / n as f64).sqrt())
}

/// The three error metrics of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// rad
    pub j_phi: f64,
    /// rad
    pub j_theta: f64,
    /// m
    pub j_traj: f64,
}

impl Metrics {
    /// Ratio to the baseline metric by metric.
    pub fn normalized(&self, baseline: &Metrics) -> Metrics {
        Metrics {
            j_phi: self.j_phi / baseline.j_phi,
            j_theta: self.j_theta / baseline.j_theta,
            j_traj: self.j_traj / baseline.j_traj,
        }
    }
}

/// RMS metrics and the record count over the metric window.
pub fn metrics(telemetry: &[TelemetryRecord]) -> Result<(Metrics, usize)> {
    let window = || telemetry.iter().filter(|r| r.in_metric_window());
    let n = window().count();
    if n == 0 {
        return Err(Error::EmptyMetricWindow);
    }
    let m = Metrics {
        j_phi: rms(window().map(|r| r.phi_s - r.phi)).unwrap_or(0.0),
        j_theta: rms(window().map(|r| r.theta_s - r.theta)).unwrap_or(0.0),
        j_traj: rms(window().map(|r| r.xtrack)).unwrap_or(0.0),
    };
    Ok((m, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::position::TurnDirection;
    use nalgebra::Vector2;

    #[test]
    fn rms_examples() {
        assert_eq!(rms([0.7; 9]), Some(0.7));
        assert_eq!(rms([-0.7; 9]), Some(0.7));
        assert_eq!(rms([3.0, 4.0]), Some(12.5_f64.sqrt()));
        assert!((rms([3.0, 4.0]).unwrap() - 3.53553).abs() < 1e-5);
        assert_eq!(rms([0.0; 4]), Some(0.0));
        assert_eq!(rms([]), None);
    }

    #[test]
    fn cross_track_examples() {
        let line = PathSegment::line(Vector2::new(0.0, 0.0), Vector2::new(10.0, 10.0)).unwrap();
        assert_eq!(cross_track_error(&Vector3::new(30.0, 30.0, -20.0), &line), 0.0);
        let arc = PathSegment::arc(Vector2::new(0.0, 0.0), 30.0, TurnDirection::Clockwise).unwrap();
        assert_eq!(cross_track_error(&Vector3::new(35.0, 0.0, -5.0), &arc), 5.0);
        assert_eq!(cross_track_error(&Vector3::new(0.0, 0.0, -5.0), &arc), 30.0);
    }

    #[test]
    fn self_normalization_is_one() {
        let m = Metrics { j_phi: 0.013, j_theta: 0.021, j_traj: 1.7 };
        assert_eq!(m.normalized(&m), Metrics { j_phi: 1.0, j_theta: 1.0, j_traj: 1.0 });
    }
}
