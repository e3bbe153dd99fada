use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::path::{clockwise_tangent, cross2, horizontal, PathSegment, SegmentKind};

/// L1 lateral guidance tuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct L1Config {
    /// s
    pub period: f64,
    pub damping: f64,
    /// Bank setpoint limit, rad.
    pub phi_max: f64,
}

impl Default for L1Config {
    fn default() -> Self {
        Self { period: 7.0, damping: 0.75, phi_max: 0.75 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceOutput {
    /// Bank setpoint, rad.
    pub phi_s: f64,
    /// Lateral acceleration command, m/s^2.
    pub lateral_accel: f64,
    /// Angle from ground velocity to the reference line of sight, rad.
    pub eta: f64,
    /// L1 distance, m.
    pub l1_distance: f64,
    /// Geometry was degenerate; `phi_s` is the previous setpoint.
    pub degenerate: bool,
}

/// Reference point on the path at (up to) the L1 distance from `p`.
fn reference_point(p: &Vector2<f64>, segment: &PathSegment, l1: f64) -> Option<Vector2<f64>> {
    match segment.kind {
        SegmentKind::Line { start, end } => {
            let a = Vector2::from(start);
            let u = (Vector2::from(end) - a).normalize();
            let closest = a + u * u.dot(&(p - a));
            let xt = (p - closest).norm();
            if xt < l1 {
                Some(closest + u * (l1 * l1 - xt * xt).sqrt())
            } else {
                Some(closest)
            }
        }
        SegmentKind::Arc { center, radius, direction } => {
            let c = Vector2::from(center);
            let d = p - c;
            let dist = d.norm();
            if dist < 1e-6 {
                return None;
            }
            let radial = d / dist;
            let ahead = clockwise_tangent(&radial) * direction.sign();
            if dist > radius + l1 || dist < radius - l1 {
                // no intersection with the L1 circle: head for the closest point
                Some(c + radial * radius)
            } else if l1 >= dist + radius {
                Some(c + ahead * radius)
            } else {
                let along = (dist * dist + radius * radius - l1 * l1) / (2.0 * dist);
                let half_chord = (radius * radius - along * along).max(0.0).sqrt();
                Some(c + radial * along + ahead * half_chord)
            }
        }
    }
}

/// Nonlinear L1 guidance.
///
/// `L1 = damping * period * |vg| / pi`; the reference point lies on the path
/// at distance `L1` ahead of the aircraft and the lateral acceleration is
/// `2 |vg|^2 / L1 * sin(eta)`. On a circle of radius `R` this reduces to the
/// centripetal `|vg|^2 / R`. Positive commands bank right.
pub fn lateral_guidance(
    r_m: &Vector3<f64>,
    vg: &Vector3<f64>,
    segment: &PathSegment,
    cfg: &L1Config,
    g: f64,
    previous_phi: f64,
) -> GuidanceOutput {
    let v = horizontal(vg);
    let speed = v.norm();
    let l1 = cfg.damping * cfg.period * speed / std::f64::consts::PI;
    let hold = GuidanceOutput {
        phi_s: previous_phi,
        lateral_accel: g * previous_phi.tan(),
        eta: 0.0,
        l1_distance: l1,
        degenerate: true,
    };
    if speed <= 0.1 {
        return hold;
    }
    let p = horizontal(r_m);
    let Some(reference) = reference_point(&p, segment, l1) else {
        return hold;
    };
    let los = reference - p;
    if los.norm() < 1e-9 {
        return hold;
    }
    let eta = cross2(&v, &los).atan2(v.dot(&los)).clamp(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
    let lateral_accel = 2.0 * speed * speed / l1 * eta.sin();
    let phi_s = (lateral_accel / g).atan().clamp(-cfg.phi_max, cfg.phi_max);
    GuidanceOutput { phi_s, lateral_accel, eta, l1_distance: l1, degenerate: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::position::path::TurnDirection;

    const G: f64 = 9.81;

    fn north_line() -> PathSegment {
        PathSegment::line(Vector2::new(0.0, 0.0), Vector2::new(500.0, 0.0)).unwrap()
    }

    #[test]
    fn on_track_gives_wings_level() {
        let out = lateral_guidance(
            &Vector3::new(100.0, 0.0, -20.0),
            &Vector3::new(13.0, 0.0, 0.0),
            &north_line(),
            &L1Config::default(),
            G,
            0.0,
        );
        assert_eq!(out.eta, 0.0);
        assert_eq!(out.phi_s, 0.0);
        assert!(!out.degenerate);
    }

    #[test]
    fn left_of_track_banks_right_and_mirror_negates() {
        let cfg = L1Config::default();
        let vg = Vector3::new(13.0, 0.0, 0.0);
        let left = lateral_guidance(&Vector3::new(100.0, -6.0, 0.0), &vg, &north_line(), &cfg, G, 0.0);
        let right = lateral_guidance(&Vector3::new(100.0, 6.0, 0.0), &vg, &north_line(), &cfg, G, 0.0);
        assert!(left.phi_s > 0.0);
        assert_eq!(left.phi_s, -right.phi_s);
    }

    #[test]
    fn steady_circle_is_centripetal() {
        let radius = 30.0;
        let speed = 13.0;
        let seg = PathSegment::arc(Vector2::new(0.0, 0.0), radius, TurnDirection::Clockwise).unwrap();
        // west point of a clockwise circle, flying north
        let out = lateral_guidance(
            &Vector3::new(0.0, -radius, -20.0),
            &Vector3::new(speed, 0.0, 0.0),
            &seg,
            &L1Config::default(),
            G,
            0.0,
        );
        let expected = (speed * speed / (G * radius)).atan();
        assert!((out.phi_s - expected).abs() < 1e-12);
    }

    #[test]
    fn arc_center_is_degenerate() {
        let seg = PathSegment::arc(Vector2::new(0.0, 0.0), 30.0, TurnDirection::Clockwise).unwrap();
        let out = lateral_guidance(
            &Vector3::new(0.0, 0.0, -20.0),
            &Vector3::new(13.0, 0.0, 0.0),
            &seg,
            &L1Config::default(),
            G,
            0.2,
        );
        assert!(out.degenerate);
        assert_eq!(out.phi_s, 0.2);
    }

    #[test]
    fn slow_ground_speed_holds() {
        let out = lateral_guidance(
            &Vector3::new(0.0, 5.0, 0.0),
            &Vector3::new(0.05, 0.0, 0.0),
            &north_line(),
            &L1Config::default(),
            G,
            -0.1,
        );
        assert!(out.degenerate);
        assert_eq!(out.phi_s, -0.1);
    }
}
