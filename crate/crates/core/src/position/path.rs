use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Horizontal (north, east) part of an Earth-frame vector.
pub fn horizontal(v: &Vector3<f64>) -> Vector2<f64> {
    Vector2::new(v.x, v.y)
}

/// z component of the 2-D cross product; positive when `b` is clockwise
/// from `a` seen from above (north-east axes).
pub(crate) fn cross2(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Tangent of a clockwise circle at the point with unit radial `radial`.
pub(crate) fn clockwise_tangent(radial: &Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-radial.y, radial.x)
}

/// Turn direction seen from above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnDirection {
    /// Right-hand turn, positive bank.
    Clockwise,
    CounterClockwise,
}

impl TurnDirection {
    pub fn sign(self) -> f64 {
        match self {
            TurnDirection::Clockwise => 1.0,
            TurnDirection::CounterClockwise => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SegmentKind {
    Line { start: [f64; 2], end: [f64; 2] },
    Arc { center: [f64; 2], radius: f64, direction: TurnDirection },
}

/// Desired ground track. Only the horizontal plane is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSegment {
    pub kind: SegmentKind,
    /// Entry/exit tolerance, m.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    5.0
}

impl PathSegment {
    pub fn line(start: Vector2<f64>, end: Vector2<f64>) -> Result<Self> {
        if (end - start).norm() == 0.0 {
            return Err(Error::invalid("line segment endpoints coincide"));
        }
        Ok(Self { kind: SegmentKind::Line { start: start.into(), end: end.into() }, tolerance: 5.0 })
    }

    pub fn arc(center: Vector2<f64>, radius: f64, direction: TurnDirection) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::invalid("arc radius must be positive"));
        }
        Ok(Self { kind: SegmentKind::Arc { center: center.into(), radius, direction }, tolerance: 5.0 })
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            SegmentKind::Line { start, end } => Self::line(start.into(), end.into()).map(|_| ()),
            SegmentKind::Arc { center, radius, direction } => Self::arc(center.into(), radius, direction).map(|_| ()),
        }
    }

    /// Minimum horizontal distance to the path: the infinite line through a
    /// line segment, or the full circle of an arc.
    pub fn distance(&self, r: &Vector3<f64>) -> f64 {
        let p = horizontal(r);
        match self.kind {
            SegmentKind::Line { start, end } => {
                let a = Vector2::from(start);
                let u = (Vector2::from(end) - a).normalize();
                cross2(&u, &(p - a)).abs()
            }
            SegmentKind::Arc { center, radius, .. } => ((p - Vector2::from(center)).norm() - radius).abs(),
        }
    }

    /// Signed along-track distance from the start of a line segment, or
    /// `None` for arcs.
    pub fn along_track(&self, r: &Vector3<f64>) -> Option<f64> {
        match self.kind {
            SegmentKind::Line { start, end } => {
                let a = Vector2::from(start);
                let u = (Vector2::from(end) - a).normalize();
                Some(u.dot(&(horizontal(r) - a)))
            }
            SegmentKind::Arc { .. } => None,
        }
    }
}
