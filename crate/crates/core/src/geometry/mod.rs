//! Shared primitives: the error function, center-format boxes and SE(2) poses.

mod bbox;
mod erf;
mod pose;

pub use bbox::{iou, BoundingBox};
pub use erf::erf;
pub use pose::{pose_compose, pose_inverse, transform_point, wrap_angle, PoseSE2};

/// A point in the plane; pixels or meters depending on context.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(&self, other: &Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}
