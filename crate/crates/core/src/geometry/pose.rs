use std::f64::consts::PI;

use super::Point2;

/// Planar rigid pose: rotation by `theta` then translation by `(x, y)`.
///
/// `theta` is kept in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSE2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Default for PoseSE2 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl PoseSE2 {
    pub const IDENTITY: PoseSE2 = PoseSE2 {
        x: 0.0,
        y: 0.0,
        theta: 0.0,
    };

    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    pub fn translation(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn compose(&self, other: &PoseSE2) -> PoseSE2 {
        pose_compose(self, other)
    }

    pub fn inverse(&self) -> PoseSE2 {
        pose_inverse(self)
    }

    pub fn apply(&self, p: &Point2) -> Point2 {
        transform_point(self, p)
    }
}

/// Wraps an angle into `(-pi, pi]`; `-pi` maps to `+pi`.
pub fn wrap_angle(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

pub fn pose_compose(a: &PoseSE2, b: &PoseSE2) -> PoseSE2 {
    let (s, c) = a.theta.sin_cos();
    PoseSE2::new(
        a.x + c * b.x - s * b.y,
        a.y + s * b.x + c * b.y,
        a.theta + b.theta,
    )
}

pub fn pose_inverse(a: &PoseSE2) -> PoseSE2 {
    let (s, c) = a.theta.sin_cos();
    PoseSE2::new(-(c * a.x + s * a.y), s * a.x - c * a.y, -a.theta)
}

pub fn transform_point(pose: &PoseSE2, p: &Point2) -> Point2 {
    let (s, c) = pose.theta.sin_cos();
    Point2::new(pose.x + c * p.x - s * p.y, pose.y + s * p.x + c * p.y)
}
