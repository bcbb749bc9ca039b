//! Planar odometry back end: closed-form rigid registration of frame-to-frame
//! correspondences and trajectory accumulation.

use crate::error::{Error, Result};
use crate::geometry::{pose_compose, Point2, PoseSE2};

/// A tracked point seen in two consecutive frames, camera coordinates in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub prev: Point2,
    pub curr: Point2,
    pub feature_id: u64,
}

/// Result of [`estimate_relative_pose`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Registration {
    /// Rigid map taking `prev` points onto `curr` points.
    pub transform: PoseSE2,
    pub residual_rms: f64,
    pub used: usize,
}

impl Registration {
    /// Motion of the camera between the two frames (inverse of the point map).
    pub fn camera_motion(&self) -> PoseSE2 {
        self.transform.inverse()
    }
}

/// Least-squares rigid transform `T` minimising `sum |T prev_k - curr_k|^2`.
///
/// Centroids are removed, then the angle comes from the 2x2 cross-covariance
/// as `atan2(sum(a x b), sum(a . b))`.
pub fn estimate_relative_pose(correspondences: &[Correspondence]) -> Result<Registration> {
    let pairs: Vec<(Point2, Point2)> = correspondences.iter().map(|c| (c.prev, c.curr)).collect();
    let (transform, _) = fit_rigid(&pairs, false)?;
    let residual_rms = rms_residual(&pairs, &transform, 1.0);
    Ok(Registration {
        transform,
        residual_rms,
        used: pairs.len(),
    })
}

/// As [`estimate_relative_pose`], then drops the worst `trim_fraction` of
/// residuals and solves once more on the rest.
pub fn estimate_relative_pose_trimmed(
    correspondences: &[Correspondence],
    trim_fraction: f64,
) -> Result<Registration> {
    let first = estimate_relative_pose(correspondences)?;
    let drop = (correspondences.len() as f64 * trim_fraction).floor() as usize;
    if drop == 0 || correspondences.len() - drop < 2 {
        return Ok(first);
    }
    let mut scored: Vec<(f64, &Correspondence)> = correspondences
        .iter()
        .map(|c| (first.transform.apply(&c.prev).distance_sq(&c.curr), c))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.feature_id.cmp(&b.1.feature_id)));
    let kept: Vec<Correspondence> = scored[..scored.len() - drop].iter().map(|(_, c)| **c).collect();
    estimate_relative_pose(&kept).or(Ok(first))
}

/// Closed-form 2-D Umeyama fit from `src` to `dst`, optionally with scale.
/// Returns the rigid part and the scale (1 when `with_scale` is false).
pub fn fit_rigid(pairs: &[(Point2, Point2)], with_scale: bool) -> Result<(PoseSE2, f64)> {
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 correspondences, got {}",
            pairs.len()
        )));
    }
    let n = pairs.len() as f64;
    let (mut sx, mut sy, mut dx, mut dy) = (0.0, 0.0, 0.0, 0.0);
    for (s, d) in pairs {
        sx += s.x;
        sy += s.y;
        dx += d.x;
        dy += d.y;
    }
    let (sx, sy, dx, dy) = (sx / n, sy / n, dx / n, dy / n);

    let (mut dot, mut cross, mut src_var) = (0.0, 0.0, 0.0);
    for (s, d) in pairs {
        let (ax, ay) = (s.x - sx, s.y - sy);
        let (bx, by) = (d.x - dx, d.y - dy);
        dot += ax * bx + ay * by;
        cross += ax * by - ay * bx;
        src_var += ax * ax + ay * ay;
    }
    let spread = pairs
        .iter()
        .map(|(s, _)| s.x.abs().max(s.y.abs()))
        .fold(1.0_f64, f64::max);
    if src_var <= 1e-24 * spread * spread * n {
        return Err(Error::DegenerateGeometry(
            "source points are coincident".into(),
        ));
    }
    let theta = cross.atan2(dot);
    let scale = if with_scale {
        dot.hypot(cross) / src_var
    } else {
        1.0
    };
    let (s, c) = theta.sin_cos();
    let tx = dx - scale * (c * sx - s * sy);
    let ty = dy - scale * (s * sx + c * sy);
    Ok((PoseSE2::new(tx, ty, theta), scale))
}

fn rms_residual(pairs: &[(Point2, Point2)], t: &PoseSE2, scale: f64) -> f64 {
    let (s, c) = t.theta.sin_cos();
    let sum: f64 = pairs
        .iter()
        .map(|(a, b)| {
            let px = t.x + scale * (c * a.x - s * a.y);
            let py = t.y + scale * (s * a.x + c * a.y);
            (px - b.x).powi(2) + (py - b.y).powi(2)
        })
        .sum();
    (sum / pairs.len() as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stamped {
    pub timestamp: f64,
    pub pose: PoseSE2,
}

/// Time-ordered sequence of poses; timestamps strictly increase.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    entries: Vec<Stamped>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<Stamped>) -> Result<Self> {
        let mut t = Self::new();
        for e in entries {
            t.push(e.timestamp, e.pose)?;
        }
        Ok(t)
    }

    pub fn push(&mut self, timestamp: f64, pose: PoseSE2) -> Result<()> {
        if let Some(last) = self.entries.last() {
            if !(timestamp > last.timestamp) {
                return Err(Error::Timestamp {
                    timestamp,
                    last: last.timestamp,
                });
            }
        }
        self.entries.push(Stamped { timestamp, pose });
        Ok(())
    }

    /// Appends `last_pose (+) rel`; the first entry is `rel` itself.
    pub fn accumulate(&mut self, rel: &PoseSE2, timestamp: f64) -> Result<()> {
        let next = match self.entries.last() {
            Some(last) => pose_compose(&last.pose, rel),
            None => *rel,
        };
        self.push(timestamp, next)
    }

    pub fn entries(&self) -> &[Stamped] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> Option<&Stamped> {
        self.entries.last()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Stamped> {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn corr(prev: Point2, curr: Point2, id: u64) -> Correspondence {
        Correspondence { prev, curr, feature_id: id }
    }

    #[test]
    fn identity_when_unchanged() {
        let pts = [Point2::new(0.0, 0.0), Point2::new(1.0, 2.0), Point2::new(-3.0, 0.5)];
        let c: Vec<_> = pts.iter().enumerate().map(|(i, p)| corr(*p, *p, i as u64)).collect();
        let r = estimate_relative_pose(&c).unwrap();
        assert!(r.transform.x.abs() < 1e-12 && r.transform.y.abs() < 1e-12);
        assert!(r.transform.theta.abs() < 1e-12);
        assert!(r.residual_rms < 1e-12);
    }

    #[test]
    fn quarter_turn_about_centroid() {
        let pts = [Point2::new(1.0, 1.0), Point2::new(3.0, 1.0), Point2::new(2.0, 4.0)];
        let centroid = Point2::new(2.0, 2.0);
        let c: Vec<_> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let (x, y) = (p.x - centroid.x, p.y - centroid.y);
                corr(*p, Point2::new(centroid.x - y, centroid.y + x), i as u64)
            })
            .collect();
        let r = estimate_relative_pose(&c).unwrap();
        assert!((r.transform.theta - FRAC_PI_2).abs() < 1e-9);
        // t = c - R c
        assert!((r.transform.x - 4.0).abs() < 1e-9);
        assert!((r.transform.y - 0.0).abs() < 1e-9);
    }

    #[test]
    fn error_cases() {
        let p = Point2::new(1.0, 1.0);
        assert!(matches!(
            estimate_relative_pose(&[corr(p, p, 0)]),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            estimate_relative_pose(&[corr(p, p, 0), corr(p, Point2::new(2.0, 0.0), 1)]),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn accumulate_examples() {
        let mut t = Trajectory::new();
        for k in 0..4 {
            t.accumulate(&PoseSE2::new(1.0, 0.0, 0.0), k as f64).unwrap();
        }
        for (k, e) in t.iter().enumerate() {
            assert_eq!(e.pose, PoseSE2::new(k as f64 + 1.0, 0.0, 0.0));
        }
        let mut still = Trajectory::new();
        still.push(0.0, PoseSE2::new(1.0, 2.0, 0.3)).unwrap();
        still.accumulate(&PoseSE2::IDENTITY, 0.1).unwrap();
        assert_eq!(still.entries()[1].pose, still.entries()[0].pose);
        assert!(matches!(
            still.accumulate(&PoseSE2::IDENTITY, 0.1),
            Err(Error::Timestamp { .. })
        ));
    }

    #[test]
    fn trimming_drops_outliers() {
        let truth = PoseSE2::new(0.2, -0.1, 0.05);
        let mut c: Vec<_> = (0..20)
            .map(|i| {
                let p = Point2::new((i % 5) as f64, (i / 5) as f64 * 1.5);
                corr(p, truth.apply(&p), i)
            })
            .collect();
        c[3].curr.x += 2.0;
        let plain = estimate_relative_pose(&c).unwrap();
        let trimmed = estimate_relative_pose_trimmed(&c, 0.1).unwrap();
        assert!((trimmed.transform.x - truth.x).abs() < 1e-9);
        assert!((plain.transform.x - truth.x).abs() > 1e-3);
    }
}
