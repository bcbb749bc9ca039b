use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, Point2};

/// Parametric path. Units are meters and m/s for the camera, pixels and
/// px/s for objects.
#[derive(Debug, Clone, PartialEq)]
pub enum PathSpec {
    /// Straight line from `(x, y)` along `heading`.
    Line {
        x: f64,
        y: f64,
        heading: f64,
        speed: f64,
    },
    /// Circle about `(cx, cy)`; positive speed runs counter-clockwise from `phase`.
    Circle {
        cx: f64,
        cy: f64,
        radius: f64,
        speed: f64,
        phase: f64,
    },
    /// Polyline walked at constant speed, holding the last point at the end.
    Waypoints { speed: f64, points: Vec<Point2> },
}

impl PathSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            PathSpec::Line { x, y, heading, speed } => {
                if !finite(&[*x, *y, *heading, *speed]) {
                    return Err(Error::Config("line path has non-finite values".into()));
                }
            }
            PathSpec::Circle { cx, cy, radius, speed, phase } => {
                if !finite(&[*cx, *cy, *radius, *speed, *phase]) || *radius <= 0.0 {
                    return Err(Error::Config(format!(
                        "circle path needs a finite positive radius, got {radius}"
                    )));
                }
            }
            PathSpec::Waypoints { speed, points } => {
                if points.len() < 2 {
                    return Err(Error::Config("waypoint path needs at least 2 points".into()));
                }
                if !speed.is_finite() || *speed < 0.0 {
                    return Err(Error::Config(format!("bad waypoint speed {speed}")));
                }
                for w in points.windows(2) {
                    if !finite(&[w[0].x, w[0].y, w[1].x, w[1].y]) || w[0] == w[1] {
                        return Err(Error::Config(
                            "waypoints must be finite and consecutive points distinct".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Position and direction of travel at time `t` seconds.
    pub fn sample(&self, t: f64) -> (Point2, f64) {
        match self {
            PathSpec::Line { x, y, heading, speed } => {
                let d = speed * t;
                (Point2::new(x + d * heading.cos(), y + d * heading.sin()), *heading)
            }
            PathSpec::Circle { cx, cy, radius, speed, phase } => {
                let a = phase + speed * t / radius;
                let dir = if *speed >= 0.0 { a + FRAC_PI_2 } else { a - FRAC_PI_2 };
                (
                    Point2::new(cx + radius * a.cos(), cy + radius * a.sin()),
                    wrap_angle(dir),
                )
            }
            PathSpec::Waypoints { speed, points } => {
                let mut remaining = (speed * t).max(0.0);
                for w in points.windows(2) {
                    let len = w[0].distance(&w[1]);
                    let heading = (w[1].y - w[0].y).atan2(w[1].x - w[0].x);
                    if remaining <= len {
                        let f = remaining / len;
                        return (
                            Point2::new(
                                w[0].x + f * (w[1].x - w[0].x),
                                w[0].y + f * (w[1].y - w[0].y),
                            ),
                            heading,
                        );
                    }
                    remaining -= len;
                }
                let n = points.len();
                let heading =
                    (points[n - 1].y - points[n - 2].y).atan2(points[n - 1].x - points[n - 2].x);
                (points[n - 1], heading)
            }
        }
    }
}

/// A moving object in image space.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectSpec {
    pub width: f64,
    pub height: f64,
    pub corner_radius: f64,
    /// Higher values are drawn in front.
    pub z_order: i32,
    pub spawn: usize,
    /// First frame the object is gone; `None` keeps it to the end.
    pub despawn: Option<usize>,
    pub path: PathSpec,
}

impl ObjectSpec {
    pub fn active_at(&self, frame: usize) -> bool {
        frame >= self.spawn && self.despawn.is_none_or(|d| frame < d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorNoise {
    pub sigma_center: f64,
    pub sigma_size: f64,
    pub p_miss: f64,
    /// Probability of one false-positive box per frame.
    pub p_false: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureNoise {
    pub sigma_track: f64,
    pub p_loss: f64,
}

/// Detector noise multiplied by `factor` on frames `start..end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseBurst {
    pub start: usize,
    pub end: usize,
    pub factor: f64,
}

/// Frames `start..start + len` during which `object` is hidden by design.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScriptedOcclusion {
    pub object: usize,
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub name: String,
    pub viewport: (usize, usize),
    pub frames: usize,
    pub frame_rate: f64,
    pub px_per_meter: f64,
    pub camera_path: PathSpec,
    pub landmark_count: usize,
    pub landmark_seed: u64,
    /// Surface keypoints per square pixel of object area.
    pub object_point_density: f64,
    pub objects: Vec<ObjectSpec>,
    pub detector_noise: DetectorNoise,
    pub feature_noise: FeatureNoise,
    /// IoU above which the lower object's detection is dropped.
    pub occlusion_threshold: f64,
    pub noise_bursts: Vec<NoiseBurst>,
    pub scripted_occlusions: Vec<ScriptedOcclusion>,
}

/// Scene presets ordered by how much of the view moving objects cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicLevel {
    None,
    Low,
    Mid,
    High,
}

impl DynamicLevel {
    pub const ALL: [DynamicLevel; 4] = [Self::None, Self::Low, Self::Mid, Self::High];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(Self::None),
            "low" => Some(Self::Low),
            "mid" => Some(Self::Mid),
            "high" => Some(Self::High),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Low => "low",
            Self::Mid => "mid",
            Self::High => "high",
        }
    }

    fn objects(&self) -> (usize, f64) {
        match self {
            Self::None => (0, 0.0),
            Self::Low => (2, 70.0),
            Self::Mid => (4, 90.0),
            Self::High => (8, 110.0),
        }
    }
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            name: "none".into(),
            viewport: (640, 480),
            frames: 200,
            frame_rate: 20.0,
            px_per_meter: 100.0,
            camera_path: PathSpec::Circle {
                cx: 0.0,
                cy: 2.0,
                radius: 2.0,
                speed: 0.4,
                phase: -FRAC_PI_2,
            },
            landmark_count: 1600,
            landmark_seed: 1,
            object_point_density: 1.2e-3,
            objects: Vec::new(),
            detector_noise: DetectorNoise {
                sigma_center: 2.0,
                sigma_size: 3.0,
                p_miss: 0.05,
                p_false: 0.02,
            },
            feature_noise: FeatureNoise {
                sigma_track: 0.5,
                p_loss: 0.02,
            },
            occlusion_threshold: 0.3,
            noise_bursts: Vec::new(),
            scripted_occlusions: Vec::new(),
        }
    }
}

impl SceneConfig {
    /// Desk-scale scene with 0, 2, 4 or 8 objects circling in view.
    pub fn preset(level: DynamicLevel) -> Self {
        let (count, size) = level.objects();
        let (w, h) = (640.0, 480.0);
        let cols = count.clamp(1, 4);
        let rows = count.div_ceil(4).max(1);
        let objects = (0..count)
            .map(|i| {
                let (col, row) = (i % cols, i / cols);
                let cx = w * (col as f64 + 0.5) / cols as f64;
                let cy = h * (row as f64 + 0.5) / rows as f64;
                let direction = if i % 2 == 0 { 1.0 } else { -1.0 };
                ObjectSpec {
                    width: size,
                    height: size * (0.8 + 0.1 * (i % 3) as f64),
                    corner_radius: 0.2 * size,
                    z_order: i as i32,
                    spawn: 0,
                    despawn: None,
                    path: PathSpec::Circle {
                        cx,
                        cy,
                        radius: 50.0 + 10.0 * (i % 3) as f64,
                        speed: direction * (70.0 + 10.0 * (i % 4) as f64),
                        phase: 0.7 * i as f64,
                    },
                }
            })
            .collect();
        Self {
            name: level.as_str().into(),
            objects,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be in [0, 1], got {p}")))
            }
        };
        if self.viewport.0 == 0 || self.viewport.1 == 0 {
            return Err(Error::Config("viewport must be non-empty".into()));
        }
        if self.frames == 0 {
            return Err(Error::Config("frames must be >= 1".into()));
        }
        if !(self.frame_rate > 0.0 && self.frame_rate.is_finite()) {
            return Err(Error::Config(format!("bad frame rate {}", self.frame_rate)));
        }
        if !(self.px_per_meter > 0.0 && self.px_per_meter.is_finite()) {
            return Err(Error::Config(format!("bad px_per_meter {}", self.px_per_meter)));
        }
        if !(self.object_point_density >= 0.0) {
            return Err(Error::Config("object_point_density must be >= 0".into()));
        }
        self.camera_path.validate()?;
        for (i, o) in self.objects.iter().enumerate() {
            o.path.validate()?;
            if !(o.width > 0.0 && o.height > 0.0 && o.corner_radius >= 0.0) {
                return Err(Error::Config(format!("object {i} has an invalid size")));
            }
        }
        prob("p_miss", self.detector_noise.p_miss)?;
        prob("p_false", self.detector_noise.p_false)?;
        prob("p_loss", self.feature_noise.p_loss)?;
        prob("occlusion_threshold", self.occlusion_threshold)?;
        if !(self.detector_noise.sigma_center >= 0.0
            && self.detector_noise.sigma_size >= 0.0
            && self.feature_noise.sigma_track >= 0.0)
        {
            return Err(Error::Config("noise sigmas must be >= 0".into()));
        }
        for b in &self.noise_bursts {
            if !(b.factor >= 1.0) || b.end > self.frames || b.start > b.end {
                return Err(Error::Config(format!("invalid noise burst {b:?}")));
            }
        }
        for s in &self.scripted_occlusions {
            if s.object >= self.objects.len() {
                return Err(Error::Config(format!("scripted occlusion of unknown object {}", s.object)));
            }
        }
        Ok(())
    }

    /// Noise multiplier applied to detections at `frame`.
    pub fn detector_noise_factor(&self, frame: usize) -> f64 {
        self.noise_bursts
            .iter()
            .filter(|b| (b.start..b.end).contains(&frame))
            .map(|b| b.factor)
            .product()
    }

    pub fn frame_period(&self) -> f64 {
        1.0 / self.frame_rate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for level in DynamicLevel::ALL {
            let cfg = SceneConfig::preset(level);
            cfg.validate().unwrap();
            assert_eq!(cfg.name, level.as_str());
        }
        assert_eq!(SceneConfig::preset(DynamicLevel::High).objects.len(), 8);
        assert!(SceneConfig::preset(DynamicLevel::None).objects.is_empty());
    }

    #[test]
    fn invalid_paths_rejected() {
        let bad = [
            PathSpec::Circle { cx: 0.0, cy: 0.0, radius: 0.0, speed: 1.0, phase: 0.0 },
            PathSpec::Waypoints { speed: 1.0, points: vec![Point2::new(0.0, 0.0)] },
            PathSpec::Waypoints {
                speed: 1.0,
                points: vec![Point2::new(1.0, 1.0), Point2::new(1.0, 1.0)],
            },
            PathSpec::Line { x: f64::NAN, y: 0.0, heading: 0.0, speed: 1.0 },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
            let cfg = SceneConfig { camera_path: p, ..SceneConfig::default() };
            assert!(cfg.validate().is_err());
        }
    }

    #[test]
    fn waypoints_walk_at_constant_speed() {
        let p = PathSpec::Waypoints {
            speed: 1.0,
            points: vec![Point2::new(0.0, 0.0), Point2::new(2.0, 0.0), Point2::new(2.0, 3.0)],
        };
        let (a, ha) = p.sample(1.0);
        assert_eq!(a, Point2::new(1.0, 0.0));
        assert_eq!(ha, 0.0);
        let (b, hb) = p.sample(3.0);
        assert!((b.x - 2.0).abs() < 1e-12 && (b.y - 1.0).abs() < 1e-12);
        assert!((hb - FRAC_PI_2).abs() < 1e-12);
        let (end, _) = p.sample(100.0);
        assert_eq!(end, Point2::new(2.0, 3.0));
    }

    #[test]
    fn burst_factor() {
        let cfg = SceneConfig {
            noise_bursts: vec![NoiseBurst { start: 5, end: 8, factor: 3.0 }],
            ..SceneConfig::default()
        };
        assert_eq!(cfg.detector_noise_factor(4), 1.0);
        assert_eq!(cfg.detector_noise_factor(5), 3.0);
        assert_eq!(cfg.detector_noise_factor(8), 1.0);
    }
}
