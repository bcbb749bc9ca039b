use std::ops::Range;

use super::config::{NoiseBurst, ObjectSpec, PathSpec, SceneConfig, ScriptedOcclusion};
use crate::error::{Error, Result};

/// Side length of the two square objects in the crossing scenario.
pub const OCCLUSION_OBJECT_SIZE: f64 = 120.0;

/// Two equal squares sliding past each other along the horizontal midline.
///
/// Object 0 (behind) moves right and object 1 (in front) moves left. Their
/// relative speed is chosen so that the boxes overlap with IoU above the
/// occlusion threshold for exactly `occluded_frames` frames centred in the
/// sequence. The event is recorded in `scripted_occlusions`. Any objects
/// in `base` are replaced.
pub fn scenario_occlusion_crossing(base: &SceneConfig, occluded_frames: usize) -> Result<SceneConfig> {
    let n = occluded_frames;
    if n == 0 {
        return Err(Error::Config("occluded_frames must be >= 1".into()));
    }
    if n + 2 > base.frames {
        return Err(Error::Config(format!(
            "{n} occluded frames do not fit in a {}-frame sequence",
            base.frames
        )));
    }
    let tau = base.occlusion_threshold;
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Config(format!(
            "occlusion threshold {tau} must lie strictly between 0 and 1"
        )));
    }
    let s = OCCLUSION_OBJECT_SIZE;
    // Equal squares offset by d along one axis overlap with IoU (s-d)/(s+d).
    let d_star = s * (1.0 - tau) / (1.0 + tau);
    let rel_speed = 2.0 * d_star / n as f64;
    let start = (base.frames - n) / 2;
    let centre = start as f64 + 0.5 * (n as f64 - 1.0);
    let speed = 0.5 * rel_speed * base.frame_rate;
    let (cx, cy) = (0.5 * base.viewport.0 as f64, 0.5 * base.viewport.1 as f64);
    let offset = 0.5 * rel_speed * centre;

    let object = |z_order: i32, x: f64, heading: f64| ObjectSpec {
        width: s,
        height: s,
        corner_radius: 20.0,
        z_order,
        spawn: 0,
        despawn: None,
        path: PathSpec::Line { x, y: cy, heading, speed },
    };
    let mut cfg = base.clone();
    cfg.name = format!("occlusion-{n}");
    cfg.objects = vec![
        object(0, cx - offset, 0.0),
        object(1, cx + offset, std::f64::consts::PI),
    ];
    cfg.scripted_occlusions = vec![ScriptedOcclusion { object: 0, start, len: n }];
    Ok(cfg)
}

/// Multiplies detector noise by `factor` on the frames in `interval`.
pub fn scenario_noise_burst(base: &SceneConfig, interval: Range<usize>, factor: f64) -> Result<SceneConfig> {
    if !(factor >= 1.0 && factor.is_finite()) {
        return Err(Error::Config(format!("burst factor must be >= 1, got {factor}")));
    }
    if interval.start > interval.end || interval.end > base.frames {
        return Err(Error::Config(format!(
            "burst interval {}..{} outside 0..{}",
            interval.start, interval.end, base.frames
        )));
    }
    let mut cfg = base.clone();
    if factor != 1.0 && !interval.is_empty() {
        cfg.noise_bursts.push(NoiseBurst {
            start: interval.start,
            end: interval.end,
            factor,
        });
    }
    Ok(cfg)
}
