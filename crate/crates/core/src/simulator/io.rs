//! Line-oriented scene file.
//!
//! ```text
//! ADUGS-SIM 1
//! CFG <key> <value...>            one line per configuration field
//! F idx t cam_x cam_y cam_theta    starts a frame
//! G obj cx cy w h                  ground-truth object box
//! D cx cy w h                      detection
//! K id x y response origin         keypoint candidate (origin L<id> or O<obj>)
//! C id true_x true_y               true position of a visible point
//! ```
//!
//! Reals are written with nine significant digits.

use std::fmt::Write as _;
use std::path::Path;

use super::config::{
    DetectorNoise, FeatureNoise, NoiseBurst, ObjectSpec, PathSpec, ScriptedOcclusion, SceneConfig,
};
use super::generate::{FrameRecord, GtObject, Scene};
use crate::error::{Error, Result};
use crate::features::{Keypoint, Origin};
use crate::geometry::{BoundingBox, Point2, PoseSE2};

pub const SCENE_MAGIC: &str = "ADUGS-SIM";
pub const SCENE_VERSION: &str = "1";

/// Nine significant digits in scientific notation.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.8e}")
}

/// Rounds to the value [`fmt_real`] followed by parsing would produce.
pub fn quantize(x: f64) -> f64 {
    fmt_real(x).parse().expect("formatted float parses")
}

fn fmt_path(p: &PathSpec) -> String {
    match p {
        PathSpec::Line { x, y, heading, speed } => format!(
            "line {} {} {} {}",
            fmt_real(*x),
            fmt_real(*y),
            fmt_real(*heading),
            fmt_real(*speed)
        ),
        PathSpec::Circle { cx, cy, radius, speed, phase } => format!(
            "circle {} {} {} {} {}",
            fmt_real(*cx),
            fmt_real(*cy),
            fmt_real(*radius),
            fmt_real(*speed),
            fmt_real(*phase)
        ),
        PathSpec::Waypoints { speed, points } => {
            let mut s = format!("waypoints {}", fmt_real(*speed));
            for p in points {
                let _ = write!(s, " {} {}", fmt_real(p.x), fmt_real(p.y));
            }
            s
        }
    }
}

pub fn config_lines(cfg: &SceneConfig) -> Vec<String> {
    let name: String = cfg
        .name
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect();
    let name = if name.is_empty() { "scene".to_string() } else { name };
    let mut out = vec![
        format!("CFG name {name}"),
        format!("CFG viewport {} {}", cfg.viewport.0, cfg.viewport.1),
        format!("CFG frames {}", cfg.frames),
        format!("CFG frame_rate {}", fmt_real(cfg.frame_rate)),
        format!("CFG px_per_meter {}", fmt_real(cfg.px_per_meter)),
        format!("CFG camera_path {}", fmt_path(&cfg.camera_path)),
        format!("CFG landmarks {} {}", cfg.landmark_count, cfg.landmark_seed),
        format!("CFG object_point_density {}", fmt_real(cfg.object_point_density)),
    ];
    for o in &cfg.objects {
        out.push(format!(
            "CFG object {} {} {} {} {} {} {}",
            fmt_real(o.width),
            fmt_real(o.height),
            fmt_real(o.corner_radius),
            o.z_order,
            o.spawn,
            o.despawn.map_or("none".to_string(), |d| d.to_string()),
            fmt_path(&o.path)
        ));
    }
    let d = &cfg.detector_noise;
    out.push(format!(
        "CFG detector_noise {} {} {} {}",
        fmt_real(d.sigma_center),
        fmt_real(d.sigma_size),
        fmt_real(d.p_miss),
        fmt_real(d.p_false)
    ));
    out.push(format!(
        "CFG feature_noise {} {}",
        fmt_real(cfg.feature_noise.sigma_track),
        fmt_real(cfg.feature_noise.p_loss)
    ));
    out.push(format!("CFG occlusion_threshold {}", fmt_real(cfg.occlusion_threshold)));
    for b in &cfg.noise_bursts {
        out.push(format!("CFG noise_burst {} {} {}", b.start, b.end, fmt_real(b.factor)));
    }
    for s in &cfg.scripted_occlusions {
        out.push(format!("CFG scripted_occlusion {} {} {}", s.object, s.start, s.len));
    }
    out
}

impl SceneConfig {
    /// This configuration with every real rounded to file precision.
    pub fn quantized(&self) -> SceneConfig {
        let lines = config_lines(self);
        let mut parser = ConfigParser::default();
        for (i, l) in lines.iter().enumerate() {
            let tokens: Vec<&str> = l.split_whitespace().collect();
            parser
                .feed(&tokens[1..], &Ctx { path: "<config>", line: i + 1 })
                .expect("serialised config parses");
        }
        parser.finish(&Ctx { path: "<config>", line: lines.len() }).expect("complete config")
    }
}

struct Ctx<'a> {
    path: &'a str,
    line: usize,
}

impl Ctx<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.path, self.line, msg)
    }

    fn num<T: std::str::FromStr>(&self, tokens: &[&str], i: usize, what: &str) -> Result<T> {
        let t = tokens
            .get(i)
            .ok_or_else(|| self.err(format!("missing {what}")))?;
        t.parse()
            .map_err(|_| self.err(format!("invalid {what} {t:?}")))
    }

    fn exact(&self, tokens: &[&str], n: usize, record: &str) -> Result<()> {
        if tokens.len() != n {
            return Err(self.err(format!(
                "{record} expects {n} fields, found {}",
                tokens.len()
            )));
        }
        Ok(())
    }
}

fn parse_path(tokens: &[&str], ctx: &Ctx) -> Result<PathSpec> {
    let kind = tokens.first().ok_or_else(|| ctx.err("missing path kind"))?;
    let rest = &tokens[1..];
    match *kind {
        "line" => {
            ctx.exact(rest, 4, "line path")?;
            Ok(PathSpec::Line {
                x: ctx.num(rest, 0, "x")?,
                y: ctx.num(rest, 1, "y")?,
                heading: ctx.num(rest, 2, "heading")?,
                speed: ctx.num(rest, 3, "speed")?,
            })
        }
        "circle" => {
            ctx.exact(rest, 5, "circle path")?;
            Ok(PathSpec::Circle {
                cx: ctx.num(rest, 0, "cx")?,
                cy: ctx.num(rest, 1, "cy")?,
                radius: ctx.num(rest, 2, "radius")?,
                speed: ctx.num(rest, 3, "speed")?,
                phase: ctx.num(rest, 4, "phase")?,
            })
        }
        "waypoints" => {
            if rest.is_empty() || rest.len() % 2 != 1 {
                return Err(ctx.err("waypoints expects a speed and x y pairs"));
            }
            let speed = ctx.num(rest, 0, "speed")?;
            let points = (1..rest.len())
                .step_by(2)
                .map(|i| Ok(Point2::new(ctx.num(rest, i, "x")?, ctx.num(rest, i + 1, "y")?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(PathSpec::Waypoints { speed, points })
        }
        other => Err(ctx.err(format!("unknown path kind {other:?}"))),
    }
}

/// Parses a whitespace-separated path spec such as `circle 0 2 2 0.4 0`.
pub(crate) fn parse_path_spec(text: &str, path: &str, line: usize) -> Result<PathSpec> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    parse_path(&tokens, &Ctx { path, line })
}

#[derive(Default)]
struct ConfigParser {
    cfg: Option<SceneConfig>,
    seen: Vec<&'static str>,
}

const REQUIRED_KEYS: [&str; 11] = [
    "name",
    "viewport",
    "frames",
    "frame_rate",
    "px_per_meter",
    "camera_path",
    "landmarks",
    "object_point_density",
    "detector_noise",
    "feature_noise",
    "occlusion_threshold",
];

impl ConfigParser {
    /// `tokens` starts with the key.
    fn feed(&mut self, tokens: &[&str], ctx: &Ctx) -> Result<()> {
        let cfg = self.cfg.get_or_insert_with(|| SceneConfig {
            objects: Vec::new(),
            noise_bursts: Vec::new(),
            scripted_occlusions: Vec::new(),
            ..SceneConfig::default()
        });
        let key = *tokens.first().ok_or_else(|| ctx.err("CFG without key"))?;
        let v = &tokens[1..];
        match key {
            "name" => {
                ctx.exact(v, 1, "name")?;
                cfg.name = v[0].to_string();
            }
            "viewport" => {
                ctx.exact(v, 2, "viewport")?;
                cfg.viewport = (ctx.num(v, 0, "width")?, ctx.num(v, 1, "height")?);
            }
            "frames" => {
                ctx.exact(v, 1, "frames")?;
                cfg.frames = ctx.num(v, 0, "frames")?;
            }
            "frame_rate" => {
                ctx.exact(v, 1, "frame_rate")?;
                cfg.frame_rate = ctx.num(v, 0, "frame_rate")?;
            }
            "px_per_meter" => {
                ctx.exact(v, 1, "px_per_meter")?;
                cfg.px_per_meter = ctx.num(v, 0, "px_per_meter")?;
            }
            "camera_path" => cfg.camera_path = parse_path(v, ctx)?,
            "landmarks" => {
                ctx.exact(v, 2, "landmarks")?;
                cfg.landmark_count = ctx.num(v, 0, "landmark count")?;
                cfg.landmark_seed = ctx.num(v, 1, "landmark seed")?;
            }
            "object_point_density" => {
                ctx.exact(v, 1, "object_point_density")?;
                cfg.object_point_density = ctx.num(v, 0, "density")?;
            }
            "object" => {
                if v.len() < 7 {
                    return Err(ctx.err("object expects size, corner, z, spawn, despawn and path"));
                }
                let despawn = match v[5] {
                    "none" => None,
                    _ => Some(ctx.num(v, 5, "despawn")?),
                };
                cfg.objects.push(ObjectSpec {
                    width: ctx.num(v, 0, "width")?,
                    height: ctx.num(v, 1, "height")?,
                    corner_radius: ctx.num(v, 2, "corner radius")?,
                    z_order: ctx.num(v, 3, "z order")?,
                    spawn: ctx.num(v, 4, "spawn")?,
                    despawn,
                    path: parse_path(&v[6..], ctx)?,
                });
            }
            "detector_noise" => {
                ctx.exact(v, 4, "detector_noise")?;
                cfg.detector_noise = DetectorNoise {
                    sigma_center: ctx.num(v, 0, "sigma_center")?,
                    sigma_size: ctx.num(v, 1, "sigma_size")?,
                    p_miss: ctx.num(v, 2, "p_miss")?,
                    p_false: ctx.num(v, 3, "p_false")?,
                };
            }
            "feature_noise" => {
                ctx.exact(v, 2, "feature_noise")?;
                cfg.feature_noise = FeatureNoise {
                    sigma_track: ctx.num(v, 0, "sigma_track")?,
                    p_loss: ctx.num(v, 1, "p_loss")?,
                };
            }
            "occlusion_threshold" => {
                ctx.exact(v, 1, "occlusion_threshold")?;
                cfg.occlusion_threshold = ctx.num(v, 0, "threshold")?;
            }
            "noise_burst" => {
                ctx.exact(v, 3, "noise_burst")?;
                cfg.noise_bursts.push(NoiseBurst {
                    start: ctx.num(v, 0, "start")?,
                    end: ctx.num(v, 1, "end")?,
                    factor: ctx.num(v, 2, "factor")?,
                });
            }
            "scripted_occlusion" => {
                ctx.exact(v, 3, "scripted_occlusion")?;
                cfg.scripted_occlusions.push(ScriptedOcclusion {
                    object: ctx.num(v, 0, "object")?,
                    start: ctx.num(v, 1, "start")?,
                    len: ctx.num(v, 2, "length")?,
                });
            }
            other => return Err(ctx.err(format!("unknown config key {other:?}"))),
        }
        if let Some(k) = REQUIRED_KEYS.iter().find(|k| **k == key) {
            if !self.seen.contains(k) {
                self.seen.push(k);
            }
        }
        Ok(())
    }

    fn finish(self, ctx: &Ctx) -> Result<SceneConfig> {
        if let Some(missing) = REQUIRED_KEYS.iter().find(|k| !self.seen.contains(k)) {
            return Err(ctx.err(format!("missing CFG {missing}")));
        }
        Ok(self.cfg.expect("config seen"))
    }
}

fn fmt_origin(o: &Origin) -> String {
    match o {
        Origin::Static(id) => format!("L{id}"),
        Origin::Dynamic(obj) => format!("O{obj}"),
    }
}

pub fn scene_to_string(scene: &Scene) -> String {
    let mut s = format!("{SCENE_MAGIC} {SCENE_VERSION}\n");
    let _ = writeln!(s, "CFG seed {}", scene.seed);
    for line in config_lines(&scene.config) {
        s.push_str(&line);
        s.push('\n');
    }
    for f in &scene.frames {
        let _ = writeln!(
            s,
            "F {} {} {} {} {}",
            f.index,
            fmt_real(f.timestamp),
            fmt_real(f.camera_pose.x),
            fmt_real(f.camera_pose.y),
            fmt_real(f.camera_pose.theta)
        );
        for g in &f.gt_objects {
            let b = &g.bbox;
            let _ = writeln!(
                s,
                "G {} {} {} {} {}",
                g.object,
                fmt_real(b.cx),
                fmt_real(b.cy),
                fmt_real(b.w),
                fmt_real(b.h)
            );
        }
        for b in &f.detections {
            let _ = writeln!(
                s,
                "D {} {} {} {}",
                fmt_real(b.cx),
                fmt_real(b.cy),
                fmt_real(b.w),
                fmt_real(b.h)
            );
        }
        for k in &f.candidates {
            let _ = writeln!(
                s,
                "K {} {} {} {} {}",
                k.id,
                fmt_real(k.position.x),
                fmt_real(k.position.y),
                fmt_real(k.response),
                fmt_origin(&k.origin)
            );
        }
        for (id, p) in &f.correspondence {
            let _ = writeln!(s, "C {} {} {}", id, fmt_real(p.x), fmt_real(p.y));
        }
    }
    s
}

pub fn save_scene(scene: &Scene, path: &Path) -> Result<()> {
    std::fs::write(path, scene_to_string(scene)).map_err(|e| Error::io(path, e))
}

pub fn load_scene(path: &Path) -> Result<Scene> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scene(&text, &path.display().to_string())
}

pub fn parse_scene(text: &str, path: &str) -> Result<Scene> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty scene file"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 || head[0] != SCENE_MAGIC {
        return Err(Error::parse(path, 1, format!("expected header `{SCENE_MAGIC} {SCENE_VERSION}`")));
    }
    if head[1] != SCENE_VERSION {
        return Err(Error::Version {
            found: head[1].to_string(),
            expected: SCENE_VERSION.to_string(),
        });
    }

    let mut seed: Option<u64> = None;
    let mut cfg_parser = ConfigParser::default();
    let mut config: Option<SceneConfig> = None;
    let mut frames: Vec<FrameRecord> = Vec::new();
    let mut last_line = 1;

    for (line_no, line) in lines {
        last_line = line_no;
        let ctx = Ctx { path, line: line_no };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let Some(&tag) = tokens.first() else {
            continue;
        };
        let v = &tokens[1..];
        if tag == "CFG" {
            if config.is_some() {
                return Err(ctx.err("CFG line after frame data"));
            }
            if v.first() == Some(&"seed") {
                ctx.exact(v, 2, "seed")?;
                seed = Some(ctx.num(v, 1, "seed")?);
            } else {
                cfg_parser.feed(v, &ctx)?;
            }
            continue;
        }
        if config.is_none() {
            config = Some(std::mem::take(&mut cfg_parser).finish(&ctx)?);
        }
        match tag {
            "F" => {
                ctx.exact(v, 5, "F")?;
                let index: usize = ctx.num(v, 0, "frame index")?;
                if index != frames.len() {
                    return Err(ctx.err(format!("expected frame {}, found {index}", frames.len())));
                }
                frames.push(FrameRecord {
                    index,
                    timestamp: ctx.num(v, 1, "timestamp")?,
                    camera_pose: PoseSE2 {
                        x: ctx.num(v, 2, "cam_x")?,
                        y: ctx.num(v, 3, "cam_y")?,
                        theta: ctx.num(v, 4, "cam_theta")?,
                    },
                    gt_objects: Vec::new(),
                    detections: Vec::new(),
                    candidates: Vec::new(),
                    correspondence: Vec::new(),
                });
            }
            "G" | "D" | "K" | "C" => {
                let frame = frames
                    .last_mut()
                    .ok_or_else(|| ctx.err(format!("{tag} record before any F line")))?;
                match tag {
                    "G" => {
                        ctx.exact(v, 5, "G")?;
                        frame.gt_objects.push(GtObject {
                            object: ctx.num(v, 0, "object")?,
                            bbox: BoundingBox::new(
                                ctx.num(v, 1, "cx")?,
                                ctx.num(v, 2, "cy")?,
                                ctx.num(v, 3, "w")?,
                                ctx.num(v, 4, "h")?,
                            ),
                        });
                    }
                    "D" => {
                        ctx.exact(v, 4, "D")?;
                        frame.detections.push(BoundingBox::new(
                            ctx.num(v, 0, "cx")?,
                            ctx.num(v, 1, "cy")?,
                            ctx.num(v, 2, "w")?,
                            ctx.num(v, 3, "h")?,
                        ));
                    }
                    "K" => {
                        ctx.exact(v, 5, "K")?;
                        let origin = parse_origin(v[4], &ctx)?;
                        frame.candidates.push(Keypoint {
                            id: ctx.num(v, 0, "id")?,
                            position: Point2::new(ctx.num(v, 1, "x")?, ctx.num(v, 2, "y")?),
                            response: ctx.num(v, 3, "response")?,
                            origin,
                        });
                    }
                    _ => {
                        ctx.exact(v, 3, "C")?;
                        frame.correspondence.push((
                            ctx.num(v, 0, "id")?,
                            Point2::new(ctx.num(v, 1, "x")?, ctx.num(v, 2, "y")?),
                        ));
                    }
                }
            }
            other => return Err(ctx.err(format!("unknown record {other:?}"))),
        }
    }

    let end = Ctx { path, line: last_line };
    let config = match config {
        Some(c) => c,
        None => cfg_parser.finish(&end)?,
    };
    let seed = seed.ok_or_else(|| end.err("missing CFG seed"))?;
    if frames.len() != config.frames {
        return Err(end.err(format!(
            "expected {} frames, found {} (truncated file?)",
            config.frames,
            frames.len()
        )));
    }
    Ok(Scene { config, seed, frames })
}

fn parse_origin(t: &str, ctx: &Ctx) -> Result<Origin> {
    let bad = || ctx.err(format!("invalid origin {t:?}"));
    if let Some(rest) = t.strip_prefix('L') {
        rest.parse().map(Origin::Static).map_err(|_| bad())
    } else if let Some(rest) = t.strip_prefix('O') {
        rest.parse().map(Origin::Dynamic).map_err(|_| bad())
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_format_has_nine_digits() {
        assert_eq!(fmt_real(1.0), "1.00000000e0");
        assert_eq!(fmt_real(-0.0123456789), "-1.23456789e-2");
        assert_eq!(fmt_real(quantize(std::f64::consts::PI)), "3.14159265e0");
        let q = quantize(123.456789123);
        assert_eq!(quantize(q), q);
    }

    #[test]
    fn config_quantize_is_idempotent() {
        let cfg = SceneConfig::preset(super::super::DynamicLevel::High);
        let q = cfg.quantized();
        assert_eq!(q.quantized(), q);
        assert_eq!(q.objects.len(), 8);
    }

    #[test]
    fn header_errors() {
        assert!(matches!(
            parse_scene("ADUGS-SIM 2\n", "x"),
            Err(Error::Version { .. })
        ));
        assert!(matches!(
            parse_scene("SOMETHING 1\n", "x"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
