use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::SceneConfig;
use super::io::quantize;
use super::rng::stream;
use crate::error::Result;
use crate::features::{Keypoint, Origin};
use crate::geometry::{iou, BoundingBox, Point2, PoseSE2};
use crate::masking::Silhouette;
use crate::odometry::Trajectory;

/// Ids at or above this value belong to object surface points.
pub const DYNAMIC_ID_BASE: u64 = 1 << 40;
const OBJECT_ID_STRIDE: u64 = 1 << 20;

/// Ground-truth box of an object present in a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtObject {
    pub object: usize,
    pub bbox: BoundingBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub index: usize,
    pub timestamp: f64,
    pub camera_pose: PoseSE2,
    /// Objects active and overlapping the viewport.
    pub gt_objects: Vec<GtObject>,
    /// Noisy detections after occlusion and misses, then false positives.
    pub detections: Vec<BoundingBox>,
    /// Visible static landmarks and object surface points, sorted by id.
    pub candidates: Vec<Keypoint>,
    /// True image position of every visible point this frame, sorted by id.
    pub correspondence: Vec<(u64, Point2)>,
}

impl FrameRecord {
    pub fn true_position(&self, id: u64) -> Option<Point2> {
        self.correspondence
            .binary_search_by_key(&id, |(i, _)| *i)
            .ok()
            .map(|i| self.correspondence[i].1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub config: SceneConfig,
    pub seed: u64,
    pub frames: Vec<FrameRecord>,
}

impl Scene {
    pub fn gt_trajectory(&self) -> Trajectory {
        let mut t = Trajectory::new();
        for f in &self.frames {
            t.push(f.timestamp, f.camera_pose)
                .expect("frame timestamps increase");
        }
        t
    }

    /// Silhouettes of the objects visible in `frame`.
    pub fn silhouettes(&self, frame: &FrameRecord) -> Vec<Silhouette> {
        frame
            .gt_objects
            .iter()
            .map(|g| Silhouette {
                bbox: g.bbox,
                corner_radius: self.config.objects[g.object].corner_radius,
            })
            .collect()
    }

    /// Pixel to camera-frame meters.
    pub fn to_camera(&self, p: &Point2) -> Point2 {
        pixel_to_camera(&self.config, p)
    }
}

/// Image position of a world point seen from `camera`, in pixels.
pub fn project(config: &SceneConfig, camera: &PoseSE2, world: &Point2) -> Point2 {
    let c = camera.inverse().apply(world);
    let (w, h) = config.viewport;
    Point2::new(
        0.5 * w as f64 + config.px_per_meter * c.x,
        0.5 * h as f64 + config.px_per_meter * c.y,
    )
}

pub fn pixel_to_camera(config: &SceneConfig, p: &Point2) -> Point2 {
    let (w, h) = config.viewport;
    Point2::new(
        (p.x - 0.5 * w as f64) / config.px_per_meter,
        (p.y - 0.5 * h as f64) / config.px_per_meter,
    )
}

pub fn camera_pose_at(config: &SceneConfig, frame: usize) -> PoseSE2 {
    let (p, heading) = config.camera_path.sample(frame as f64 / config.frame_rate);
    PoseSE2::new(p.x, p.y, heading)
}

struct Landmark {
    id: u64,
    position: Point2,
    response: f64,
}

struct SurfacePoint {
    id: u64,
    offset: Point2,
    response: f64,
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn landmarks(config: &SceneConfig, seed: u64) -> Vec<Landmark> {
    let (w, h) = config.viewport;
    let half_view = 0.5 * (w as f64).hypot(h as f64) / config.px_per_meter;
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for k in 0..config.frames {
        let p = camera_pose_at(config, k);
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let margin = half_view + 0.5;
    let mut rng = stream(seed, "landmarks", config.landmark_seed, 0);
    (0..config.landmark_count as u64)
        .map(|id| Landmark {
            id,
            position: Point2::new(
                rng.gen_range(x0 - margin..x1 + margin),
                rng.gen_range(y0 - margin..y1 + margin),
            ),
            response: stream(seed, "responses", id, 0).gen_range(0.01..1.0),
        })
        .collect()
}

fn surface_points(config: &SceneConfig, seed: u64) -> Vec<Vec<SurfacePoint>> {
    config
        .objects
        .iter()
        .enumerate()
        .map(|(o, spec)| {
            let n = (spec.width * spec.height * config.object_point_density).round() as u64;
            let sil = Silhouette {
                bbox: BoundingBox::new(0.0, 0.0, spec.width, spec.height),
                corner_radius: spec.corner_radius,
            };
            let mut rng = stream(seed, "object-points", o as u64, 0);
            (0..n)
                .map(|k| {
                    let offset = loop {
                        let p = Point2::new(
                            rng.gen_range(-0.5 * spec.width..0.5 * spec.width),
                            rng.gen_range(-0.5 * spec.height..0.5 * spec.height),
                        );
                        if sil.contains(p.x, p.y) {
                            break p;
                        }
                    };
                    let id = DYNAMIC_ID_BASE + o as u64 * OBJECT_ID_STRIDE + k;
                    SurfacePoint {
                        id,
                        offset,
                        response: stream(seed, "responses", id, 0).gen_range(0.01..1.0),
                    }
                })
                .collect()
        })
        .collect()
}

fn in_viewport(config: &SceneConfig, p: &Point2) -> bool {
    let (w, h) = config.viewport;
    p.x >= 0.0 && p.y >= 0.0 && p.x < w as f64 && p.y < h as f64
}

fn quantize_point(p: Point2) -> Point2 {
    Point2::new(quantize(p.x), quantize(p.y))
}

fn quantize_box(b: BoundingBox) -> BoundingBox {
    BoundingBox::new(quantize(b.cx), quantize(b.cy), quantize(b.w), quantize(b.h))
}

/// Builds a scene; a pure function of `(config, seed)`.
///
/// Every real in the result is rounded to the nine significant digits the
/// scene file stores, so saving and loading reproduces it exactly.
pub fn generate(config: &SceneConfig, seed: u64) -> Result<Scene> {
    config.validate()?;
    let config = config.quantized();
    let landmarks = landmarks(&config, seed);
    let surface = surface_points(&config, seed);
    let (vw, vh) = config.viewport;
    let viewport = BoundingBox::new(0.5 * vw as f64, 0.5 * vh as f64, vw as f64, vh as f64);

    let mut frames = Vec::with_capacity(config.frames);
    for k in 0..config.frames {
        let t = quantize(k as f64 / config.frame_rate);
        let exact_pose = camera_pose_at(&config, k);
        let camera_pose = PoseSE2::new(
            quantize(exact_pose.x),
            quantize(exact_pose.y),
            quantize(exact_pose.theta),
        );
        let time = k as f64 / config.frame_rate;

        let gt_objects: Vec<GtObject> = config
            .objects
            .iter()
            .enumerate()
            .filter(|(_, o)| o.active_at(k))
            .map(|(i, o)| {
                let (c, _) = o.path.sample(time);
                GtObject {
                    object: i,
                    bbox: quantize_box(BoundingBox::new(c.x, c.y, o.width, o.height)),
                }
            })
            .filter(|g| g.bbox.intersection_area(&viewport) > 0.0)
            .collect();
        let silhouettes: Vec<(usize, i32, Silhouette)> = gt_objects
            .iter()
            .map(|g| {
                let spec = &config.objects[g.object];
                (
                    g.object,
                    spec.z_order,
                    Silhouette {
                        bbox: g.bbox,
                        corner_radius: spec.corner_radius,
                    },
                )
            })
            .collect();

        let mut detections = Vec::new();
        let factor = config.detector_noise_factor(k);
        let noise = config.detector_noise;
        for g in &gt_objects {
            let z = config.objects[g.object].z_order;
            let occluded = gt_objects.iter().any(|other| {
                config.objects[other.object].z_order > z
                    && iou(&g.bbox, &other.bbox) > config.occlusion_threshold
            });
            if occluded {
                continue;
            }
            let mut rng = stream(seed, "detector", k as u64, g.object as u64);
            let missed = rng.gen_bool(noise.p_miss);
            let n = [gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng)];
            if missed {
                continue;
            }
            let sc = noise.sigma_center * factor;
            let ss = noise.sigma_size * factor;
            detections.push(quantize_box(BoundingBox::new(
                g.bbox.cx + sc * n[0],
                g.bbox.cy + sc * n[1],
                (g.bbox.w + ss * n[2]).max(1.0),
                (g.bbox.h + ss * n[3]).max(1.0),
            )));
        }
        let mut fp = stream(seed, "false-positives", k as u64, 0);
        if fp.gen_bool(noise.p_false) {
            detections.push(quantize_box(BoundingBox::new(
                fp.gen_range(0.0..vw as f64),
                fp.gen_range(0.0..vh as f64),
                fp.gen_range(20.0..100.0),
                fp.gen_range(20.0..100.0),
            )));
        }

        let mut candidates = Vec::new();
        for l in &landmarks {
            let p = project(&config, &exact_pose, &l.position);
            if !in_viewport(&config, &p) || silhouettes.iter().any(|(_, _, s)| s.contains(p.x, p.y)) {
                continue;
            }
            candidates.push(Keypoint {
                id: l.id,
                position: quantize_point(p),
                response: quantize(l.response),
                origin: Origin::Static(l.id),
            });
        }
        for g in &gt_objects {
            let z = config.objects[g.object].z_order;
            for sp in &surface[g.object] {
                let p = Point2::new(g.bbox.cx + sp.offset.x, g.bbox.cy + sp.offset.y);
                let hidden = silhouettes
                    .iter()
                    .any(|(o, oz, s)| *o != g.object && *oz > z && s.contains(p.x, p.y));
                if hidden || !in_viewport(&config, &p) {
                    continue;
                }
                candidates.push(Keypoint {
                    id: sp.id,
                    position: quantize_point(p),
                    response: quantize(sp.response),
                    origin: Origin::Dynamic(g.object),
                });
            }
        }
        candidates.sort_by_key(|c| c.id);
        let correspondence = candidates.iter().map(|c| (c.id, c.position)).collect();

        frames.push(FrameRecord {
            index: k,
            timestamp: t,
            camera_pose,
            gt_objects,
            detections,
            candidates,
            correspondence,
        });
    }
    Ok(Scene {
        config,
        seed,
        frames,
    })
}
