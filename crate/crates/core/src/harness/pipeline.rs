use std::collections::HashMap;

use super::config::PipelineConfig;
use crate::error::Result;
use crate::features::{
    compensation_cap, enforce_spacing, propagate, reject_dynamic, replenish, FeatureSet,
    TrackNoise,
};
use crate::geometry::{BoundingBox, PoseSE2};
use crate::masking::{refine, BinaryMask, SegmentContext};
use crate::metrics::{ate_rmse, correct_rate, tracking_report, AteReport, CrReport, TrackingReport};
use crate::odometry::{estimate_relative_pose, estimate_relative_pose_trimmed, Correspondence, Trajectory};
use crate::simulator::{stream_seed, Scene};
use crate::tracker::Tracker;

/// Per-frame counters written to `diagnostics.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameDiagnostics {
    pub frame: usize,
    pub timestamp: f64,
    pub detections: usize,
    pub prompts: usize,
    pub mask_pixels: usize,
    /// Features propagated from the previous frame (before rejection).
    pub s: usize,
    /// Propagated features rejected by the mask.
    pub r: usize,
    /// Survivors after rejection.
    pub s_prime: usize,
    /// Survivors dropped for violating the minimum spacing.
    pub pruned: usize,
    pub lost: usize,
    pub cap: usize,
    pub added: usize,
    pub active: usize,
    /// Correspondences used by the registration.
    pub used: usize,
    /// Used correspondences that lie on moving objects.
    pub contaminated: usize,
    pub degenerate: bool,
    pub residual_rms: f64,
    /// Mean measurement-noise diagonal over tracks updated this frame.
    pub mean_r: Option<[f64; 4]>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub scene_name: String,
    pub seed: u64,
    pub switches: String,
    pub estimate: Trajectory,
    pub ground_truth: Trajectory,
    pub ate: AteReport,
    pub cr: CrReport,
    pub tracking: TrackingReport,
    pub diagnostics: Vec<FrameDiagnostics>,
}

impl RunResult {
    pub fn degenerate_frames(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.degenerate).count()
    }

    pub fn contaminated_frames(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.contaminated > 0).count()
    }
}

/// State visible to an observer after each frame.
pub struct FrameView<'a> {
    pub frame: usize,
    pub mask: &'a BinaryMask,
    pub features: &'a FeatureSet,
    pub prompts: &'a [(u64, BoundingBox)],
    pub diagnostics: &'a FrameDiagnostics,
}

/// Runs tracking, masking, feature management and odometry over the scene.
pub fn run_pipeline(scene: &Scene, config: &PipelineConfig) -> Result<RunResult> {
    run_pipeline_with(scene, config, |_| {})
}

/// As [`run_pipeline`], calling `observe` once per frame.
pub fn run_pipeline_with<F>(scene: &Scene, config: &PipelineConfig, mut observe: F) -> Result<RunResult>
where
    F: FnMut(&FrameView<'_>),
{
    config.validate()?;
    let (width, height) = scene.config.viewport;
    let mut tracker = Tracker::new(config.effective_tracker())?;
    let mut segmenter = config.segmenter.build(
        config.flip_prob,
        config.max_speckles,
        stream_seed(scene.seed, "segmenter", 0, 0),
    );
    let noise = TrackNoise {
        sigma: scene.config.feature_noise.sigma_track,
        p_loss: scene.config.feature_noise.p_loss,
        seed: scene.seed,
    };
    let budget = config.budget;

    let mut features = FeatureSet::default();
    let mut estimate = Trajectory::new();
    let mut last_motion = PoseSE2::IDENTITY;
    let mut next_raw_id = 1u64;
    let mut diagnostics = Vec::with_capacity(scene.frames.len());
    let mut outputs: Vec<Vec<(u64, BoundingBox)>> = Vec::with_capacity(scene.frames.len());

    for frame in &scene.frames {
        let mut mean_r = None;
        let prompts: Vec<(u64, BoundingBox)> = if config.sort_enabled {
            let out = tracker.step(&frame.detections)?;
            let diags: Vec<[f64; 4]> = out.tracks.iter().filter_map(|t| t.noise_diagonal).collect();
            if !diags.is_empty() {
                let mut m = [0.0; 4];
                for d in &diags {
                    for (a, v) in m.iter_mut().zip(d) {
                        *a += v / diags.len() as f64;
                    }
                }
                mean_r = Some(m);
            }
            out.prompt_boxes()
        } else {
            frame
                .detections
                .iter()
                .map(|b| {
                    next_raw_id += 1;
                    (next_raw_id - 1, *b)
                })
                .collect()
        };

        let mut mask = BinaryMask::new(width, height);
        if config.mask_enabled {
            let silhouettes = scene.silhouettes(frame);
            let ctx = SegmentContext {
                width,
                height,
                frame_index: frame.index,
                objects: &silhouettes,
            };
            for (_, prompt) in &prompts {
                let raw = segmenter.segment(&ctx, prompt);
                mask.union_with(&refine(&raw, config.r_erode, config.r_dilate)?)?;
            }
        }

        let first = frame.index == 0 || estimate.is_empty();
        let (matched, lost) = if first {
            (Vec::new(), features.len())
        } else {
            propagate(&features, frame, &noise)
        };
        let s = matched.len();
        let (survivors, r) = reject_dynamic(matched, &mask);
        let s_prime = survivors.len();

        let previous: HashMap<u64, _> = features
            .active
            .iter()
            .map(|f| (f.keypoint.id, f.keypoint.position))
            .collect();
        let correspondences: Vec<Correspondence> = survivors
            .iter()
            .filter_map(|f| {
                previous.get(&f.keypoint.id).map(|prev| Correspondence {
                    prev: scene.to_camera(prev),
                    curr: scene.to_camera(&f.keypoint.position),
                    feature_id: f.keypoint.id,
                })
            })
            .collect();
        let dynamic_ids: Vec<bool> = survivors.iter().map(|f| f.keypoint.origin.is_dynamic()).collect();

        let (motion, degenerate, used, contaminated, residual_rms) = if first {
            (PoseSE2::IDENTITY, false, 0, 0, 0.0)
        } else {
            let fit = if config.trim_fraction > 0.0 {
                estimate_relative_pose_trimmed(&correspondences, config.trim_fraction)
            } else {
                estimate_relative_pose(&correspondences)
            };
            match fit {
                Ok(reg) => {
                    let contaminated = if reg.used == correspondences.len() {
                        dynamic_ids.iter().filter(|d| **d).count()
                    } else {
                        // Trimmed: count dynamic points among those kept.
                        let kept = kept_ids(&correspondences, &reg.transform, reg.used);
                        survivors
                            .iter()
                            .filter(|f| f.keypoint.origin.is_dynamic() && kept.contains(&f.keypoint.id))
                            .count()
                    };
                    (reg.camera_motion(), false, reg.used, contaminated, reg.residual_rms)
                }
                Err(e) => {
                    log::debug!("frame {}: registration failed ({e}); reusing previous motion", frame.index);
                    (last_motion, true, 0, 0, 0.0)
                }
            }
        };
        last_motion = motion;
        estimate.accumulate(&motion, frame.timestamp)?;

        let (survivors, pruned) = enforce_spacing(survivors, budget.d_min);
        let cap = if config.compensation_enabled {
            compensation_cap(budget.n_max, s, r)
        } else {
            budget.n_max.saturating_sub(s)
        };
        let kept = survivors.len();
        features = replenish(survivors, &frame.candidates, &budget, &mask, cap);
        let added = features.len() - kept;

        let diag = FrameDiagnostics {
            frame: frame.index,
            timestamp: frame.timestamp,
            detections: frame.detections.len(),
            prompts: prompts.len(),
            mask_pixels: mask.count(),
            s,
            r,
            s_prime,
            pruned,
            lost,
            cap,
            added,
            active: features.len(),
            used,
            contaminated,
            degenerate,
            residual_rms,
            mean_r,
        };
        observe(&FrameView {
            frame: frame.index,
            mask: &mask,
            features: &features,
            prompts: &prompts,
            diagnostics: &diag,
        });
        diagnostics.push(diag);
        outputs.push(prompts);
    }

    let ground_truth = scene.gt_trajectory();
    let ate = ate_rmse(&estimate, &ground_truth)?;
    let cr = correct_rate(&estimate, &ground_truth, config.cr_epsilon);
    let tracking = tracking_report(&outputs, scene);
    Ok(RunResult {
        scene_name: scene.config.name.clone(),
        seed: scene.seed,
        switches: config.switches(),
        estimate,
        ground_truth,
        ate,
        cr,
        tracking,
        diagnostics,
    })
}

/// Ids of the `used` best-fitting correspondences under `transform`.
fn kept_ids(c: &[Correspondence], transform: &PoseSE2, used: usize) -> Vec<u64> {
    let mut scored: Vec<(f64, u64)> = c
        .iter()
        .map(|c| (transform.apply(&c.prev).distance_sq(&c.curr), c.feature_id))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    scored.into_iter().take(used).map(|(_, id)| id).collect()
}
