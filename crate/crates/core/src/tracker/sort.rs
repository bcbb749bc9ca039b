use std::collections::VecDeque;

use nalgebra::Matrix4;

use super::adaptive::{adapt_measurement_noise, residual_rmse, AdaptiveNoiseConfig, AdaptiveScope};
use super::assignment::associate;
use super::kalman::{KalmanModel, MeasurementVector, Track, TrackStatus};
use crate::error::Result;
use crate::geometry::BoundingBox;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifecycleConfig {
    /// Minimum IoU for a track/detection pair to be associated.
    pub gate_iou: f64,
    /// Frames a confirmed track may coast before deletion.
    pub max_age: u32,
    /// Matched frames (including the spawning one) before confirmation.
    pub min_hits: u32,
}

impl Default for LifecycleConfig {
    fn default() -> Self {
        Self {
            gate_iou: 0.3,
            max_age: 10,
            min_hits: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerConfig {
    pub model: KalmanModel,
    pub adaptive: AdaptiveNoiseConfig,
    pub lifecycle: LifecycleConfig,
    /// When false every update uses `R_init`.
    pub adaptive_enabled: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            model: KalmanModel::default(),
            adaptive: AdaptiveNoiseConfig::default(),
            lifecycle: LifecycleConfig::default(),
            adaptive_enabled: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackOutput {
    pub id: u64,
    pub bbox: BoundingBox,
    pub status: TrackStatus,
    /// Diagonal of the measurement noise used if the track was updated this frame.
    pub noise_diagonal: Option<[f64; 4]>,
}

/// Everything the tracker reports for one frame, including tracks deleted in it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameOutput {
    pub tracks: Vec<TrackOutput>,
}

impl FrameOutput {
    /// Boxes of confirmed and coasting tracks.
    pub fn prompt_boxes(&self) -> Vec<(u64, BoundingBox)> {
        self.tracks
            .iter()
            .filter(|t| matches!(t.status, TrackStatus::Confirmed | TrackStatus::Coasting))
            .map(|t| (t.id, t.bbox))
            .collect()
    }
}

/// Single-writer multi-object tracker. Call [`Tracker::step`] once per frame.
#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    tracks: Vec<Track>,
    next_id: u64,
    shared_window: VecDeque<[f64; 4]>,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Result<Self> {
        config.adaptive.validate()?;
        if !(0.0..1.0).contains(&config.lifecycle.gate_iou) {
            return Err(crate::Error::Config(format!(
                "gate_iou must be in [0, 1), got {}",
                config.lifecycle.gate_iou
            )));
        }
        Ok(Self {
            config,
            tracks: Vec::new(),
            next_id: 1,
            shared_window: VecDeque::new(),
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    /// Live (not deleted) tracks.
    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    /// Measurement noise the next update of `track` would use.
    pub fn measurement_noise(&self, track: &Track) -> Matrix4<f64> {
        let cfg = &self.config;
        if !cfg.adaptive_enabled {
            return cfg.model.initial_measurement_noise;
        }
        let window = match cfg.adaptive.scope {
            AdaptiveScope::PerTrack => &track.residuals,
            AdaptiveScope::Global => &self.shared_window,
        };
        if window.len() < cfg.adaptive.min_samples {
            return cfg.model.initial_measurement_noise;
        }
        match residual_rmse(window) {
            Ok(rmse) => adapt_measurement_noise(&rmse, &cfg.adaptive),
            Err(_) => cfg.model.initial_measurement_noise,
        }
    }

    /// Runs predict, association, update and lifecycle transitions for one frame.
    pub fn step(&mut self, detections: &[MeasurementVector]) -> Result<FrameOutput> {
        let model = self.config.model.clone();
        let lifecycle = self.config.lifecycle;

        for track in &mut self.tracks {
            track.predict(&model);
        }
        let predicted: Vec<BoundingBox> = self.tracks.iter().map(Track::bbox).collect();
        let assoc = associate(&predicted, detections, lifecycle.gate_iou);

        let mut noise_used: Vec<Option<[f64; 4]>> = vec![None; self.tracks.len()];
        for &(ti, di) in &assoc.matches {
            let r = self.measurement_noise(&self.tracks[ti]);
            let track = &mut self.tracks[ti];
            track.update(&detections[di], &r, &model)?;
            if let Some(delta) = track.residuals.back().copied() {
                if self.shared_window.len() == self.config.adaptive.window_len {
                    self.shared_window.pop_front();
                }
                self.shared_window.push_back(delta);
            }
            noise_used[ti] = Some([r[(0, 0)], r[(1, 1)], r[(2, 2)], r[(3, 3)]]);
            track.status = match track.status {
                TrackStatus::Tentative if track.hits >= lifecycle.min_hits => {
                    TrackStatus::Confirmed
                }
                TrackStatus::Coasting => TrackStatus::Confirmed,
                s => s,
            };
        }

        for &ti in &assoc.unmatched_tracks {
            let track = &mut self.tracks[ti];
            track.status = match track.status {
                TrackStatus::Tentative => TrackStatus::Deleted,
                _ if track.time_since_update > lifecycle.max_age => TrackStatus::Deleted,
                _ => TrackStatus::Coasting,
            };
        }

        for &di in &assoc.unmatched_detections {
            let mut track = Track::new(
                self.next_id,
                &detections[di],
                &model,
                self.config.adaptive.window_len,
            );
            self.next_id += 1;
            if track.hits >= lifecycle.min_hits {
                track.status = TrackStatus::Confirmed;
            }
            self.tracks.push(track);
            noise_used.push(None);
        }

        let output = FrameOutput {
            tracks: self
                .tracks
                .iter()
                .zip(&noise_used)
                .map(|(t, noise)| TrackOutput {
                    id: t.id,
                    bbox: t.bbox(),
                    status: t.status,
                    noise_diagonal: *noise,
                })
                .collect(),
        };
        self.tracks.retain(|t| t.status != TrackStatus::Deleted);
        Ok(output)
    }

    /// Boxes to prompt the segmenter with after [`Tracker::step`]: the
    /// posterior box for tracks matched this frame, the prediction for
    /// coasting ones. Tentative tracks are excluded.
    pub fn prompt_boxes(&self) -> Vec<(u64, BoundingBox)> {
        self.tracks
            .iter()
            .filter(|t| matches!(t.status, TrackStatus::Confirmed | TrackStatus::Coasting))
            .map(|t| (t.id, t.bbox()))
            .collect()
    }
}
