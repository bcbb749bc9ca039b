//! Trajectory and tracking evaluation.

mod trajectory;
mod tracking;

pub use tracking::{tracking_report, OcclusionOutcome, TrackingReport, TRACK_MATCH_IOU};
pub use trajectory::{
    align_umeyama, associate_timestamps, ate, ate_rmse, correct_rate, Alignment, AteReport,
    CrReport, DEFAULT_CR_EPSILON,
};
