//! SORT-style multi-object box tracking with residual-driven measurement noise.
//!
//! Each track runs a constant-velocity Kalman filter over the eight-component
//! state `(x, y, w, h, vx, vy, vw, vh)`. Innovations from matched updates are
//! kept in a sliding window; their component-wise RMSE is squashed through
//! `beta * erf(lambda * rmse)` to produce the diagonal measurement-noise
//! covariance used for the next update.

mod adaptive;
mod assignment;
mod kalman;
mod sort;

pub use adaptive::{adapt_measurement_noise, residual_rmse, AdaptiveNoiseConfig, AdaptiveScope};
pub use assignment::{associate, linear_assignment, Association};
pub use kalman::{
    KalmanModel, MeasurementMatrix, MeasurementVector, StateCovariance, StateVector, Track,
    TrackState, TrackStatus,
};
pub use sort::{FrameOutput, LifecycleConfig, TrackOutput, Tracker, TrackerConfig};
