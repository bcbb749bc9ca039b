//! Dynamic-scene front end for planar visual odometry.
//!
//! The crate wires together the pieces needed to keep moving objects out of a
//! feature-based odometry pipeline:
//!
//! - [`tracker`]: constant-velocity Kalman box tracking (SORT) whose
//!   measurement-noise covariance adapts to a sliding window of innovations,
//!   Hungarian association and track lifecycle with coasting.
//! - [`masking`]: promptable segmenter contract, disk erosion/dilation and
//!   mask refinement.
//! - [`features`]: ANMS selection, simulated optical-flow propagation,
//!   dynamic-point rejection and budget compensation.
//! - [`odometry`]: closed-form SE(2) registration and trajectory accumulation.
//! - [`simulator`]: deterministic synthetic dynamic scenes and the scene file.
//! - [`metrics`]: alignment, ATE, correct rate and tracking diagnostics.
//! - [`harness`]: pipeline assembly, ablation switches, configuration and
//!   file output used by the `dynvo` binary.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod features;
pub mod geometry;
pub mod harness;
pub mod masking;
pub mod metrics;
pub mod odometry;
pub mod simulator;
pub mod tracker;

pub use error::{Error, Result};
pub use geometry::{erf, iou, BoundingBox, Point2, PoseSE2};
