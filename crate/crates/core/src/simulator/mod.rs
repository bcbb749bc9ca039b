//! Deterministic synthetic dynamic scenes.
//!
//! A planar camera moves over a field of static landmarks while rectangular
//! objects with rounded corners move through the image. Each frame carries
//! ground-truth boxes, noisy detections (with occlusion-driven dropouts,
//! misses and false positives), keypoint candidates and their true positions.

mod config;
mod generate;
mod io;
mod rng;
mod scenario;

pub use config::{
    DetectorNoise, DynamicLevel, FeatureNoise, NoiseBurst, ObjectSpec, PathSpec, SceneConfig,
    ScriptedOcclusion,
};
pub use generate::{
    camera_pose_at, generate, pixel_to_camera, project, FrameRecord, GtObject, Scene,
    DYNAMIC_ID_BASE,
};
pub(crate) use io::parse_path_spec;
pub use io::{
    config_lines, fmt_real, load_scene, parse_scene, quantize, save_scene, scene_to_string,
    SCENE_MAGIC, SCENE_VERSION,
};
pub use rng::{stream, stream_seed};
pub use scenario::{scenario_noise_burst, scenario_occlusion_crossing, OCCLUSION_OBJECT_SIZE};
