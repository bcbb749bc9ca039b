//! Generate a preset scene, save it, load it back and summarise a few frames.
//!
//! ```text
//! cargo run --example simulate_scene -- [none|low|mid|high] [seed] [out.txt]
//! ```

use std::path::PathBuf;

use dynvo::simulator::{generate, load_scene, save_scene, DynamicLevel, SceneConfig, DYNAMIC_ID_BASE};

fn main() -> dynvo::Result<()> {
    let mut args = std::env::args().skip(1);
    let level = args.next().and_then(|s| DynamicLevel::parse(&s)).unwrap_or(DynamicLevel::Mid);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("dynvo-scene.txt"));

    let scene = generate(&SceneConfig::preset(level), seed)?;
    save_scene(&scene, &out)?;
    let reloaded = load_scene(&out)?;
    assert_eq!(reloaded, scene, "scene file round trip");

    println!("{} frames, {} objects -> {}", scene.frames.len(), scene.config.objects.len(), out.display());
    for f in scene.frames.iter().step_by(40) {
        let dynamic = f.candidates.iter().filter(|k| k.id >= DYNAMIC_ID_BASE).count();
        println!(
            "frame {:>3}  t={:.2}s  camera=({:+.3}, {:+.3}, {:+.3})  objects={} detections={} candidates={} (dynamic {})",
            f.index,
            f.timestamp,
            f.camera_pose.x,
            f.camera_pose.y,
            f.camera_pose.theta,
            f.gt_objects.len(),
            f.detections.len(),
            f.candidates.len(),
            dynamic
        );
    }
    Ok(())
}
