//! Track ids through a scripted occlusion: the rear object loses its
//! detections for a few frames and its track coasts on the prediction.
//!
//! ```text
//! cargo run --example occlusion_tracking -- [occluded_frames]
//! ```

use dynvo::metrics::tracking_report;
use dynvo::simulator::{generate, scenario_occlusion_crossing, SceneConfig};
use dynvo::tracker::{Tracker, TrackerConfig};

fn main() -> dynvo::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let cfg = scenario_occlusion_crossing(&SceneConfig::default(), n)?;
    let occ = cfg.scripted_occlusions[0];
    let scene = generate(&cfg, 1)?;
    let mut tracker = Tracker::new(TrackerConfig::default())?;

    let mut outputs = Vec::new();
    for f in &scene.frames {
        let out = tracker.step(&f.detections)?;
        if f.index + 2 >= occ.start && f.index <= occ.start + occ.len + 1 {
            let tracks: Vec<String> = out.tracks.iter().map(|t| format!("#{} {:?}", t.id, t.status)).collect();
            println!("frame {:>3}: {} detections, tracks [{}]", f.index, f.detections.len(), tracks.join(", "));
        }
        outputs.push(out.prompt_boxes());
    }
    let report = tracking_report(&outputs, &scene);
    let o = report.occlusions[0];
    println!(
        "\nocclusion frames {}..{}: id before {:?}, id after {:?}, survived {}",
        occ.start,
        occ.start + occ.len,
        o.id_before,
        o.id_after,
        o.survived
    );
    println!("mean IoU {:.3}, id switches {}, missed object-frames {}", report.mean_iou_vs_gt, report.id_switches, report.miss_frames);
    Ok(())
}
