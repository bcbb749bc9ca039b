//! Spatially spread feature selection and one round of budget compensation
//! after dynamic points are rejected.
//!
//! ```text
//! cargo run --example anms_selection
//! ```

use dynvo::features::{anms_select, compensation_cap, reject_dynamic, replenish, FeatureBudget, TrackedFeature};
use dynvo::masking::BinaryMask;
use dynvo::simulator::{generate, DynamicLevel, SceneConfig};

fn main() -> dynvo::Result<()> {
    let scene = generate(&SceneConfig::preset(DynamicLevel::High), 5)?;
    let frame = &scene.frames[30];
    let budget = FeatureBudget::default();
    let (w, h) = scene.config.viewport;

    let empty = BinaryMask::new(w, h);
    let picked = anms_select(&frame.candidates, &budget, &empty);
    let top: Vec<_> = {
        let mut c = frame.candidates.clone();
        c.sort_by(|a, b| b.response.total_cmp(&a.response));
        c.truncate(budget.n_max);
        c
    };
    let spread = |pts: &[dynvo::Point2]| {
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.x).sum::<f64>() / n, pts.iter().map(|p| p.y).sum::<f64>() / n);
        (pts.iter().map(|p| (p.x - mx).powi(2) + (p.y - my).powi(2)).sum::<f64>() / n).sqrt()
    };
    println!("{} candidates, budget n_max={} d_min={}", frame.candidates.len(), budget.n_max, budget.d_min);
    println!("ANMS: {} selected, RMS spread {:.1} px", picked.len(), spread(&picked.iter().map(|k| k.position).collect::<Vec<_>>()));
    println!("top response: {} selected, RMS spread {:.1} px", top.len(), spread(&top.iter().map(|k| k.position).collect::<Vec<_>>()));

    // Reject whatever falls on the objects, then refill up to the budget.
    let mut mask = BinaryMask::new(w, h);
    for g in &frame.gt_objects {
        mask.fill_box(&g.bbox);
    }
    let tracked: Vec<TrackedFeature> = picked.iter().map(|k| TrackedFeature { keypoint: *k, age: 1 }).collect();
    let s = tracked.len();
    let (survivors, r) = reject_dynamic(tracked, &mask);
    let cap = compensation_cap(budget.n_max, s, r);
    let set = replenish(survivors, &frame.candidates, &budget, &mask, cap);
    println!("rejected r={r} of s={s}; extraction cap n_max - s + r = {cap}; active after refill {}", set.len());
    Ok(())
}
