//! Median ATE of the full pipeline against single-stage ablations.
//!
//! ```text
//! cargo run --release --example ablation -- [seeds]
//! ```

use std::time::Instant;

use dynvo::harness::{run_pipeline, PipelineConfig};
use dynvo::simulator::{generate, scenario_occlusion_crossing, DynamicLevel, SceneConfig};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn main() -> dynvo::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let start = Instant::now();

    let high = SceneConfig::preset(DynamicLevel::High);
    let occlusion = scenario_occlusion_crossing(&SceneConfig::default(), 8)?;

    let variants: [(&str, fn(&mut PipelineConfig)); 5] = [
        ("full", |_| {}),
        ("no-mask", |c| c.mask_enabled = false),
        ("no-sort", |c| c.sort_enabled = false),
        ("no-adaptive-r", |c| c.adaptive_r_enabled = false),
        ("no-compensation", |c| c.compensation_enabled = false),
    ];
    for (name, scene_cfg) in [("high", &high), ("occlusion", &occlusion)] {
        let scenes: Vec<_> = (1..=seeds).map(|s| generate(scene_cfg, s)).collect::<Result<_, _>>()?;
        for (label, tweak) in &variants {
            let mut cfg = PipelineConfig::default();
            tweak(&mut cfg);
            let runs: Vec<_> = scenes.iter().map(|s| run_pipeline(s, &cfg)).collect::<Result<_, _>>()?;
            let ates: Vec<f64> = runs.iter().map(|r| r.ate.rmse).collect();
            let cr: f64 = runs.iter().map(|r| r.cr.correct_rate).sum::<f64>() / runs.len() as f64;
            let contaminated: usize = runs.iter().map(|r| r.contaminated_frames()).sum();
            println!(
                "{name:<10} {label:<16} median ATE {:.5} m  CR {:.3}  contaminated frames {contaminated}  per-seed {:?}",
                median(ates.clone()),
                cr,
                ates.iter().map(|a| (a * 1e4).round() / 1e4).collect::<Vec<_>>()
            );
        }
    }
    println!("elapsed {:.2} s", start.elapsed().as_secs_f64());
    Ok(())
}
