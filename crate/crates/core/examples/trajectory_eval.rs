//! Run the pipeline on one scene and score the estimate with and without
//! dynamic masking.
//!
//! ```text
//! cargo run --release --example trajectory_eval -- [seed]
//! ```

use dynvo::harness::{run_pipeline, PipelineConfig};
use dynvo::metrics::{ate, correct_rate};
use dynvo::simulator::{generate, DynamicLevel, SceneConfig};

fn main() -> dynvo::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let scene = generate(&SceneConfig::preset(DynamicLevel::High), seed)?;
    for (label, cfg) in [
        ("masking on ", PipelineConfig::default()),
        ("masking off", PipelineConfig { mask_enabled: false, ..PipelineConfig::default() }),
    ] {
        let run = run_pipeline(&scene, &cfg)?;
        let rigid = ate(&run.estimate, &run.ground_truth, false)?;
        let similarity = ate(&run.estimate, &run.ground_truth, true)?;
        println!(
            "{label}: ATE rmse {:.4} m (median {:.4}, max {:.4}); with scale {:.4} m at s={:.3}",
            rigid.rmse, rigid.median, rigid.max, similarity.rmse, similarity.alignment.scale
        );
        for eps in [0.01, 0.05, 0.1] {
            let cr = correct_rate(&run.estimate, &run.ground_truth, eps);
            println!("    CR@{eps:.2} m = {:.3}", cr.correct_rate);
        }
    }
    Ok(())
}
