//! Measurement noise under a detector noise burst: the adaptive covariance
//! rises inside the burst and relaxes after it.
//!
//! ```text
//! cargo run --example adaptive_noise
//! ```

use dynvo::simulator::{generate, scenario_noise_burst, ObjectSpec, PathSpec, SceneConfig};
use dynvo::tracker::{adapt_measurement_noise, AdaptiveNoiseConfig, Tracker, TrackerConfig};

fn main() -> dynvo::Result<()> {
    let cfg = AdaptiveNoiseConfig::default();
    println!("R entry as a function of windowed residual RMSE (lambda {}, beta {}):", cfg.lambda, cfg.beta);
    for rmse in [0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0] {
        println!("  rmse {rmse:>5.1} px -> R {:.4}", adapt_measurement_noise(&[rmse; 4], &cfg)[(0, 0)]);
    }

    let mut base = SceneConfig::default();
    base.frames = 160;
    base.detector_noise.p_miss = 0.0;
    base.detector_noise.p_false = 0.0;
    base.objects = vec![ObjectSpec {
        width: 90.0,
        height: 70.0,
        corner_radius: 10.0,
        z_order: 0,
        spawn: 0,
        despawn: None,
        path: PathSpec::Line { x: 120.0, y: 240.0, heading: 0.0, speed: 60.0 },
    }];
    let scene = generate(&scenario_noise_burst(&base, 60..100, 5.0)?, 3)?;

    let mut tracker = Tracker::new(TrackerConfig::default())?;
    println!("\nframe  R_x (burst on frames 60..100)");
    for f in &scene.frames {
        let out = tracker.step(&f.detections)?;
        if f.index % 10 == 0 {
            let r = out.tracks.iter().find_map(|t| t.noise_diagonal);
            println!("{:>5}  {}", f.index, r.map_or("-".into(), |d| format!("{:.3}", d[0])));
        }
    }
    Ok(())
}
