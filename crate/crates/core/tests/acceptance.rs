//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::time::Instant;

use dynvo::features::{anms_select, FeatureBudget};
use dynvo::harness::cli::main_with_args;
use dynvo::harness::{run_pipeline, run_pipeline_with, trajectory_to_string, PipelineConfig, RunResult};
use dynvo::masking::{dilate, erode, BinaryMask, StructuringElement};
use dynvo::metrics::tracking_report;
use dynvo::simulator::{generate, save_scene, scenario_occlusion_crossing, DynamicLevel, Scene, SceneConfig};
use dynvo::tracker::{adapt_measurement_noise, linear_assignment, residual_rmse, AdaptiveNoiseConfig, KalmanModel, Track, Tracker, TrackerConfig};
use dynvo::{erf, iou, BoundingBox};
use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{anms_oracle, assignment_cost, brute_force_min, dilate_oracle, erf_oracle, erode_oracle, median, random_candidates, random_mask};

const SEEDS: std::ops::RangeInclusive<u64> = 1..=5;

enum Outcome {
    Pass(String),
    Fail(String),
    Substituted(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

/// Frame-level feature invariants, collected while a run executes.
#[derive(Default)]
struct Invariants {
    frames: usize,
    violations: Vec<String>,
}

fn run_checked(scene: &Scene, cfg: &PipelineConfig, inv: &mut Invariants) -> RunResult {
    let n_max = cfg.budget.n_max;
    let d_min = cfg.budget.d_min;
    let label = format!("{} seed {} {}", scene.config.name, scene.seed, cfg.switches());
    run_pipeline_with(scene, cfg, |view| {
        inv.frames += 1;
        let active = &view.features.active;
        let d = view.diagnostics;
        let mut bad = Vec::new();
        if active.len() > n_max {
            bad.push(format!("{} active > n_max", active.len()));
        }
        if active.iter().any(|f| view.mask.contains(&f.keypoint.position)) {
            bad.push("active feature inside mask".into());
        }
        for (i, a) in active.iter().enumerate() {
            if active[i + 1..].iter().any(|b| a.keypoint.position.distance(&b.keypoint.position) < d_min) {
                bad.push("features closer than d_min".into());
                break;
            }
        }
        if cfg.compensation_enabled && d.cap != (n_max + d.r).saturating_sub(d.s) {
            bad.push(format!("cap {} != n_max - s + r ({} - {} + {})", d.cap, n_max, d.s, d.r));
        }
        for b in bad {
            inv.violations.push(format!("{label} frame {}: {b}", view.frame));
        }
    })
    .expect("pipeline run")
}

fn occlusion_scene_config() -> SceneConfig {
    scenario_occlusion_crossing(&SceneConfig::default(), 8).expect("occlusion scenario")
}

fn criterion_2(inv: &mut Invariants) -> Outcome {
    let start = Instant::now();
    let high = SceneConfig::preset(DynamicLevel::High);
    let occlusion = occlusion_scene_config();
    let full = PipelineConfig::default();
    let no_mask = PipelineConfig { mask_enabled: false, ..PipelineConfig::default() };
    let no_sort = PipelineConfig { sort_enabled: false, ..PipelineConfig::default() };

    let (mut a_full, mut a_nomask, mut o_sort, mut o_nosort) = (vec![], vec![], vec![], vec![]);
    for seed in SEEDS {
        let scene = generate(&high, seed).expect("scene");
        a_full.push(run_checked(&scene, &full, inv).ate.rmse);
        a_nomask.push(run_pipeline(&scene, &no_mask).expect("run").ate.rmse);
        let scene = generate(&occlusion, seed).expect("scene");
        o_sort.push(run_checked(&scene, &full, inv).ate.rmse);
        o_nosort.push(run_checked(&scene, &no_sort, inv).ate.rmse);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let (mf, mn, ms, mo) = (median(&a_full), median(&a_nomask), median(&o_sort), median(&o_nosort));
    let ok = mf <= 0.5 * mn && ms < mo && elapsed <= 30.0;
    check(
        ok,
        format!(
            "high: median ATE full {mf:.6} vs no-mask {mn:.6} (ratio {:.3} <= 0.5); occlusion: SORT {ms:.6} < no-SORT {mo:.6}; {elapsed:.1} s",
            mf / mn
        ),
    )
}

fn criterion_3() -> Outcome {
    let model = KalmanModel::default();
    let mut worst: f64 = 0.0;
    let mut window_ok = true;
    for (lambda, beta) in [(0.1, 10.0), (0.5, 3.0), (1.0, 2.0), (0.05, 20.0)] {
        for magnitude in [0.0, 0.25, 1.0, 4.0, 12.0] {
            let cfg = AdaptiveNoiseConfig { lambda, beta, ..AdaptiveNoiseConfig::default() };
            let mut track = Track::new(1, &BoundingBox::new(200.0, 100.0, 50.0, 40.0), &model, cfg.window_len);
            for k in 0..cfg.window_len + 5 {
                track.predict(&model);
                let d = if k % 2 == 0 { magnitude } else { -magnitude };
                let x = track.state;
                let z = BoundingBox::new(x[0] + d, x[1] - d, x[2] + d, x[3] - d);
                track.update(&z, &(Matrix4::identity() * 10.0), &model).expect("update");
            }
            window_ok &= track.residuals.len() == cfg.window_len;
            let r = adapt_measurement_noise(&residual_rmse(&track.residuals).expect("rmse"), &cfg);
            let expected = (beta * erf_oracle(lambda * magnitude)).max(cfg.floor_eps);
            for i in 0..4 {
                worst = worst.max((r[(i, i)] - expected).abs());
            }
        }
    }
    let mut monotone = true;
    let base = AdaptiveNoiseConfig::default();
    for l in 0..40 {
        let lambda = 0.02 + 0.05 * l as f64;
        let cfg = AdaptiveNoiseConfig { lambda, ..base };
        let steeper = AdaptiveNoiseConfig { lambda: lambda + 0.05, ..base };
        for k in 0..200 {
            let d = 0.1 * k as f64;
            let r = adapt_measurement_noise(&[d; 4], &cfg)[(0, 0)];
            monotone &= adapt_measurement_noise(&[d + 0.1; 4], &cfg)[(0, 0)] >= r;
            monotone &= adapt_measurement_noise(&[d; 4], &steeper)[(0, 0)] >= r;
        }
    }
    check(
        worst <= 1e-9 && monotone && window_ok,
        format!("max |R - beta*erf(lambda*|d|)| = {worst:.2e} (<= 1e-9); monotone in |d| and lambda: {monotone}"),
    )
}

fn criterion_4() -> Outcome {
    let cfg = occlusion_scene_config();
    let occ = cfg.scripted_occlusions[0];
    let tracker_cfg = TrackerConfig::default();
    let mut details = Vec::new();
    let mut ok = tracker_cfg.lifecycle.max_age == 10 && occ.len == 8;
    for seed in SEEDS {
        let scene = generate(&cfg, seed).expect("scene");
        let mut tracker = Tracker::new(tracker_cfg.clone()).expect("tracker");
        let mut outputs = Vec::new();
        let mut reappear_iou = 0.0;
        for f in &scene.frames {
            outputs.push(tracker.step(&f.detections).expect("step").prompt_boxes());
            if f.index == occ.start + occ.len {
                let truth = f.gt_objects.iter().find(|g| g.object == occ.object).expect("object in view").bbox;
                let before = outputs[occ.start - 1].iter().find(|(_, b)| {
                    iou(b, &scene.frames[occ.start - 1].gt_objects.iter().find(|g| g.object == occ.object).unwrap().bbox) >= 0.3
                });
                if let Some((id, _)) = before {
                    if let Some(t) = tracker.tracks().iter().find(|t| t.id == *id) {
                        reappear_iou = t.prediction.map_or(0.0, |p| iou(&p, &truth));
                    }
                }
            }
        }
        let report = tracking_report(&outputs, &scene);
        let survived = report.occlusion_survival == vec![true];
        ok &= survived && reappear_iou >= 0.3;
        details.push(format!("seed {seed}: id kept {survived}, IoU {reappear_iou:.3}"));
    }
    check(ok, details.join("; "))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let (rows, cols) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let cost: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..1000) as f64).collect()).collect();
        let pairs = linear_assignment(&cost);
        if pairs.len() != rows.min(cols) || assignment_cost(&cost, &pairs) != brute_force_min(&cost) {
            mismatches += 1;
        }
    }
    check(mismatches == 0, format!("{mismatches} of 1000 matrices differ from exhaustive minimum"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(0..=200);
        let candidates = random_candidates(&mut rng, n, 320.0, 240.0);
        let budget = FeatureBudget { n_max: rng.gen_range(1..=150), d_min: rng.gen_range(0.0..30.0) };
        let mut mask = BinaryMask::new(320, 240);
        for _ in 0..rng.gen_range(0..3) {
            mask.fill_box(&BoundingBox::new(rng.gen_range(0.0..320.0), rng.gen_range(0.0..240.0), rng.gen_range(10.0..120.0), rng.gen_range(10.0..120.0)));
        }
        if anms_select(&candidates, &budget, &mask) != anms_oracle(&candidates, budget.n_max, budget.d_min, &mask) {
            mismatches += 1;
        }
    }
    check(mismatches == 0, format!("{mismatches} of 1000 candidate sets differ from brute-force selection"))
}

fn subset(a: &BinaryMask, b: &BinaryMask) -> bool {
    (0..a.height()).all(|y| (0..a.width()).all(|x| !a.at(x, y) || b.at(x, y)))
}

fn union(a: &BinaryMask, b: &BinaryMask) -> BinaryMask {
    BinaryMask::from_fn(a.width(), a.height(), |x, y| a.at(x, y) || b.at(x, y))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut oracle_bad, mut order_bad, mut duality_bad) = (0, 0, 0);
    for _ in 0..200 {
        let m = random_mask(&mut rng);
        let extra = BinaryMask::from_fn(m.width(), m.height(), |_, _| rng.gen_bool(0.1));
        let bigger = union(&m, &extra);
        for r in 0..=4usize {
            let se = StructuringElement::disk(r);
            let (e, d) = (erode(&m, &se), dilate(&m, &se));
            if e != erode_oracle(&m, r as i64) || d != dilate_oracle(&m, r as i64) {
                oracle_bad += 1;
            }
            if !subset(&e, &m) || !subset(&m, &d) || !subset(&e, &erode(&bigger, &se)) || !subset(&d, &dilate(&bigger, &se)) {
                order_bad += 1;
            }
            let dual = dilate(&m.complement(), &se).complement();
            let ri = r as i64;
            for y in ri..m.height() as i64 - ri {
                for x in ri..m.width() as i64 - ri {
                    if e.get(x, y) != dual.get(x, y) {
                        duality_bad += 1;
                    }
                }
            }
        }
    }
    check(
        oracle_bad + order_bad + duality_bad == 0,
        format!("200 masks x r 0..=4: oracle mismatches {oracle_bad}, order violations {order_bad}, interior duality mismatches {duality_bad}"),
    )
}

fn criterion_8() -> Outcome {
    let worst = (0..=800)
        .map(|i| -4.0 + 0.01 * i as f64)
        .map(|x| (erf(x) - erf_oracle(x)).abs())
        .fold(0.0, f64::max);
    check(worst <= 1e-7, format!("max |erf - quadrature| on [-4, 4] step 0.01 = {worst:.2e} (<= 1e-7)"))
}

fn criterion_9(inv: &Invariants) -> Outcome {
    let shown: Vec<&String> = inv.violations.iter().take(3).collect();
    check(
        inv.violations.is_empty(),
        format!("{} frames checked, {} violations {:?}", inv.frames, inv.violations.len(), shown),
    )
}

fn criterion_10(inv: &mut Invariants) -> Outcome {
    let cfg = SceneConfig::preset(DynamicLevel::None);
    let mut identical = 0;
    for seed in SEEDS {
        let scene = generate(&cfg, seed).expect("scene");
        let on = run_checked(&scene, &PipelineConfig::default(), inv);
        let off = run_pipeline(&scene, &PipelineConfig { mask_enabled: false, ..PipelineConfig::default() }).expect("run");
        if trajectory_to_string(&on.estimate) == trajectory_to_string(&off.estimate) {
            identical += 1;
        }
    }
    check(identical == 5, format!("{identical} of 5 static scenes byte-identical with masking on vs off"))
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let scene_path = dir.path().join("scene.txt");
    let mut cfg = SceneConfig::preset(DynamicLevel::Mid);
    cfg.frames = 120;
    save_scene(&generate(&cfg, 9).expect("scene"), &scene_path).expect("save");
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let code = main_with_args(["dynvo", "run", "--scene", scene_path.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
        if code != 0 {
            return Outcome::Fail(format!("run exited with {code}"));
        }
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
            .expect("read dir")
            .map(|e| e.expect("entry").path())
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).expect("read")))
            .collect();
        files.sort();
        outputs.push(files);
    }
    let names: Vec<&str> = outputs[0].iter().map(|f| f.0.as_str()).collect();
    check(outputs[0] == outputs[1] && names.len() == 4, format!("files compared: {names:?}"))
}

fn main() {
    let mut inv = Invariants::default();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "published numbers", Outcome::Substituted("benchmark datasets and neural front end unavailable; replaced by criteria 2-11".into())),
        (2, "ablation direction", criterion_2(&mut inv)),
        (3, "adaptive R exactness", criterion_3()),
        (4, "occlusion survival", criterion_4()),
        (5, "assignment optimality", criterion_5()),
        (6, "ANMS oracle", criterion_6()),
        (7, "morphology oracle", criterion_7()),
        (8, "erf accuracy", criterion_8()),
        (10, "static no-op", criterion_10(&mut inv)),
        (11, "determinism", criterion_11()),
    ];
    let c9 = criterion_9(&inv);
    let mut results = results;
    results.insert(8, (9, "compensation invariants", c9));

    let mut failed = 0;
    for (n, name, outcome) in &results {
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Substituted(d) => ("SUBSTITUTED", d),
        };
        println!("criterion {n:>2} {tag:<11} {name}: {detail}");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
