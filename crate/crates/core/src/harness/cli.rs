//! Command-line front end shared by the `dynvo` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{load_scene_config, PipelineConfig};
use super::files::{bar_chart_svg, read_trajectory, summarize_metrics, write_run};
use super::pipeline::{run_pipeline, run_pipeline_with};
use crate::error::Error;
use crate::masking::write_pbm;
use crate::metrics::{ate, correct_rate, DEFAULT_CR_EPSILON};
use crate::simulator::{fmt_real, generate, load_scene, save_scene};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dynvo", version, about = "Dynamic-object-robust planar visual odometry on synthetic scenes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a scene file from a scene configuration.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the pipeline on a scene and write trajectories and metrics.
    Run(RunArgs),
    /// Score an estimated TUM trajectory against ground truth.
    Eval {
        #[arg(long)]
        est: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Similarity instead of rigid alignment.
        #[arg(long)]
        scale: bool,
        #[arg(long, default_value_t = DEFAULT_CR_EPSILON)]
        epsilon: f64,
    },
    /// Summarise the metrics.csv in a run directory.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        svg: bool,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scene: PathBuf,
    /// Pipeline configuration; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub no_mask: bool,
    #[arg(long)]
    pub no_adaptive_r: bool,
    #[arg(long)]
    pub no_compensation: bool,
    #[arg(long)]
    pub no_sort: bool,
    #[arg(long)]
    pub svg: bool,
    /// Write each frame's dynamic mask as PBM under `<out-dir>/masks`.
    #[arg(long)]
    pub dump_masks: bool,
}

/// Exit status for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Version { .. } | Error::Timestamp { .. } | Error::Io { .. } => EXIT_PARSE,
        Error::InsufficientData(_) | Error::DegenerateGeometry(_) | Error::Singular(_) => EXIT_NUMERICAL,
        Error::Config(_) | Error::DimensionMismatch { .. } => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: Command) -> crate::Result<()> {
    match command {
        Command::Simulate { config, seed, out } => {
            let cfg = load_scene_config(&config)?;
            let scene = generate(&cfg, seed)?;
            save_scene(&scene, &out)?;
            log::info!("wrote {} frames to {}", scene.frames.len(), out.display());
        }
        Command::Run(args) => {
            let scene = load_scene(&args.scene)?;
            let mut cfg = match &args.config {
                Some(p) => PipelineConfig::load(p)?,
                None => PipelineConfig::default(),
            };
            cfg.mask_enabled &= !args.no_mask;
            cfg.adaptive_r_enabled &= !args.no_adaptive_r;
            cfg.compensation_enabled &= !args.no_compensation;
            cfg.sort_enabled &= !args.no_sort;
            let result = if args.dump_masks {
                let dir = args.out_dir.join("masks");
                std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                let mut failure = None;
                let result = run_pipeline_with(&scene, &cfg, |view| {
                    if failure.is_none() {
                        let path = dir.join(format!("mask-{:05}.pbm", view.frame));
                        failure = write_pbm(view.mask, &path).err();
                    }
                })?;
                if let Some(e) = failure {
                    return Err(e);
                }
                result
            } else {
                run_pipeline(&scene, &cfg)?
            };
            let files = write_run(&result, &args.out_dir, args.svg)?;
            let est = read_trajectory(&files.estimate)?;
            let gt = read_trajectory(&files.ground_truth)?;
            let report = ate(&est, &gt, false)?;
            let cr = correct_rate(&est, &gt, cfg.cr_epsilon);
            println!(
                "scene={} seed={} {} ate_rmse={} cr={} degenerate_frames={}",
                result.scene_name,
                result.seed,
                result.switches,
                fmt_real(report.rmse),
                fmt_real(cr.correct_rate),
                result.degenerate_frames()
            );
        }
        Command::Eval { est, gt, scale, epsilon } => {
            if !(epsilon > 0.0) {
                return Err(Error::Config(format!("epsilon must be > 0, got {epsilon}")));
            }
            let est = read_trajectory(&est)?;
            let gt = read_trajectory(&gt)?;
            let report = ate(&est, &gt, scale)?;
            let cr = correct_rate(&est, &gt, epsilon);
            println!("ate_rmse={}", fmt_real(report.rmse));
            println!("ate_mean={}", fmt_real(report.mean));
            println!("ate_median={}", fmt_real(report.median));
            println!("ate_max={}", fmt_real(report.max));
            println!("scale={}", fmt_real(report.alignment.scale));
            println!("cr={} epsilon={} ({} of {} stamps)", fmt_real(cr.correct_rate), fmt_real(epsilon), cr.correct, cr.total);
        }
        Command::Report { input, svg } => {
            let groups = summarize_metrics(&input.join("metrics.csv"))?;
            println!("{:<16} {:<28} {:>4} {:>12} {:>8} {:>10} {:>12}", "scene", "config", "runs", "median_ate", "mean_cr", "degenerate", "contaminated");
            for g in &groups {
                println!(
                    "{:<16} {:<28} {:>4} {:>12.6} {:>8.4} {:>10} {:>12}",
                    g.scene, g.tag, g.runs, g.median_ate, g.mean_cr, g.degenerate_frames, g.contaminated_frames
                );
            }
            println!("cr: fraction of ground-truth stamps with aligned position error <= epsilon (declared stand-in definition)");
            if svg {
                let bars: Vec<(String, f64)> =
                    groups.iter().map(|g| (format!("{} {}", g.scene, g.tag), g.median_ate)).collect();
                let path = input.join("summary.svg");
                std::fs::write(&path, bar_chart_svg("median ATE RMSE", "ATE [m]", &bars))
                    .map_err(|e| Error::io(&path, e))?;
            }
        }
    }
    Ok(())
}
