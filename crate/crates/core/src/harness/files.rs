//! Trajectory, CSV and SVG artifacts.

use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use super::pipeline::RunResult;
use crate::error::{Error, Result};
use crate::geometry::PoseSE2;
use crate::metrics::{ate_rmse, correct_rate};
use crate::odometry::{Stamped, Trajectory};
use crate::simulator::fmt_real;

fn fixed9(x: f64) -> String {
    let s = format!("{x:.9}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// One TUM line for a planar pose: `t x y 0 0 0 sin(theta/2) cos(theta/2)`.
pub fn tum_line(timestamp: f64, pose: &PoseSE2) -> String {
    let half = 0.5 * pose.theta;
    [timestamp, pose.x, pose.y, 0.0, 0.0, 0.0, half.sin(), half.cos()]
        .iter()
        .map(|v| fixed9(*v))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn trajectory_to_string(traj: &Trajectory) -> String {
    let mut s = String::from("# timestamp tx ty tz qx qy qz qw\n");
    for e in traj.iter() {
        s.push_str(&tum_line(e.timestamp, &e.pose));
        s.push('\n');
    }
    s
}

pub fn write_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    std::fs::write(path, trajectory_to_string(traj)).map_err(|e| Error::io(path, e))
}

pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trajectory(&text, &path.display().to_string())
}

/// Parses TUM lines; the heading is recovered from `(qz, qw)`.
pub fn parse_trajectory(text: &str, path: &str) -> Result<Trajectory> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 8 {
            return Err(Error::parse(
                path,
                line,
                format!("expected 8 fields, found {}", fields.len()),
            ));
        }
        let mut v = [0.0; 8];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| Error::parse(path, line, format!("invalid number {f:?}")))?;
        }
        let timestamp = v[0];
        if let Some(last) = entries.last().map(|e: &Stamped| e.timestamp) {
            if timestamp <= last {
                return Err(Error::parse(
                    path,
                    line,
                    format!("timestamp {timestamp} does not increase (previous {last})"),
                ));
            }
        }
        let theta = 2.0 * v[6].atan2(v[7]);
        entries.push(Stamped {
            timestamp,
            pose: PoseSE2::new(v[1], v[2], theta),
        });
    }
    Trajectory::from_entries(entries)
}

pub const METRICS_HEADER: &str = "scene,seed,mask,adaptive_r,compensation,sort,ate_rmse,ate_mean,ate_median,ate_max,cr,cr_epsilon,mean_iou,id_switches,miss_frames,occlusion_survival,degenerate_frames,contaminated_frames";

pub const DIAGNOSTICS_HEADER: &str = "scene,seed,mask,adaptive_r,compensation,sort,frame,timestamp,detections,prompts,mask_pixels,s,r,s_prime,pruned,lost,cap,added,active,used,contaminated,degenerate,residual_rms,r_x,r_y,r_w,r_h";

fn switch_columns(switches: &str) -> String {
    switches
        .split_whitespace()
        .map(|kv| kv.split_once('=').map_or(kv, |(_, v)| v))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn metrics_row(result: &RunResult) -> String {
    let survival = if result.tracking.occlusion_survival.is_empty() {
        "none".to_string()
    } else {
        result
            .tracking
            .occlusion_survival
            .iter()
            .map(|b| if *b { "1" } else { "0" })
            .collect::<Vec<_>>()
            .join(";")
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        result.scene_name,
        result.seed,
        switch_columns(&result.switches),
        fmt_real(result.ate.rmse),
        fmt_real(result.ate.mean),
        fmt_real(result.ate.median),
        fmt_real(result.ate.max),
        fmt_real(result.cr.correct_rate),
        fmt_real(result.cr.epsilon),
        fmt_real(result.tracking.mean_iou_vs_gt),
        result.tracking.id_switches,
        result.tracking.miss_frames,
        survival,
        result.degenerate_frames(),
        result.contaminated_frames(),
    )
}

pub fn diagnostics_rows(result: &RunResult) -> Vec<String> {
    let prefix = format!("{},{},{}", result.scene_name, result.seed, switch_columns(&result.switches));
    result
        .diagnostics
        .iter()
        .map(|d| {
            let r = match d.mean_r {
                Some(r) => r.iter().map(|v| fmt_real(*v)).collect::<Vec<_>>().join(","),
                None => ",,,".to_string(),
            };
            format!(
                "{prefix},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                d.frame,
                fmt_real(d.timestamp),
                d.detections,
                d.prompts,
                d.mask_pixels,
                d.s,
                d.r,
                d.s_prime,
                d.pruned,
                d.lost,
                d.cap,
                d.added,
                d.active,
                d.used,
                d.contaminated,
                u8::from(d.degenerate),
                fmt_real(d.residual_rms),
                r
            )
        })
        .collect()
}

/// Appends `rows` to a CSV file, writing `header` first if the file is new or empty.
pub fn append_csv(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    let needs_header = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let mut text = String::new();
    if needs_header {
        text.push_str(header);
        text.push('\n');
    }
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Short tag naming the disabled stages, `full` when none are.
pub fn run_tag(switches: &str) -> String {
    let off: Vec<&str> = switches
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .filter(|(_, v)| *v == "off")
        .map(|(k, _)| k)
        .collect();
    if off.is_empty() {
        "full".into()
    } else {
        off.iter().map(|k| format!("no-{}", k.replace('_', "-"))).collect::<Vec<_>>().join("+")
    }
}

/// Files written by [`write_run`].
#[derive(Debug, Clone)]
pub struct RunFiles {
    pub estimate: PathBuf,
    pub ground_truth: PathBuf,
    pub metrics: PathBuf,
    pub diagnostics: PathBuf,
    pub svg: Option<PathBuf>,
}

/// Writes both trajectories, rescores them as read back, then appends to
/// `metrics.csv` and `diagnostics.csv` in `dir`.
pub fn write_run(result: &RunResult, dir: &Path, svg: bool) -> Result<RunFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = format!("{}-s{}", result.scene_name, result.seed);
    let tag = run_tag(&result.switches);
    let estimate = dir.join(format!("{stem}-{tag}.tum"));
    let ground_truth = dir.join(format!("{stem}-gt.tum"));
    write_trajectory(&result.estimate, &estimate)?;
    write_trajectory(&result.ground_truth, &ground_truth)?;
    // Score the files as written so `eval` on them reproduces these numbers.
    let mut scored = result.clone();
    scored.estimate = read_trajectory(&estimate)?;
    scored.ground_truth = read_trajectory(&ground_truth)?;
    scored.ate = ate_rmse(&scored.estimate, &scored.ground_truth)?;
    scored.cr = correct_rate(&scored.estimate, &scored.ground_truth, result.cr.epsilon);
    let files = write_metrics(&scored, dir, svg)?;
    Ok(RunFiles { estimate, ground_truth, ..files })
}

/// Appends the run's row to `metrics.csv`, its frames to `diagnostics.csv`
/// and, with `svg`, plots per-frame ATE to `ate.svg`.
pub fn write_metrics(result: &RunResult, dir: &Path, svg: bool) -> Result<RunFiles> {
    let metrics = dir.join("metrics.csv");
    let diagnostics = dir.join("diagnostics.csv");
    append_csv(&metrics, METRICS_HEADER, &[metrics_row(result)])?;
    append_csv(&diagnostics, DIAGNOSTICS_HEADER, &diagnostics_rows(result))?;
    let svg = if svg {
        let path = dir.join("ate.svg");
        let series: Vec<(f64, f64)> = result
            .ate
            .timestamps
            .iter()
            .copied()
            .zip(result.ate.per_frame_errors.iter().copied())
            .collect();
        let title = format!("{} seed {} ({})", result.scene_name, result.seed, run_tag(&result.switches));
        std::fs::write(&path, line_plot_svg(&title, "time [s]", "ATE [m]", &series))
            .map_err(|e| Error::io(&path, e))?;
        Some(path)
    } else {
        None
    };
    Ok(RunFiles {
        estimate: PathBuf::new(),
        ground_truth: PathBuf::new(),
        metrics,
        diagnostics,
        svg,
    })
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 360.0;
const MARGIN: f64 = 50.0;

fn svg_header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        SVG_W / 2.0,
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn line_plot_svg(title: &str, x_label: &str, y_label: &str, series: &[(f64, f64)]) -> String {
    let mut s = svg_header(title);
    let (x0, x1) = series.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let y1 = series.iter().map(|p| p.1).fold(0.0, f64::max);
    let (x0, x1) = if x0.is_finite() && x1 > x0 { (x0, x1) } else { (0.0, 1.0) };
    let y1 = if y1 > 0.0 { y1 } else { 1.0 };
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (SVG_W - 2.0 * MARGIN);
    let py = |y: f64| SVG_H - MARGIN - y / y1 * (SVG_H - 2.0 * MARGIN);
    let _ = writeln!(
        s,
        "<polyline fill=\"none\" stroke=\"black\" points=\"{},{} {},{} {},{}\"/>",
        MARGIN,
        MARGIN,
        MARGIN,
        SVG_H - MARGIN,
        SVG_W - MARGIN,
        SVG_H - MARGIN
    );
    let points: Vec<String> = series.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
    let _ = writeln!(
        s,
        "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"{}\"/>",
        points.join(" ")
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        SVG_W / 2.0,
        SVG_H - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        "<text x=\"14\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">{}</text>",
        SVG_H / 2.0,
        SVG_H / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{:.4}</text>",
        MARGIN - 4.0,
        MARGIN + 4.0,
        y1
    );
    s.push_str("</svg>\n");
    s
}

pub fn bar_chart_svg(title: &str, y_label: &str, bars: &[(String, f64)]) -> String {
    let mut s = svg_header(title);
    let top = bars.iter().map(|b| b.1).fold(0.0, f64::max);
    let top = if top > 0.0 { top } else { 1.0 };
    let slot = (SVG_W - 2.0 * MARGIN) / bars.len().max(1) as f64;
    for (i, (label, v)) in bars.iter().enumerate() {
        let h = v / top * (SVG_H - 2.0 * MARGIN);
        let x = MARGIN + i as f64 * slot + 0.15 * slot;
        let _ = writeln!(
            s,
            "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{h:.2}\" fill=\"#1f77b4\"/>",
            SVG_H - MARGIN - h,
            0.7 * slot
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"middle\">{}</text>",
            x + 0.35 * slot,
            SVG_H - MARGIN + 14.0,
            escape(label)
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"middle\">{v:.4}</text>",
            x + 0.35 * slot,
            SVG_H - MARGIN - h - 4.0
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"14\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">{}</text>",
        SVG_H / 2.0,
        SVG_H / 2.0,
        escape(y_label)
    );
    s.push_str("</svg>\n");
    s
}

/// One aggregated line of `report`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportGroup {
    pub scene: String,
    pub tag: String,
    pub runs: usize,
    pub median_ate: f64,
    pub mean_cr: f64,
    pub degenerate_frames: usize,
    pub contaminated_frames: usize,
}

/// Groups `metrics.csv` rows by scene and switch setting.
pub fn summarize_metrics(path: &Path) -> Result<Vec<ReportGroup>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == METRICS_HEADER => {}
        _ => return Err(Error::parse(&name, 1, "missing metrics header")),
    }
    let columns = METRICS_HEADER.split(',').count();
    let mut groups: Vec<(ReportGroup, Vec<f64>)> = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != columns {
            return Err(Error::parse(&name, i + 1, format!("expected {columns} columns, found {}", f.len())));
        }
        let num = |j: usize| -> Result<f64> {
            f[j].parse().map_err(|_| Error::parse(&name, i + 1, format!("invalid number {:?}", f[j])))
        };
        let count = |j: usize| -> Result<usize> {
            f[j].parse().map_err(|_| Error::parse(&name, i + 1, format!("invalid count {:?}", f[j])))
        };
        let switches = format!("mask={} adaptive_r={} compensation={} sort={}", f[2], f[3], f[4], f[5]);
        let tag = run_tag(&switches);
        let (ate, cr) = (num(6)?, num(10)?);
        let (deg, con) = (count(16)?, count(17)?);
        match groups.iter_mut().find(|(g, _)| g.scene == f[0] && g.tag == tag) {
            Some((g, ates)) => {
                g.runs += 1;
                g.mean_cr += cr;
                g.degenerate_frames += deg;
                g.contaminated_frames += con;
                ates.push(ate);
            }
            None => groups.push((
                ReportGroup {
                    scene: f[0].to_string(),
                    tag,
                    runs: 1,
                    median_ate: 0.0,
                    mean_cr: cr,
                    degenerate_frames: deg,
                    contaminated_frames: con,
                },
                vec![ate],
            )),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(mut g, mut ates)| {
            ates.sort_by(f64::total_cmp);
            let n = ates.len();
            g.median_ate = if n % 2 == 1 { ates[n / 2] } else { 0.5 * (ates[n / 2 - 1] + ates[n / 2]) };
            g.mean_cr /= g.runs as f64;
            g
        })
        .collect())
}
