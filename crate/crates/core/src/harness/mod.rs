//! End-to-end runs, configuration files, artifacts and the command line.

pub mod cli;
mod config;
mod files;
mod pipeline;

pub use config::{
    load_scene_config, parse_entries, parse_scene_config, ConfigEntry, PipelineConfig,
};
pub use files::{
    append_csv, bar_chart_svg, diagnostics_rows, line_plot_svg, metrics_row, parse_trajectory,
    read_trajectory, run_tag, summarize_metrics, trajectory_to_string, tum_line, write_metrics,
    write_run, write_trajectory, ReportGroup, RunFiles, DIAGNOSTICS_HEADER, METRICS_HEADER,
};
pub use pipeline::{run_pipeline, run_pipeline_with, FrameDiagnostics, FrameView, RunResult};
