//! `key = value` configuration files with `[section]` headers.

use std::path::Path;

use crate::error::{Error, Result};
use crate::features::FeatureBudget;
use crate::masking::SegmenterKind;
use crate::metrics::DEFAULT_CR_EPSILON;
use crate::simulator::{
    parse_path_spec, scenario_noise_burst, scenario_occlusion_crossing, DynamicLevel, SceneConfig,
};
use crate::tracker::{AdaptiveScope, KalmanModel, TrackerConfig};

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEntry {
    pub section: String,
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Splits a configuration file into entries. `#` starts a comment.
pub fn parse_entries(text: &str, path: &str) -> Result<Vec<ConfigEntry>> {
    let mut section = String::new();
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(path, line, "unterminated section header"))?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(path, line, format!("expected `key = value`, found {content:?}")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::parse(path, line, "empty key"));
        }
        entries.push(ConfigEntry {
            section: section.clone(),
            key: key.to_string(),
            value: value.trim().to_string(),
            line,
        });
    }
    Ok(entries)
}

struct Field<'a> {
    entry: &'a ConfigEntry,
    path: &'a str,
}

impl Field<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.path, self.entry.line, msg)
    }

    fn num<T: std::str::FromStr>(&self) -> Result<T> {
        self.entry.value.parse().map_err(|_| {
            self.err(format!(
                "invalid value {:?} for {}",
                self.entry.value, self.entry.key
            ))
        })
    }

    fn flag(&self) -> Result<bool> {
        match self.entry.value.as_str() {
            "true" | "on" | "yes" | "1" => Ok(true),
            "false" | "off" | "no" | "0" => Ok(false),
            v => Err(self.err(format!("expected a boolean for {}, found {v:?}", self.entry.key))),
        }
    }

    fn unknown(&self) -> Error {
        let e = self.entry;
        if e.section.is_empty() {
            self.err(format!("unknown key {:?}", e.key))
        } else {
            self.err(format!("unknown key {:?} in [{}]", e.key, e.section))
        }
    }
}

/// Every tunable of one pipeline run, including the ablation switches.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub tracker: TrackerConfig,
    pub segmenter: SegmenterKind,
    pub flip_prob: f64,
    pub max_speckles: u32,
    pub r_erode: usize,
    pub r_dilate: usize,
    pub budget: FeatureBudget,
    /// Fraction of worst residuals dropped in a second registration pass; 0 disables it.
    pub trim_fraction: f64,
    pub cr_epsilon: f64,
    pub mask_enabled: bool,
    pub adaptive_r_enabled: bool,
    pub compensation_enabled: bool,
    pub sort_enabled: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tracker: TrackerConfig::default(),
            segmenter: SegmenterKind::NoisyOracle,
            flip_prob: 0.1,
            max_speckles: 3,
            r_erode: 2,
            r_dilate: 5,
            budget: FeatureBudget::default(),
            trim_fraction: 0.0,
            cr_epsilon: DEFAULT_CR_EPSILON,
            mask_enabled: true,
            adaptive_r_enabled: true,
            compensation_enabled: true,
            sort_enabled: true,
        }
    }
}

const Q_DEFAULT: [f64; 2] = [1.0, 0.01];
const P0_DEFAULT: [f64; 2] = [10.0, 1000.0];
const R_INIT_DEFAULT: f64 = 10.0;

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.tracker.adaptive.validate()?;
        self.budget.validate()?;
        if self.r_dilate <= self.r_erode {
            return Err(Error::Config(format!(
                "r_dilate ({}) must exceed r_erode ({})",
                self.r_dilate, self.r_erode
            )));
        }
        if !(0.0..1.0).contains(&self.trim_fraction) {
            return Err(Error::Config(format!(
                "trim_fraction must be in [0, 1), got {}",
                self.trim_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.flip_prob) {
            return Err(Error::Config(format!("flip_prob must be in [0, 1], got {}", self.flip_prob)));
        }
        if !(self.cr_epsilon > 0.0) {
            return Err(Error::Config(format!("cr_epsilon must be > 0, got {}", self.cr_epsilon)));
        }
        Ok(())
    }

    /// Parses a pipeline configuration; unset keys keep their defaults.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        let mut q = Q_DEFAULT;
        let mut p0 = P0_DEFAULT;
        let mut r_init = R_INIT_DEFAULT;
        let mut model_touched = false;
        for entry in parse_entries(text, path)? {
            let f = Field { entry: &entry, path };
            let a = &mut cfg.tracker.adaptive;
            let l = &mut cfg.tracker.lifecycle;
            match (entry.section.as_str(), entry.key.as_str()) {
                ("tracker", "lambda") => a.lambda = f.num()?,
                ("tracker", "beta") => a.beta = f.num()?,
                ("tracker", "window") => a.window_len = f.num()?,
                ("tracker", "floor_eps") => a.floor_eps = f.num()?,
                ("tracker", "min_samples") => a.min_samples = f.num()?,
                ("tracker", "scope") => {
                    a.scope = match entry.value.as_str() {
                        "per-track" => AdaptiveScope::PerTrack,
                        "global" => AdaptiveScope::Global,
                        v => return Err(f.err(format!("scope must be per-track or global, found {v:?}"))),
                    }
                }
                ("tracker", "gate_iou") => l.gate_iou = f.num()?,
                ("tracker", "max_age") => l.max_age = f.num()?,
                ("tracker", "min_hits") => l.min_hits = f.num()?,
                ("tracker", "q_position") => (q[0], model_touched) = (f.num()?, true),
                ("tracker", "q_velocity") => (q[1], model_touched) = (f.num()?, true),
                ("tracker", "p0_position") => (p0[0], model_touched) = (f.num()?, true),
                ("tracker", "p0_velocity") => (p0[1], model_touched) = (f.num()?, true),
                ("tracker", "r_init") => (r_init, model_touched) = (f.num()?, true),
                ("mask", "segmenter") => {
                    cfg.segmenter = SegmenterKind::parse(&entry.value)
                        .ok_or_else(|| f.err(format!("unknown segmenter {:?}", entry.value)))?
                }
                ("mask", "flip_prob") => cfg.flip_prob = f.num()?,
                ("mask", "max_speckles") => cfg.max_speckles = f.num()?,
                ("mask", "r_erode") => cfg.r_erode = f.num()?,
                ("mask", "r_dilate") => cfg.r_dilate = f.num()?,
                ("features", "n_max") => cfg.budget.n_max = f.num()?,
                ("features", "d_min") => cfg.budget.d_min = f.num()?,
                ("odometry", "trim_fraction") => cfg.trim_fraction = f.num()?,
                ("metrics", "cr_epsilon") => cfg.cr_epsilon = f.num()?,
                ("ablation", "mask") => cfg.mask_enabled = f.flag()?,
                ("ablation", "adaptive_r") => cfg.adaptive_r_enabled = f.flag()?,
                ("ablation", "compensation") => cfg.compensation_enabled = f.flag()?,
                ("ablation", "sort") => cfg.sort_enabled = f.flag()?,
                _ => return Err(f.unknown()),
            }
        }
        if model_touched {
            cfg.tracker.model = KalmanModel::constant_velocity(
                [q[0], q[0], q[0], q[0], q[1], q[1], q[1], q[1]],
                [p0[0], p0[0], p0[0], p0[0], p0[1], p0[1], p0[1], p0[1]],
                r_init,
            );
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Tracker configuration with the adaptive switch applied.
    pub fn effective_tracker(&self) -> TrackerConfig {
        TrackerConfig {
            adaptive_enabled: self.adaptive_r_enabled,
            ..self.tracker.clone()
        }
    }

    /// Switch settings as `mask,adaptive_r,compensation,sort` on/off flags.
    pub fn switches(&self) -> String {
        let s = |b: bool| if b { "on" } else { "off" };
        format!(
            "mask={} adaptive_r={} compensation={} sort={}",
            s(self.mask_enabled),
            s(self.adaptive_r_enabled),
            s(self.compensation_enabled),
            s(self.sort_enabled)
        )
    }
}

/// Parses a scene description for the `simulate` subcommand.
///
/// A top-level `preset` picks the starting point; `[scene]`, `[camera]`,
/// `[detector]` and `[features]` override fields; `[scenario]` applies the
/// scripted occlusion crossing or a detector noise burst last.
pub fn parse_scene_config(text: &str, path: &str) -> Result<SceneConfig> {
    let entries = parse_entries(text, path)?;
    let mut cfg = SceneConfig::default();
    for e in entries.iter().filter(|e| e.section.is_empty()) {
        let f = Field { entry: e, path };
        match e.key.as_str() {
            "preset" => {
                let level = DynamicLevel::parse(&e.value)
                    .ok_or_else(|| f.err(format!("unknown preset {:?}", e.value)))?;
                cfg = SceneConfig::preset(level);
            }
            _ => return Err(f.unknown()),
        }
    }
    let mut occlusion: Option<usize> = None;
    let mut bursts: Vec<(usize, usize, f64)> = Vec::new();
    for e in entries.iter().filter(|e| !e.section.is_empty()) {
        let f = Field { entry: e, path };
        match (e.section.as_str(), e.key.as_str()) {
            ("scene", "name") => cfg.name = e.value.clone(),
            ("scene", "width") => cfg.viewport.0 = f.num()?,
            ("scene", "height") => cfg.viewport.1 = f.num()?,
            ("scene", "frames") => cfg.frames = f.num()?,
            ("scene", "frame_rate") => cfg.frame_rate = f.num()?,
            ("scene", "px_per_meter") => cfg.px_per_meter = f.num()?,
            ("scene", "landmarks") => cfg.landmark_count = f.num()?,
            ("scene", "landmark_seed") => cfg.landmark_seed = f.num()?,
            ("scene", "object_point_density") => cfg.object_point_density = f.num()?,
            ("scene", "occlusion_threshold") => cfg.occlusion_threshold = f.num()?,
            ("camera", "path") => cfg.camera_path = parse_path_spec(&e.value, path, e.line)?,
            ("detector", "sigma_center") => cfg.detector_noise.sigma_center = f.num()?,
            ("detector", "sigma_size") => cfg.detector_noise.sigma_size = f.num()?,
            ("detector", "p_miss") => cfg.detector_noise.p_miss = f.num()?,
            ("detector", "p_false") => cfg.detector_noise.p_false = f.num()?,
            ("features", "sigma_track") => cfg.feature_noise.sigma_track = f.num()?,
            ("features", "p_loss") => cfg.feature_noise.p_loss = f.num()?,
            ("scenario", "occlusion_frames") => occlusion = Some(f.num()?),
            ("scenario", "noise_burst") => {
                let parts: Vec<&str> = e.value.split_whitespace().collect();
                let bad = || f.err("noise_burst expects `start end factor`");
                if parts.len() != 3 {
                    return Err(bad());
                }
                bursts.push((
                    parts[0].parse().map_err(|_| bad())?,
                    parts[1].parse().map_err(|_| bad())?,
                    parts[2].parse().map_err(|_| bad())?,
                ));
            }
            _ => return Err(f.unknown()),
        }
    }
    if let Some(n) = occlusion {
        cfg = scenario_occlusion_crossing(&cfg, n)?;
    }
    for (start, end, factor) in bursts {
        cfg = scenario_noise_burst(&cfg, start..end, factor)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_scene_config(path: &Path) -> Result<SceneConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scene_config(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(PipelineConfig::parse("", "c").unwrap(), PipelineConfig::default());
    }

    #[test]
    fn sections_and_comments() {
        let text = "# sweep\n[features]\nn_max = 80 # fewer\nd_min=12.5\n[ablation]\nmask = off\n";
        let cfg = PipelineConfig::parse(text, "c").unwrap();
        assert_eq!(cfg.budget.n_max, 80);
        assert_eq!(cfg.budget.d_min, 12.5);
        assert!(!cfg.mask_enabled);
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = PipelineConfig::parse("[features]\nn_max = 3\nnmax = 4\n", "c").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(PipelineConfig::parse("[mask]\nr_erode = 3\nr_dilate = 3\n", "c").is_err());
    }

    #[test]
    fn scene_config_with_scenario() {
        let text = "preset = low\n[scene]\nframes = 120\n[scenario]\nocclusion_frames = 8\nnoise_burst = 10 20 3\n";
        let cfg = parse_scene_config(text, "s").unwrap();
        assert_eq!(cfg.frames, 120);
        assert_eq!(cfg.objects.len(), 2);
        assert_eq!(cfg.scripted_occlusions.len(), 1);
        assert_eq!(cfg.noise_bursts.len(), 1);
        assert!(parse_scene_config("preset = extreme\n", "s").is_err());
    }
}
