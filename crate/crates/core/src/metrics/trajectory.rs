use crate::error::{Error, Result};
use crate::geometry::{Point2, PoseSE2};
use crate::odometry::{fit_rigid, Trajectory};

/// Position threshold for [`correct_rate`] at simulator scale, meters.
pub const DEFAULT_CR_EPSILON: f64 = 0.1;

/// Map applied to estimated positions: `p -> scale * R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    pub transform: PoseSE2,
    pub scale: f64,
}

impl Alignment {
    pub const IDENTITY: Alignment = Alignment {
        transform: PoseSE2::IDENTITY,
        scale: 1.0,
    };

    pub fn apply(&self, p: &Point2) -> Point2 {
        let (s, c) = self.transform.theta.sin_cos();
        Point2::new(
            self.transform.x + self.scale * (c * p.x - s * p.y),
            self.transform.y + self.scale * (s * p.x + c * p.y),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AteReport {
    pub rmse: f64,
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    /// Error at each associated ground-truth stamp, in ground-truth order.
    pub per_frame_errors: Vec<f64>,
    /// Ground-truth timestamps matching `per_frame_errors`.
    pub timestamps: Vec<f64>,
    pub alignment: Alignment,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrReport {
    pub correct_rate: f64,
    pub epsilon: f64,
    pub correct: usize,
    pub total: usize,
}

/// Pairs each ground-truth entry with the nearest estimated stamp lying
/// within half the median ground-truth period. Returns `(est, gt)` index
/// pairs in ground-truth order.
pub fn associate_timestamps(est: &Trajectory, gt: &Trajectory) -> Vec<(usize, usize)> {
    let e = est.entries();
    let g = gt.entries();
    if e.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let tolerance = if g.len() >= 2 {
        let mut periods: Vec<f64> = g.windows(2).map(|w| w[1].timestamp - w[0].timestamp).collect();
        0.5 * median(&mut periods)
    } else {
        0.0
    };
    let mut pairs = Vec::new();
    for (gi, gs) in g.iter().enumerate() {
        let t = gs.timestamp;
        let pos = e.partition_point(|s| s.timestamp < t);
        let best = [pos.checked_sub(1), (pos < e.len()).then_some(pos)]
            .into_iter()
            .flatten()
            .min_by(|&a, &b| {
                (e[a].timestamp - t)
                    .abs()
                    .total_cmp(&(e[b].timestamp - t).abs())
            });
        if let Some(ei) = best {
            if (e[ei].timestamp - t).abs() <= tolerance {
                pairs.push((ei, gi));
            }
        }
    }
    pairs
}

/// Least-squares rigid (or similarity) map taking estimated positions onto
/// ground truth over time-associated pairs.
pub fn align_umeyama(est: &Trajectory, gt: &Trajectory, with_scale: bool) -> Result<Alignment> {
    let pairs = position_pairs(est, gt);
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "alignment needs 2 associated poses, found {}",
            pairs.len()
        )));
    }
    let (transform, scale) = fit_rigid(&pairs, with_scale)?;
    Ok(Alignment { transform, scale })
}

fn position_pairs(est: &Trajectory, gt: &Trajectory) -> Vec<(Point2, Point2)> {
    let (e, g) = (est.entries(), gt.entries());
    associate_timestamps(est, gt)
        .into_iter()
        .map(|(ei, gi)| (e[ei].pose.translation(), g[gi].pose.translation()))
        .collect()
}

/// Absolute trajectory error after rigid alignment.
pub fn ate_rmse(est: &Trajectory, gt: &Trajectory) -> Result<AteReport> {
    ate(est, gt, false)
}

/// Absolute trajectory error; `with_scale` selects similarity alignment.
pub fn ate(est: &Trajectory, gt: &Trajectory, with_scale: bool) -> Result<AteReport> {
    let alignment = align_umeyama(est, gt, with_scale)?;
    let (e, g) = (est.entries(), gt.entries());
    let assoc = associate_timestamps(est, gt);
    let per_frame_errors: Vec<f64> = assoc
        .iter()
        .map(|&(ei, gi)| {
            alignment
                .apply(&e[ei].pose.translation())
                .distance(&g[gi].pose.translation())
        })
        .collect();
    let timestamps = assoc.iter().map(|&(_, gi)| g[gi].timestamp).collect();
    let n = per_frame_errors.len() as f64;
    let rmse = (per_frame_errors.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
    let mean = per_frame_errors.iter().sum::<f64>() / n;
    let max = per_frame_errors.iter().copied().fold(0.0, f64::max);
    let median = median(&mut per_frame_errors.clone());
    Ok(AteReport {
        rmse,
        mean,
        median,
        max,
        per_frame_errors,
        timestamps,
        alignment,
    })
}

/// Fraction of ground-truth stamps whose associated estimate lies within
/// `epsilon` of the truth after rigid alignment. Stamps without an estimate
/// count as incorrect. When no alignment can be fitted the estimate is
/// compared unaligned.
pub fn correct_rate(est: &Trajectory, gt: &Trajectory, epsilon: f64) -> CrReport {
    let total = gt.len();
    let alignment = align_umeyama(est, gt, false).unwrap_or(Alignment::IDENTITY);
    let (e, g) = (est.entries(), gt.entries());
    let correct = associate_timestamps(est, gt)
        .into_iter()
        .filter(|&(ei, gi)| {
            alignment
                .apply(&e[ei].pose.translation())
                .distance(&g[gi].pose.translation())
                <= epsilon
        })
        .count();
    CrReport {
        correct_rate: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        epsilon,
        correct,
        total,
    }
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
