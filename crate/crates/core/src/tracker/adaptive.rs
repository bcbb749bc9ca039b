use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::geometry::erf;

/// Whether each track owns its residual window or all tracks share one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdaptiveScope {
    #[default]
    PerTrack,
    Global,
}

/// Parameters of `R = diag(max(beta * erf(lambda * rmse), floor_eps))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveNoiseConfig {
    /// Steepness, 1/px.
    pub lambda: f64,
    /// Saturation magnitude, px^2.
    pub beta: f64,
    /// Sliding window length in frames.
    pub window_len: usize,
    /// Lower bound on every diagonal entry, px^2.
    pub floor_eps: f64,
    /// Residuals required before the adapted matrix replaces `R_init`.
    pub min_samples: usize,
    pub scope: AdaptiveScope,
}

impl Default for AdaptiveNoiseConfig {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            beta: 10.0,
            window_len: 10,
            floor_eps: 1e-3,
            min_samples: 3,
            scope: AdaptiveScope::PerTrack,
        }
    }
}

impl AdaptiveNoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be > 0, got {}", self.lambda)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Config(format!("beta must be > 0, got {}", self.beta)));
        }
        if self.window_len == 0 {
            return Err(Error::Config("window length must be >= 1".into()));
        }
        if !(self.floor_eps > 0.0) {
            return Err(Error::Config(format!(
                "floor_eps must be > 0, got {}",
                self.floor_eps
            )));
        }
        if self.min_samples == 0 || self.min_samples > self.window_len {
            return Err(Error::Config(format!(
                "min_samples must be in [1, {}], got {}",
                self.window_len, self.min_samples
            )));
        }
        Ok(())
    }
}

/// Component-wise root mean square over a window of `(dx, dy, dw, dh)` residuals.
pub fn residual_rmse<'a, I>(window: I) -> Result<[f64; 4]>
where
    I: IntoIterator<Item = &'a [f64; 4]>,
{
    let mut acc = [0.0; 4];
    let mut n = 0usize;
    for r in window {
        for (a, v) in acc.iter_mut().zip(r) {
            *a += v * v;
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::InsufficientData(
            "residual window is empty".into(),
        ));
    }
    Ok(acc.map(|s| (s / n as f64).sqrt()))
}

/// Diagonal measurement-noise covariance from windowed residual RMSE.
///
/// Entries lie in `[floor_eps, beta)`: once `erf` saturates in double
/// precision the value is held one ulp below `beta`.
pub fn adapt_measurement_noise(delta_rmse: &[f64; 4], cfg: &AdaptiveNoiseConfig) -> Matrix4<f64> {
    let ceiling = f64::from_bits(cfg.beta.to_bits() - 1);
    let d = delta_rmse.map(|r| (cfg.beta * erf(cfg.lambda * r)).min(ceiling).max(cfg.floor_eps));
    Matrix4::from_diagonal(&d.into())
}
