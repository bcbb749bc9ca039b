//! Static-feature management: ANMS selection, simulated tracking,
//! rejection of points inside the dynamic mask and budget compensation.

mod anms;
mod lifecycle;

pub use anms::{anms_select, rank_candidates, suppression_radii};
pub use lifecycle::{
    compensation_cap, enforce_spacing, propagate, reject_dynamic, replenish, FeatureSet,
    TrackNoise, TrackedFeature,
};

use crate::geometry::Point2;

/// Ground-truth provenance of a keypoint; only evaluation code may look at it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    /// Static landmark with this id.
    Static(u64),
    /// Surface point of the moving object with this index.
    Dynamic(usize),
}

impl Origin {
    pub fn is_dynamic(&self) -> bool {
        matches!(self, Origin::Dynamic(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub id: u64,
    pub position: Point2,
    pub response: f64,
    pub origin: Origin,
}

/// Maximum feature count and minimum pairwise spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureBudget {
    pub n_max: usize,
    pub d_min: f64,
}

impl Default for FeatureBudget {
    fn default() -> Self {
        Self {
            n_max: 150,
            d_min: 20.0,
        }
    }
}

impl FeatureBudget {
    pub fn validate(&self) -> crate::Result<()> {
        if self.n_max == 0 {
            return Err(crate::Error::Config("n_max must be >= 1".into()));
        }
        if !(self.d_min >= 0.0 && self.d_min.is_finite()) {
            return Err(crate::Error::Config(format!(
                "d_min must be finite and >= 0, got {}",
                self.d_min
            )));
        }
        Ok(())
    }
}
