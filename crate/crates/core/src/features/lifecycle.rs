use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{anms_select, FeatureBudget, Keypoint};
use crate::masking::BinaryMask;
use crate::simulator::{stream, FrameRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedFeature {
    pub keypoint: Keypoint,
    /// Frames survived since extraction.
    pub age: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureSet {
    pub active: Vec<TrackedFeature>,
}

impl FeatureSet {
    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.active.iter().map(|f| f.keypoint.id)
    }
}

/// Simulated optical-flow error model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackNoise {
    pub sigma: f64,
    pub p_loss: f64,
    pub seed: u64,
}

/// Moves every active feature to its true position in `frame` plus Gaussian
/// noise, or drops it. Features whose point is no longer visible are lost.
///
/// Draws come from a stream keyed by `(frame, feature id)`, so the outcome
/// for one feature does not depend on which others are active.
pub fn propagate(
    features: &FeatureSet,
    frame: &FrameRecord,
    noise: &TrackNoise,
) -> (Vec<TrackedFeature>, usize) {
    let mut matched = Vec::with_capacity(features.len());
    for f in &features.active {
        let Some(truth) = frame.true_position(f.keypoint.id) else {
            continue;
        };
        let mut rng = stream(noise.seed, "feature-track", frame.index as u64, f.keypoint.id);
        if rng.gen_bool(noise.p_loss) {
            continue;
        }
        let dx: f64 = StandardNormal.sample(&mut rng);
        let dy: f64 = StandardNormal.sample(&mut rng);
        let mut kp = f.keypoint;
        kp.position.x = truth.x + noise.sigma * dx;
        kp.position.y = truth.y + noise.sigma * dy;
        matched.push(TrackedFeature { keypoint: kp, age: f.age + 1 });
    }
    let lost = features.len() - matched.len();
    (matched, lost)
}

/// Splits off features that fall inside the dynamic mask; returns the
/// survivors and the rejected count.
pub fn reject_dynamic(matched: Vec<TrackedFeature>, mask: &BinaryMask) -> (Vec<TrackedFeature>, usize) {
    let before = matched.len();
    let survivors: Vec<TrackedFeature> = matched
        .into_iter()
        .filter(|f| !mask.contains(&f.keypoint.position))
        .collect();
    let r = before - survivors.len();
    (survivors, r)
}

/// Drops tracked features that drifted closer than `d_min` to an older (or
/// stronger) one. Returns the kept features and the pruned count.
pub fn enforce_spacing(mut features: Vec<TrackedFeature>, d_min: f64) -> (Vec<TrackedFeature>, usize) {
    features.sort_by(|a, b| {
        b.age
            .cmp(&a.age)
            .then(b.keypoint.response.total_cmp(&a.keypoint.response))
            .then(a.keypoint.id.cmp(&b.keypoint.id))
    });
    let before = features.len();
    let mut kept: Vec<TrackedFeature> = Vec::with_capacity(before);
    for f in features {
        if kept
            .iter()
            .all(|k| k.keypoint.position.distance(&f.keypoint.position) >= d_min)
        {
            kept.push(f);
        }
    }
    let pruned = before - kept.len();
    (kept, pruned)
}

/// Extraction cap `n_max - s + r`, saturating at zero.
pub fn compensation_cap(n_max: usize, s: usize, r: usize) -> usize {
    (n_max + r).saturating_sub(s)
}

/// Adds up to `cap` new features chosen by ANMS from `candidates` that lie
/// outside `mask`, are not already tracked and keep `d_min` from every
/// survivor. Survivors are always retained; the result never exceeds
/// `budget.n_max`.
pub fn replenish(
    survivors: Vec<TrackedFeature>,
    candidates: &[Keypoint],
    budget: &FeatureBudget,
    mask: &BinaryMask,
    cap: usize,
) -> FeatureSet {
    let room = budget.n_max.saturating_sub(survivors.len());
    let cap = cap.min(room);
    let mut active = survivors;
    if cap == 0 {
        return FeatureSet { active };
    }
    let mut taken: Vec<u64> = active.iter().map(|f| f.keypoint.id).collect();
    taken.sort_unstable();
    let pool: Vec<Keypoint> = candidates
        .iter()
        .filter(|c| taken.binary_search(&c.id).is_err())
        .filter(|c| {
            active
                .iter()
                .all(|f| f.keypoint.position.distance(&c.position) >= budget.d_min)
        })
        .copied()
        .collect();
    let limited = FeatureBudget { n_max: cap, d_min: budget.d_min };
    active.extend(
        anms_select(&pool, &limited, mask)
            .into_iter()
            .map(|keypoint| TrackedFeature { keypoint, age: 0 }),
    );
    FeatureSet { active }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Origin;
    use crate::geometry::{PoseSE2, Point2};

    fn feature(id: u64, x: f64, y: f64, age: usize) -> TrackedFeature {
        TrackedFeature {
            keypoint: Keypoint {
                id,
                position: Point2::new(x, y),
                response: 0.5,
                origin: Origin::Static(id),
            },
            age,
        }
    }

    fn frame_with(points: &[(u64, f64, f64)]) -> FrameRecord {
        FrameRecord {
            index: 3,
            timestamp: 0.0,
            camera_pose: PoseSE2::IDENTITY,
            gt_objects: vec![],
            detections: vec![],
            candidates: vec![],
            correspondence: points.iter().map(|&(id, x, y)| (id, Point2::new(x, y))).collect(),
        }
    }

    #[test]
    fn cap_example() {
        assert_eq!(compensation_cap(100, 60, 10), 50);
        assert_eq!(compensation_cap(100, 100, 0), 0);
        assert_eq!(compensation_cap(10, 30, 0), 0);
    }

    #[test]
    fn noiseless_propagation_is_exact() {
        let set = FeatureSet { active: vec![feature(1, 0.0, 0.0, 2), feature(2, 5.0, 5.0, 0)] };
        let frame = frame_with(&[(1, 10.0, 11.0), (2, 20.0, 21.0)]);
        let noise = TrackNoise { sigma: 0.0, p_loss: 0.0, seed: 9 };
        let (m, lost) = propagate(&set, &frame, &noise);
        assert_eq!(lost, 0);
        assert_eq!(m[0].keypoint.position, Point2::new(10.0, 11.0));
        assert_eq!(m[0].age, 3);
        assert_eq!(m[1].keypoint.position, Point2::new(20.0, 21.0));

        let all_lost = TrackNoise { p_loss: 1.0, ..noise };
        let (m, lost) = propagate(&set, &frame, &all_lost);
        assert!(m.is_empty());
        assert_eq!(lost, 2);
    }

    #[test]
    fn invisible_points_are_lost() {
        let set = FeatureSet { active: vec![feature(1, 0.0, 0.0, 0), feature(7, 5.0, 5.0, 0)] };
        let frame = frame_with(&[(1, 1.0, 1.0)]);
        let noise = TrackNoise { sigma: 0.0, p_loss: 0.0, seed: 0 };
        let (m, lost) = propagate(&set, &frame, &noise);
        assert_eq!((m.len(), lost), (1, 1));
    }

    #[test]
    fn rejection_counts() {
        let matched = vec![feature(1, 2.0, 2.0, 0), feature(2, 8.0, 8.0, 0)];
        let mut mask = BinaryMask::new(10, 10);
        let (s, r) = reject_dynamic(matched.clone(), &mask);
        assert_eq!((s.len(), r), (2, 0));
        mask.set(2, 2, true);
        let (s, r) = reject_dynamic(matched.clone(), &mask);
        assert_eq!((s.len(), r), (1, 1));
        assert_eq!(s[0].keypoint.id, 2);
        let (s, r) = reject_dynamic(matched, &mask.complement());
        assert_eq!((s.len(), r), (1, 1));
    }

    #[test]
    fn spacing_keeps_older_feature() {
        let (kept, pruned) =
            enforce_spacing(vec![feature(1, 0.0, 0.0, 1), feature(2, 3.0, 0.0, 5)], 10.0);
        assert_eq!(pruned, 1);
        assert_eq!(kept[0].keypoint.id, 2);
    }

    #[test]
    fn replenish_respects_survivors_and_cap() {
        let survivors = vec![feature(1, 50.0, 50.0, 4)];
        let candidates: Vec<Keypoint> = (0..20)
            .map(|i| Keypoint {
                id: 100 + i,
                position: Point2::new(5.0 + 30.0 * (i % 5) as f64, 5.0 + 30.0 * (i / 5) as f64),
                response: 0.1 + 0.01 * i as f64,
                origin: Origin::Static(100 + i),
            })
            .collect();
        let budget = FeatureBudget { n_max: 6, d_min: 20.0 };
        let mask = BinaryMask::new(200, 200);
        let set = replenish(survivors.clone(), &candidates, &budget, &mask, 100);
        assert_eq!(set.len(), 6);
        assert_eq!(set.active[0], survivors[0]);
        for (i, a) in set.active.iter().enumerate() {
            for b in &set.active[i + 1..] {
                assert!(a.keypoint.position.distance(&b.keypoint.position) >= 20.0);
            }
        }
        let none = replenish(survivors, &candidates, &budget, &mask, 0);
        assert_eq!(none.len(), 1);
    }
}
