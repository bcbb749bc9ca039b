use super::{FeatureBudget, Keypoint};
use crate::masking::BinaryMask;

/// Suppression radius of every candidate: the distance to the nearest
/// strictly stronger candidate, or `f64::INFINITY` when none exists.
pub fn suppression_radii(candidates: &[Keypoint]) -> Vec<f64> {
    candidates
        .iter()
        .map(|ki| {
            candidates
                .iter()
                .filter(|kj| kj.response > ki.response)
                .map(|kj| ki.position.distance(&kj.position))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Candidate indices ordered by radius (desc), response (desc), x, y, id (asc).
pub fn rank_candidates(candidates: &[Keypoint], radii: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        let (ka, kb) = (&candidates[a], &candidates[b]);
        radii[b]
            .total_cmp(&radii[a])
            .then_with(|| kb.response.total_cmp(&ka.response))
            .then_with(|| ka.position.x.total_cmp(&kb.position.x))
            .then_with(|| ka.position.y.total_cmp(&kb.position.y))
            .then_with(|| ka.id.cmp(&kb.id))
    });
    order
}

/// Adaptive non-maximal suppression.
///
/// Candidates inside `exclude` are dropped, the rest ranked by suppression
/// radius, the top `n_max` kept, and a greedy pass in rank order discards any
/// point closer than `d_min` to an already kept one.
pub fn anms_select(
    candidates: &[Keypoint],
    budget: &FeatureBudget,
    exclude: &BinaryMask,
) -> Vec<Keypoint> {
    let allowed: Vec<Keypoint> = candidates
        .iter()
        .filter(|k| !exclude.contains(&k.position))
        .copied()
        .collect();
    let radii = suppression_radii(&allowed);
    let ranked = rank_candidates(&allowed, &radii);

    let mut kept: Vec<Keypoint> = Vec::with_capacity(budget.n_max.min(ranked.len()));
    for &i in ranked.iter().take(budget.n_max) {
        let k = allowed[i];
        if kept
            .iter()
            .all(|q| q.position.distance(&k.position) >= budget.d_min)
        {
            kept.push(k);
        }
    }
    kept
}
