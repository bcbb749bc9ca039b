use crate::geometry::{iou, BoundingBox};

/// Cost given to gated-out pairs. Larger than any achievable sum of real
/// costs (each in `[0, 1]`) so the solver only uses one when forced to.
const FORBIDDEN: f64 = 1e6;

/// Minimum-cost assignment on a rectangular cost matrix (Hungarian method,
/// shortest augmenting paths with potentials, O(n^2 m)).
///
/// `cost` is row-major with every row of equal length. Returns `(row, col)`
/// pairs sorted by row; exactly `min(rows, cols)` pairs are produced.
pub fn linear_assignment(cost: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    debug_assert!(cost.iter().all(|r| r.len() == cols));

    if rows > cols {
        let transposed: Vec<Vec<f64>> = (0..cols)
            .map(|c| (0..rows).map(|r| cost[r][c]).collect())
            .collect();
        let mut pairs: Vec<(usize, usize)> = solve(&transposed)
            .into_iter()
            .map(|(c, r)| (r, c))
            .collect();
        pairs.sort_unstable();
        return pairs;
    }
    solve(cost)
}

/// Requires `rows <= cols`.
fn solve(a: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let n = a.len();
    let m = a[0].len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    // p[j]: 1-based row assigned to column j (0 = free); column 0 is virtual.
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = (1..=m)
        .filter(|&j| p[j] != 0)
        .map(|j| (p[j] - 1, j - 1))
        .collect();
    pairs.sort_unstable();
    pairs
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Association {
    /// `(track index, detection index)`.
    pub matches: Vec<(usize, usize)>,
    pub unmatched_tracks: Vec<usize>,
    pub unmatched_detections: Vec<usize>,
}

/// Matches predicted track boxes to detections minimising `sum(1 - IoU)`.
///
/// Pairs with IoU below `gate_iou` never appear in `matches`.
pub fn associate(
    predicted: &[BoundingBox],
    detections: &[BoundingBox],
    gate_iou: f64,
) -> Association {
    let mut result = Association::default();
    if predicted.is_empty() || detections.is_empty() {
        result.unmatched_tracks = (0..predicted.len()).collect();
        result.unmatched_detections = (0..detections.len()).collect();
        return result;
    }

    let overlap: Vec<Vec<f64>> = predicted
        .iter()
        .map(|t| detections.iter().map(|d| iou(t, d)).collect())
        .collect();
    let cost: Vec<Vec<f64>> = overlap
        .iter()
        .map(|row| {
            row.iter()
                .map(|&o| if o < gate_iou { FORBIDDEN } else { 1.0 - o })
                .collect()
        })
        .collect();

    let mut track_used = vec![false; predicted.len()];
    let mut det_used = vec![false; detections.len()];
    for (t, d) in linear_assignment(&cost) {
        if overlap[t][d] < gate_iou {
            continue;
        }
        track_used[t] = true;
        det_used[d] = true;
        result.matches.push((t, d));
    }
    result.unmatched_tracks = (0..predicted.len()).filter(|&i| !track_used[i]).collect();
    result.unmatched_detections = (0..detections.len()).filter(|&i| !det_used[i]).collect();
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_inputs() {
        assert!(linear_assignment(&[]).is_empty());
        let b = BoundingBox::new(0.0, 0.0, 1.0, 1.0);
        let a = associate(&[], &[b, b], 0.3);
        assert!(a.matches.is_empty());
        assert_eq!(a.unmatched_detections, vec![0, 1]);
        let a = associate(&[b], &[], 0.3);
        assert_eq!(a.unmatched_tracks, vec![0]);
    }

    #[test]
    fn picks_cheaper_diagonal() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let pairs = linear_assignment(&cost);
        let total: f64 = pairs.iter().map(|&(r, c)| cost[r][c]).sum();
        assert_eq!(total, 5.0);
    }

    #[test]
    fn rectangular_both_ways() {
        let wide = vec![vec![5.0, 1.0, 9.0, 2.0], vec![1.0, 8.0, 9.0, 3.0]];
        assert_eq!(linear_assignment(&wide), vec![(0, 1), (1, 0)]);
        let tall: Vec<Vec<f64>> = (0..4).map(|c| wide.iter().map(|r| r[c]).collect()).collect();
        assert_eq!(linear_assignment(&tall), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn crosswise_gating() {
        // offset 90/11 gives IoU (10 - d) / (10 + d) = 0.1 between the two boxes
        let a = BoundingBox::new(10.0, 10.0, 10.0, 10.0);
        let b = BoundingBox::new(10.0 + 90.0 / 11.0, 10.0, 10.0, 10.0);
        assert!((iou(&a, &b) - 0.1).abs() < 1e-12);
        let assoc = associate(&[a, b], &[b, a], 0.3);
        assert_eq!(assoc.matches, vec![(0, 1), (1, 0)]);
        assert!(assoc.unmatched_tracks.is_empty());
        assert!(assoc.unmatched_detections.is_empty());
    }

    #[test]
    fn gated_pair_is_not_matched() {
        let t = BoundingBox::new(0.0, 0.0, 10.0, 10.0);
        let d = BoundingBox::new(8.0, 0.0, 10.0, 10.0);
        let assoc = associate(&[t], &[d], 0.3);
        assert!(assoc.matches.is_empty());
        assert_eq!(assoc.unmatched_tracks, vec![0]);
        assert_eq!(assoc.unmatched_detections, vec![0]);
    }
}
