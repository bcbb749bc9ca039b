use crate::geometry::{iou, BoundingBox};
use crate::simulator::Scene;

/// Minimum IoU for an output box to count as tracking a ground-truth object.
pub const TRACK_MATCH_IOU: f64 = 0.3;

/// Track ids covering one scripted occlusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OcclusionOutcome {
    pub object: usize,
    /// Id matched to the object on the last frame before the occlusion.
    pub id_before: Option<u64>,
    /// Id matched on the first frame after it.
    pub id_after: Option<u64>,
    pub survived: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingReport {
    /// Mean IoU over matched (output, ground truth) pairs.
    pub mean_iou_vs_gt: f64,
    pub matched: usize,
    /// Number of times a ground-truth object's matched id changes.
    pub id_switches: usize,
    /// Ground-truth object-frames with no matching output box.
    pub miss_frames: usize,
    pub occlusion_survival: Vec<bool>,
    pub occlusions: Vec<OcclusionOutcome>,
}

/// Scores per-frame `(id, box)` outputs against the scene's ground truth
/// using greedy one-to-one IoU matching.
pub fn tracking_report(outputs: &[Vec<(u64, BoundingBox)>], scene: &Scene) -> TrackingReport {
    let objects = scene.config.objects.len();
    let mut matched_id: Vec<Vec<Option<u64>>> = vec![vec![None; scene.frames.len()]; objects];
    let (mut iou_sum, mut matched, mut miss_frames) = (0.0, 0, 0);

    for (k, frame) in scene.frames.iter().enumerate() {
        let boxes: &[(u64, BoundingBox)] = outputs.get(k).map_or(&[], |v| v.as_slice());
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (gi, g) in frame.gt_objects.iter().enumerate() {
            for (oi, (_, b)) in boxes.iter().enumerate() {
                let v = iou(&g.bbox, b);
                if v >= TRACK_MATCH_IOU {
                    pairs.push((v, gi, oi));
                }
            }
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut gt_used = vec![false; frame.gt_objects.len()];
        let mut out_used = vec![false; boxes.len()];
        for (v, gi, oi) in pairs {
            if gt_used[gi] || out_used[oi] {
                continue;
            }
            gt_used[gi] = true;
            out_used[oi] = true;
            iou_sum += v;
            matched += 1;
            matched_id[frame.gt_objects[gi].object][k] = Some(boxes[oi].0);
        }
        miss_frames += gt_used.iter().filter(|u| !**u).count();
    }

    let id_switches = matched_id
        .iter()
        .map(|ids| {
            let seen: Vec<u64> = ids.iter().flatten().copied().collect();
            seen.windows(2).filter(|w| w[0] != w[1]).count()
        })
        .sum();

    let occlusions: Vec<OcclusionOutcome> = scene
        .config
        .scripted_occlusions
        .iter()
        .map(|o| {
            let lookup = |k: Option<usize>| {
                k.and_then(|k| matched_id.get(o.object).and_then(|ids| ids.get(k).copied().flatten()))
            };
            let id_before = lookup(o.start.checked_sub(1));
            let id_after = lookup(Some(o.start + o.len));
            OcclusionOutcome {
                object: o.object,
                id_before,
                id_after,
                survived: id_before.is_some() && id_before == id_after,
            }
        })
        .collect();

    TrackingReport {
        mean_iou_vs_gt: if matched == 0 { 0.0 } else { iou_sum / matched as f64 },
        matched,
        id_switches,
        miss_frames,
        occlusion_survival: occlusions.iter().map(|o| o.survived).collect(),
        occlusions,
    }
}
