use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::binary::BinaryMask;
use crate::geometry::{iou, BoundingBox};

/// Rectangle with rounded corners: the pixel footprint of a scene object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Silhouette {
    pub bbox: BoundingBox,
    pub corner_radius: f64,
}

impl Silhouette {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        if !self.bbox.contains(x, y) {
            return false;
        }
        let r = self.corner_radius.min(0.5 * self.bbox.w.min(self.bbox.h));
        if r <= 0.0 {
            return true;
        }
        let (x0, y0, x1, y1) = self.bbox.corners();
        let cx = x.clamp(x0 + r, x1 - r);
        let cy = y.clamp(y0 + r, y1 - r);
        (x - cx).powi(2) + (y - cy).powi(2) <= r * r
    }
}

/// What a segmenter may look at for one frame.
#[derive(Debug, Clone, Copy)]
pub struct SegmentContext<'a> {
    pub width: usize,
    pub height: usize,
    pub frame_index: usize,
    /// Ground-truth object footprints, only used by oracle segmenters.
    pub objects: &'a [Silhouette],
}

/// Promptable segmentation: returns a mask that is false outside `prompt`.
pub trait Segmenter {
    fn segment(&mut self, ctx: &SegmentContext<'_>, prompt: &BoundingBox) -> BinaryMask;
}

/// Marks the whole prompt box.
#[derive(Debug, Clone, Copy, Default)]
pub struct BoxFill;

impl Segmenter for BoxFill {
    fn segment(&mut self, ctx: &SegmentContext<'_>, prompt: &BoundingBox) -> BinaryMask {
        let mut m = BinaryMask::new(ctx.width, ctx.height);
        m.fill_box(prompt);
        m
    }
}

/// Segments the object whose box best matches the prompt (largest IoU),
/// returning its silhouette clipped to the prompt box.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleSilhouette;

impl Segmenter for OracleSilhouette {
    fn segment(&mut self, ctx: &SegmentContext<'_>, prompt: &BoundingBox) -> BinaryMask {
        let mut m = BinaryMask::new(ctx.width, ctx.height);
        let best = ctx
            .objects
            .iter()
            .map(|s| (iou(&s.bbox, prompt), s))
            .filter(|(o, _)| *o > 0.0)
            .max_by(|a, b| a.0.total_cmp(&b.0));
        let (Some((_, sil)), Some(rect)) = (best, m.box_pixels(prompt)) else {
            return m;
        };
        for y in rect.y0..=rect.y1 {
            for x in rect.x0..=rect.x1 {
                if sil.contains(x as f64, y as f64) {
                    m.set(x, y, true);
                }
            }
        }
        m
    }
}

/// Wraps another segmenter and corrupts its output the way real promptable
/// models do: boundary pixels flip with probability `flip_prob`, and up to
/// `max_speckles` blobs of at most 2x2 px appear inside the prompt box.
#[derive(Debug, Clone)]
pub struct NoisySegmenter<S> {
    inner: S,
    flip_prob: f64,
    max_speckles: u32,
    rng: ChaCha8Rng,
}

impl<S: Segmenter> NoisySegmenter<S> {
    pub fn new(inner: S, flip_prob: f64, max_speckles: u32, seed: u64) -> Self {
        Self {
            inner,
            flip_prob: flip_prob.clamp(0.0, 1.0),
            max_speckles,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl<S: Segmenter> Segmenter for NoisySegmenter<S> {
    fn segment(&mut self, ctx: &SegmentContext<'_>, prompt: &BoundingBox) -> BinaryMask {
        let clean = self.inner.segment(ctx, prompt);
        let mut out = clean.clone();
        let Some(rect) = clean.box_pixels(prompt) else {
            return out;
        };
        for y in rect.y0..=rect.y1 {
            for x in rect.x0..=rect.x1 {
                let v = clean.at(x, y);
                let boundary = [(-1, 0), (1, 0), (0, -1), (0, 1)].iter().any(|&(dx, dy)| {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    nx >= 0
                        && ny >= 0
                        && (nx as usize) < clean.width()
                        && (ny as usize) < clean.height()
                        && clean.get(nx, ny) != v
                });
                if boundary && self.rng.gen_bool(self.flip_prob) {
                    out.set(x, y, !v);
                }
            }
        }
        let speckles = self.rng.gen_range(0..=self.max_speckles);
        for _ in 0..speckles {
            let size = self.rng.gen_range(1..=2usize);
            let sx = self.rng.gen_range(rect.x0..=rect.x1);
            let sy = self.rng.gen_range(rect.y0..=rect.y1);
            for y in sy..(sy + size).min(rect.y1 + 1) {
                for x in sx..(sx + size).min(rect.x1 + 1) {
                    out.set(x, y, true);
                }
            }
        }
        out
    }
}

/// Segmenter choice as named in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SegmenterKind {
    Box,
    Oracle,
    NoisyBox,
    #[default]
    NoisyOracle,
}

impl SegmenterKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "box" => Some(Self::Box),
            "oracle" => Some(Self::Oracle),
            "noisy-box" => Some(Self::NoisyBox),
            "noisy-oracle" => Some(Self::NoisyOracle),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Box => "box",
            Self::Oracle => "oracle",
            Self::NoisyBox => "noisy-box",
            Self::NoisyOracle => "noisy-oracle",
        }
    }

    pub fn build(&self, flip_prob: f64, max_speckles: u32, seed: u64) -> Box<dyn Segmenter + Send> {
        match self {
            Self::Box => Box::new(BoxFill),
            Self::Oracle => Box::new(OracleSilhouette),
            Self::NoisyBox => Box::new(NoisySegmenter::new(BoxFill, flip_prob, max_speckles, seed)),
            Self::NoisyOracle => Box::new(NoisySegmenter::new(
                OracleSilhouette,
                flip_prob,
                max_speckles,
                seed,
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(objects: &[Silhouette]) -> SegmentContext<'_> {
        SegmentContext {
            width: 64,
            height: 48,
            frame_index: 0,
            objects,
        }
    }

    #[test]
    fn box_fill_covers_prompt() {
        let prompt = BoundingBox::new(10.0, 10.0, 6.0, 4.0);
        let m = BoxFill.segment(&ctx(&[]), &prompt);
        assert_eq!(m.count(), 7 * 5);
    }

    #[test]
    fn oracle_picks_best_matching_object() {
        let a = Silhouette { bbox: BoundingBox::new(20.0, 20.0, 16.0, 16.0), corner_radius: 4.0 };
        let b = Silhouette { bbox: BoundingBox::new(40.0, 20.0, 10.0, 10.0), corner_radius: 0.0 };
        let objects = [a, b];
        let m = OracleSilhouette.segment(&ctx(&objects), &BoundingBox::new(21.0, 20.0, 16.0, 16.0));
        assert!(m.at(20, 20));
        assert!(!m.at(40, 20));
        // rounded corner excluded
        assert!(!m.at(13, 13));
        let none = OracleSilhouette.segment(&ctx(&objects), &BoundingBox::new(5.0, 40.0, 4.0, 4.0));
        assert!(none.is_empty());
    }

    #[test]
    fn noisy_output_stays_in_prompt() {
        let a = Silhouette { bbox: BoundingBox::new(30.0, 24.0, 20.0, 20.0), corner_radius: 5.0 };
        let objects = [a];
        let mut seg = NoisySegmenter::new(OracleSilhouette, 0.5, 6, 11);
        for k in 0..20 {
            let prompt = BoundingBox::new(28.0 + k as f64 * 0.3, 25.0, 18.0, 18.0);
            let m = seg.segment(&ctx(&objects), &prompt);
            for (x, y) in m.iter_true() {
                assert!(prompt.contains(x as f64, y as f64));
            }
        }
    }
}
