//! Dynamic-region masks: segmentation contract, disk morphology and refinement.

mod binary;
mod morphology;
mod pbm;
mod segmenter;

pub use binary::{union_masks, BinaryMask, PixelRect};
pub use morphology::{dilate, erode, refine, StructuringElement};
pub use pbm::{read_pbm, to_pbm_string, write_pbm};
pub use segmenter::{
    BoxFill, NoisySegmenter, OracleSilhouette, SegmentContext, Segmenter, SegmenterKind, Silhouette,
};
