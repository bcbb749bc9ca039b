//! Segment one frame's objects from box prompts, refine the union by
//! erosion then dilation, and write the masks as PBM images.
//!
//! ```text
//! cargo run --example mask_refinement -- [out_dir]
//! ```

use std::path::PathBuf;

use dynvo::masking::{refine, write_pbm, BinaryMask, SegmentContext, SegmenterKind};
use dynvo::simulator::{generate, DynamicLevel, SceneConfig};

fn main() -> dynvo::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let scene = generate(&SceneConfig::preset(DynamicLevel::Mid), 2)?;
    let frame = &scene.frames[50];
    let (w, h) = scene.config.viewport;
    let silhouettes = scene.silhouettes(frame);
    let ctx = SegmentContext { width: w, height: h, frame_index: frame.index, objects: &silhouettes };

    let mut segmenter = SegmenterKind::NoisyOracle.build(0.1, 3, 7);
    let (mut raw, mut refined) = (BinaryMask::new(w, h), BinaryMask::new(w, h));
    for prompt in &frame.detections {
        let m = segmenter.segment(&ctx, prompt);
        raw.union_with(&m)?;
        refined.union_with(&refine(&m, 2, 5)?)?;
    }
    write_pbm(&raw, &out.join("mask-raw.pbm"))?;
    write_pbm(&refined, &out.join("mask-refined.pbm"))?;

    let missed = frame
        .candidates
        .iter()
        .filter(|k| k.origin.is_dynamic())
        .filter(|k| !refined.contains(&k.position))
        .count();
    println!("{} prompts; raw mask {} px, refined {} px", frame.detections.len(), raw.count(), refined.count());
    println!("dynamic candidates outside the refined mask: {missed}");
    println!("wrote {}/mask-raw.pbm and mask-refined.pbm", out.display());
    Ok(())
}
