use super::binary::{BinaryMask, PixelRect};
use crate::error::{Error, Result};

/// Disk structuring element `{(dx, dy) : dx^2 + dy^2 <= radius^2}`.
///
/// Stored as one horizontal span `-half..=half` per row offset `dy`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    radius: usize,
    spans: Vec<(i64, i64)>,
}

impl StructuringElement {
    pub fn disk(radius: usize) -> Self {
        let r = radius as i64;
        let spans = (-r..=r)
            .map(|dy| {
                let mut half = 0;
                while (half + 1) * (half + 1) + dy * dy <= r * r {
                    half += 1;
                }
                (dy, half)
            })
            .collect();
        Self { radius, spans }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn offsets(&self) -> Vec<(i64, i64)> {
        self.spans
            .iter()
            .flat_map(|&(dy, half)| (-half..=half).map(move |dx| (dx, dy)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.spans.iter().map(|&(_, h)| (2 * h + 1) as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Per-row prefix counts of true pixels over the columns of a rectangle.
struct RowCounts {
    rect: PixelRect,
    stride: usize,
    prefix: Vec<u32>,
}

impl RowCounts {
    fn new(mask: &BinaryMask, rect: PixelRect) -> Self {
        let stride = rect.x1 - rect.x0 + 2;
        let rows = rect.y1 - rect.y0 + 1;
        let mut prefix = vec![0u32; stride * rows];
        for (ri, y) in (rect.y0..=rect.y1).enumerate() {
            let row = &mut prefix[ri * stride..(ri + 1) * stride];
            for (ci, x) in (rect.x0..=rect.x1).enumerate() {
                row[ci + 1] = row[ci] + mask.at(x, y) as u32;
            }
        }
        Self { rect, stride, prefix }
    }

    /// True pixels in row `y`, columns `lo..=hi`, counting only inside `rect`.
    fn count(&self, y: i64, lo: i64, hi: i64) -> u32 {
        if y < self.rect.y0 as i64 || y > self.rect.y1 as i64 {
            return 0;
        }
        let lo = lo.max(self.rect.x0 as i64);
        let hi = hi.min(self.rect.x1 as i64);
        if lo > hi {
            return 0;
        }
        let row = (y as usize - self.rect.y0) * self.stride;
        let a = (lo as usize) - self.rect.x0;
        let b = (hi as usize) - self.rect.x0 + 1;
        self.prefix[row + b] - self.prefix[row + a]
    }
}

/// Erosion: a pixel stays set iff every offset of `se` lands on a set pixel.
/// Pixels outside the grid count as unset.
pub fn erode(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = mask.dims();
    let mut out = BinaryMask::new(w, h);
    let Some(rect) = mask.bounds() else {
        return out;
    };
    let counts = RowCounts::new(mask, rect);
    for y in rect.y0..=rect.y1 {
        for x in rect.x0..=rect.x1 {
            if !mask.at(x, y) {
                continue;
            }
            let fits = se.spans.iter().all(|&(dy, half)| {
                let (xi, yi) = (x as i64, y as i64 + dy);
                let (lo, hi) = (xi - half, xi + half);
                lo >= 0
                    && hi < w as i64
                    && yi >= 0
                    && yi < h as i64
                    && counts.count(yi, lo, hi) as i64 == hi - lo + 1
            });
            if fits {
                out.set(x, y, true);
            }
        }
    }
    out
}

/// Dilation: a pixel is set iff some offset of `se` lands on a set pixel.
pub fn dilate(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = mask.dims();
    let mut out = BinaryMask::new(w, h);
    let Some(rect) = mask.bounds() else {
        return out;
    };
    let counts = RowCounts::new(mask, rect);
    let reach = rect.grow(se.radius, w, h);
    for y in reach.y0..=reach.y1 {
        for x in reach.x0..=reach.x1 {
            let hit = se.spans.iter().any(|&(dy, half)| {
                let xi = x as i64;
                counts.count(y as i64 + dy, xi - half, xi + half) > 0
            });
            if hit {
                out.set(x, y, true);
            }
        }
    }
    out
}

/// Erode with `disk(r_erode)` to drop speckles, then dilate with the strictly
/// larger `disk(r_dilate)` so the result covers the object edges.
pub fn refine(mask: &BinaryMask, r_erode: usize, r_dilate: usize) -> Result<BinaryMask> {
    if r_dilate <= r_erode {
        return Err(Error::Config(format!(
            "dilation radius {r_dilate} must exceed erosion radius {r_erode}"
        )));
    }
    let eroded = erode(mask, &StructuringElement::disk(r_erode));
    Ok(dilate(&eroded, &StructuringElement::disk(r_dilate)))
}
