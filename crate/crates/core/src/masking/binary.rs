use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Point2};

/// Inclusive pixel rectangle `x0..=x1, y0..=y1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelRect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl PixelRect {
    fn expand(self, other: PixelRect) -> PixelRect {
        PixelRect {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }

    /// Grows by `r` on every side, clipped to a `width x height` grid.
    pub fn grow(self, r: usize, width: usize, height: usize) -> PixelRect {
        PixelRect {
            x0: self.x0.saturating_sub(r),
            y0: self.y0.saturating_sub(r),
            x1: (self.x1 + r).min(width - 1),
            y1: (self.y1 + r).min(height - 1),
        }
    }
}

/// Row-major boolean grid; `true` marks dynamic pixels.
///
/// Pixel `(x, y)` is centred on the continuous coordinate `(x, y)`.
#[derive(Debug, Clone)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
    // Conservative bound on true pixels; never shrinks on clear.
    bounds: Option<PixelRect>,
}

impl PartialEq for BinaryMask {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.bits == other.bits
    }
}

impl Eq for BinaryMask {}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
            bounds: None,
        }
    }

    /// Evaluates `f` in row-major order.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    m.set(x, y, true);
                }
            }
        }
        m
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Value at signed coordinates; out-of-bounds reads are `false`.
    pub fn get(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return false;
        }
        self.bits[y as usize * self.width + x as usize]
    }

    pub fn at(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        assert!(x < self.width && y < self.height, "pixel ({x}, {y}) out of bounds");
        self.bits[y * self.width + x] = value;
        if value {
            let px = PixelRect { x0: x, y0: y, x1: x, y1: y };
            self.bounds = Some(self.bounds.map_or(px, |b| b.expand(px)));
        }
    }

    /// Region that contains every true pixel, or `None` when certainly empty.
    pub fn bounds(&self) -> Option<PixelRect> {
        self.bounds
    }

    pub fn count(&self) -> usize {
        match self.bounds {
            None => 0,
            Some(b) => (b.y0..=b.y1)
                .map(|y| {
                    self.bits[y * self.width + b.x0..=y * self.width + b.x1]
                        .iter()
                        .filter(|&&v| v)
                        .count()
                })
                .sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn complement(&self) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| !self.at(x, y))
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dims() == other.dims() && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn iter_true(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &v)| v)
            .map(move |(i, _)| (i % w, i / w))
    }

    /// Pixels whose centres fall inside `bbox`, clipped to the grid.
    pub fn box_pixels(&self, bbox: &BoundingBox) -> Option<PixelRect> {
        let (x0, y0, x1, y1) = bbox.corners();
        let lo_x = x0.ceil().max(0.0);
        let lo_y = y0.ceil().max(0.0);
        let hi_x = x1.floor().min(self.width as f64 - 1.0);
        let hi_y = y1.floor().min(self.height as f64 - 1.0);
        if !(lo_x <= hi_x && lo_y <= hi_y) {
            return None;
        }
        Some(PixelRect {
            x0: lo_x as usize,
            y0: lo_y as usize,
            x1: hi_x as usize,
            y1: hi_y as usize,
        })
    }

    pub fn fill_box(&mut self, bbox: &BoundingBox) {
        if let Some(r) = self.box_pixels(bbox) {
            for y in r.y0..=r.y1 {
                for x in r.x0..=r.x1 {
                    self.set(x, y, true);
                }
            }
        }
    }

    /// True iff the nearest pixel to `p` is inside the grid and set.
    pub fn contains(&self, p: &Point2) -> bool {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return false;
        }
        self.get(p.x.round() as i64, p.y.round() as i64)
    }

    /// In-place pixelwise OR.
    pub fn union_with(&mut self, other: &BinaryMask) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other.dims(),
            });
        }
        if let Some(b) = other.bounds {
            for y in b.y0..=b.y1 {
                for x in b.x0..=b.x1 {
                    if other.at(x, y) {
                        self.set(x, y, true);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Pixelwise OR of equally sized masks.
pub fn union_masks(masks: &[BinaryMask]) -> Result<BinaryMask> {
    let first = masks
        .first()
        .ok_or_else(|| Error::InsufficientData("no masks to combine".into()))?;
    let mut out = first.clone();
    for m in &masks[1..] {
        out.union_with(m)?;
    }
    Ok(out)
}
