//! Cell masking that clears alternate cells of a region to transparency.

use serde::{Deserialize, Serialize};

use super::raster::{PixelRect, RasterImage, TRANSPARENT};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MaskPhase {
    /// The cell at the anchor is kept.
    #[default]
    KeepFirst,
    /// The cell at the anchor is cleared.
    ClearFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MaskOrientation {
    #[default]
    Checkerboard,
    HorizontalStripes,
}

/// Square cells of side `cell_size`, alternating keep/clear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MaskPattern {
    pub cell_size: u32,
    pub phase: MaskPhase,
    pub orientation: MaskOrientation,
}

impl MaskPattern {
    pub fn checkerboard(cell_size: u32) -> Self {
        MaskPattern {
            cell_size,
            phase: MaskPhase::KeepFirst,
            orientation: MaskOrientation::Checkerboard,
        }
    }

    /// Whether the pixel at offset `(dx, dy)` from the anchor survives.
    #[inline]
    pub fn keeps(&self, dx: u32, dy: u32) -> bool {
        let cx = dx / self.cell_size;
        let cy = dy / self.cell_size;
        let first = match self.orientation {
            MaskOrientation::Checkerboard => (cx + cy) % 2 == 0,
            MaskOrientation::HorizontalStripes => cy % 2 == 0,
        };
        match self.phase {
            MaskPhase::KeepFirst => first,
            MaskPhase::ClearFirst => !first,
        }
    }
}

/// The pixels a mask applies to. The pattern is anchored at `bounds`' top-left.
#[derive(Clone, Debug, PartialEq)]
pub enum MaskRegion {
    Rect(PixelRect),
    /// Only pixels flagged in `covered` (row-major over `bounds`) are affected.
    Footprint { bounds: PixelRect, covered: Vec<bool> },
}

impl MaskRegion {
    pub fn bounds(&self) -> PixelRect {
        match self {
            MaskRegion::Rect(r) => *r,
            MaskRegion::Footprint { bounds, .. } => *bounds,
        }
    }
}

pub fn apply_mask(img: &RasterImage, region: &MaskRegion, pattern: MaskPattern) -> Result<RasterImage> {
    let mut out = img.clone();
    apply_mask_in_place(&mut out, region, pattern)?;
    Ok(out)
}

pub fn apply_mask_in_place(img: &mut RasterImage, region: &MaskRegion, pattern: MaskPattern) -> Result<()> {
    if pattern.cell_size == 0 {
        return Err(Error::param("mask cell size must be at least 1"));
    }
    let b = region.bounds();
    if !b.fits_within(img.width(), img.height()) {
        return Err(Error::param(format!(
            "mask region {b:?} exceeds image {}x{}",
            img.width(),
            img.height()
        )));
    }
    if let MaskRegion::Footprint { covered, .. } = region {
        if covered.len() as u64 != b.area() {
            return Err(Error::param("mask footprint size does not match its bounds"));
        }
    }
    img.set_has_alpha(true);
    for dy in 0..b.h {
        for dx in 0..b.w {
            if let MaskRegion::Footprint { covered, .. } = region {
                if !covered[(dy * b.w + dx) as usize] {
                    continue;
                }
            }
            if !pattern.keeps(dx, dy) {
                img.put(b.x + dx, b.y + dy, TRANSPARENT);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn opaque(w: u32, h: u32) -> RasterImage {
        RasterImage::filled(w, h, [9, 9, 9, 255]).unwrap()
    }

    fn kept(img: &RasterImage) -> Vec<(u32, u32)> {
        let mut v = Vec::new();
        for y in 0..img.height() {
            for x in 0..img.width() {
                if img.get(x, y)[3] != 0 {
                    v.push((x, y));
                }
            }
        }
        v
    }

    #[test]
    fn large_cell_keeps_region() {
        let img = opaque(10, 10);
        let out = apply_mask(&img, &MaskRegion::Rect(PixelRect::new(2, 2, 5, 4)), MaskPattern::checkerboard(5)).unwrap();
        assert_eq!(kept(&out).len(), 100);
    }

    #[test]
    fn checkerboard_counts() {
        let img = opaque(4, 4);
        let out = apply_mask(&img, &MaskRegion::Rect(PixelRect::new(0, 0, 4, 4)), MaskPattern::checkerboard(2)).unwrap();
        assert_eq!(kept(&out).len(), 8);
        assert_eq!(out.get(0, 0)[3], 255);
        assert_eq!(out.get(2, 0)[3], 0);
        assert_eq!(out.get(2, 2)[3], 255);
    }

    #[test]
    fn stripes_clear_first() {
        // 6 wide, 2 tall region with 2-px stripes: the single stripe row
        // band (rows 0-1) is the first stripe and is cleared.
        let img = opaque(6, 4);
        let pattern = MaskPattern {
            cell_size: 2,
            phase: MaskPhase::ClearFirst,
            orientation: MaskOrientation::HorizontalStripes,
        };
        let out = apply_mask(&img, &MaskRegion::Rect(PixelRect::new(0, 0, 6, 2)), pattern).unwrap();
        for x in 0..6 {
            assert_eq!(out.get(x, 0)[3], 0);
            assert_eq!(out.get(x, 1)[3], 0);
            assert_eq!(out.get(x, 2)[3], 255, "outside the region");
        }
        let tall = apply_mask(&img, &MaskRegion::Rect(PixelRect::new(0, 0, 6, 4)), pattern).unwrap();
        assert_eq!(tall.get(0, 1)[3], 0);
        assert_eq!(tall.get(0, 2)[3], 255);
        assert_eq!(tall.get(5, 3)[3], 255);
    }

    #[test]
    fn footprint_limits_effect() {
        let img = opaque(4, 1);
        let region = MaskRegion::Footprint {
            bounds: PixelRect::new(0, 0, 4, 1),
            covered: vec![false, true, true, false],
        };
        let out = apply_mask(&img, &region, MaskPattern::checkerboard(1)).unwrap();
        assert_eq!(kept(&out), vec![(0, 0), (2, 0), (3, 0)]);
    }

    #[test]
    fn out_of_bounds_region_errors() {
        let img = opaque(4, 4);
        assert!(apply_mask(&img, &MaskRegion::Rect(PixelRect::new(2, 2, 3, 1)), MaskPattern::checkerboard(1)).is_err());
        assert!(apply_mask(&img, &MaskRegion::Rect(PixelRect::new(0, 0, 1, 1)), MaskPattern::checkerboard(0)).is_err());
    }

    proptest! {
        #[test]
        fn kept_set_matches_cell_enumeration(
            x in 0u32..6, y in 0u32..6, w in 1u32..14, h in 1u32..14,
            m in 1u32..6, clear_first in any::<bool>(), stripes in any::<bool>(),
        ) {
            let img = opaque(20, 20);
            let pattern = MaskPattern {
                cell_size: m,
                phase: if clear_first { MaskPhase::ClearFirst } else { MaskPhase::KeepFirst },
                orientation: if stripes { MaskOrientation::HorizontalStripes } else { MaskOrientation::Checkerboard },
            };
            let out = apply_mask(&img, &MaskRegion::Rect(PixelRect::new(x, y, w, h)), pattern).unwrap();

            // Oracle: enumerate cells explicitly and paint the cleared ones.
            let mut expected = vec![true; 400];
            let cells_x = w.div_ceil(m);
            let cells_y = h.div_ceil(m);
            for cy in 0..cells_y {
                for cx in 0..cells_x {
                    let index = if stripes { cy } else { cx + cy };
                    let is_first = index % 2 == 0;
                    let clear = if clear_first { is_first } else { !is_first };
                    if !clear { continue; }
                    for py in y + cy * m..(y + (cy + 1) * m).min(y + h) {
                        for px in x + cx * m..(x + (cx + 1) * m).min(x + w) {
                            expected[(py * 20 + px) as usize] = false;
                        }
                    }
                }
            }
            for py in 0..20 {
                for px in 0..20 {
                    prop_assert_eq!(out.get(px, py)[3] != 0, expected[(py * 20 + px) as usize]);
                }
            }
        }
    }
}
