use crate::chartgen::{rasterize, GeometrySet};
use crate::decoy::{DecoyGeometry, HuePlan};
use crate::error::{Error, Result};
use crate::imageops::{apply_mask_in_place, composite, flatten, gaussian_blur, MaskPattern, MaskRegion, PixelRect, RasterImage, Srgb, TRANSPARENT};
use crate::vision::components;

use super::AgnosticParams;

/// The original chart as an overlay layer: background pixels transparent,
/// every other pixel assigned to one mask region.
///
/// A pixel belongs to the topmost geometry element that covers it, so the
/// mask pattern of each mark is anchored at that mark's own top-left
/// corner. Drawn pixels no element covers (anti-aliased fringes, unknown
/// furniture in image input) are grouped into 4-connected components, each
/// anchored at its bounding box.
#[derive(Clone, Debug)]
pub struct OriginalLayer {
    layer: RasterImage,
    regions: Vec<MaskRegion>,
}

impl OriginalLayer {
    pub fn new(img: &RasterImage, geom: &GeometrySet, background: Srgb) -> Result<Self> {
        let (w, h) = img.dims();
        if (geom.canvas_width, geom.canvas_height) != (w, h) {
            return Err(Error::DimensionMismatch { left_w: w, left_h: h, right_w: geom.canvas_width, right_h: geom.canvas_height });
        }
        let drawn: Vec<bool> = img.pixels().iter().map(|p| p[3] != 0 && [p[0], p[1], p[2]] != background.0).collect();
        let mut owner = vec![usize::MAX; drawn.len()];
        let mut bounds = Vec::with_capacity(geom.elements.len());
        for (e, el) in geom.elements.iter().enumerate() {
            let fp = el.mark.footprint(w, h);
            if let Some((b, covered)) = &fp {
                for dy in 0..b.h {
                    for dx in 0..b.w {
                        let i = ((b.y + dy) * w + b.x + dx) as usize;
                        if covered[(dy * b.w + dx) as usize] && drawn[i] {
                            owner[i] = e;
                        }
                    }
                }
            }
            bounds.push(fp.map(|(b, _)| b));
        }
        let mut regions = Vec::new();
        for (e, b) in bounds.iter().enumerate() {
            let Some(b) = b else { continue };
            let covered: Vec<bool> = (0..b.h)
                .flat_map(|dy| (0..b.w).map(move |dx| ((b.y + dy) * w + b.x + dx) as usize))
                .map(|i| owner[i] == e)
                .collect();
            if covered.iter().any(|&c| c) {
                regions.push(MaskRegion::Footprint { bounds: *b, covered });
            }
        }
        let orphans: Vec<bool> = drawn.iter().zip(&owner).map(|(&d, &o)| d && o == usize::MAX).collect();
        for comp in components(&orphans, w as usize, h as usize) {
            let b = comp.bounds;
            let mut covered = vec![false; b.area() as usize];
            for &i in &comp.pixels {
                let (x, y) = (i as u32 % w, i as u32 / w);
                covered[((y - b.y) * b.w + x - b.x) as usize] = true;
            }
            regions.push(MaskRegion::Footprint { bounds: b, covered });
        }
        let mut layer = img.clone();
        layer.set_has_alpha(true);
        for (p, &d) in layer.pixels_mut().iter_mut().zip(&drawn) {
            if !d {
                *p = TRANSPARENT;
            }
        }
        Ok(OriginalLayer { layer, regions })
    }

    /// The unmasked layer.
    pub fn layer(&self) -> &RasterImage {
        &self.layer
    }

    pub fn regions(&self) -> &[MaskRegion] {
        &self.regions
    }

    /// Largest side of any mask region; a keep-first cell at least this
    /// large removes nothing.
    pub fn max_extent(&self) -> u32 {
        self.regions.iter().map(|r| r.bounds()).map(|b: PixelRect| b.w.max(b.h)).max().unwrap_or(1)
    }

    /// The layer cut into a keep-first checkerboard of `cell`-pixel cells.
    pub fn masked(&self, cell: u32) -> Result<RasterImage> {
        let mut out = self.layer.clone();
        let pattern = MaskPattern::checkerboard(cell);
        for r in &self.regions {
            apply_mask_in_place(&mut out, r, pattern)?;
        }
        Ok(out)
    }
}

/// The decoy drawn in `LCH(l, c, planned hue)` on a transparent canvas and
/// blurred with a `k`-tap Gaussian.
pub fn decoy_layer(decoy: &DecoyGeometry, hues: &HuePlan, l: f64, c: f64, k: u32) -> Result<RasterImage> {
    if hues.hues.len() != decoy.marks.len() {
        return Err(Error::param(format!("hue plan has {} entries for {} decoy marks", hues.hues.len(), decoy.marks.len())));
    }
    let geom = decoy.colored(&hues.hues, l, c);
    let sharp = rasterize(decoy.canvas_width, decoy.canvas_height, None, geom.data_marks())?;
    gaussian_blur(&sharp, k)
}

/// Builds one protected candidate. Returns `(protected, decoy_flat)`, where
/// `decoy_flat` is the blurred decoy layer over the background.
pub fn build_candidate(
    orig_img: &RasterImage,
    orig_geom: &GeometrySet,
    decoy: &DecoyGeometry,
    hues: &HuePlan,
    params: &AgnosticParams,
    background: Srgb,
) -> Result<(RasterImage, RasterImage)> {
    if (decoy.canvas_width, decoy.canvas_height) != orig_img.dims() {
        return Err(Error::DimensionMismatch {
            left_w: orig_img.width(),
            left_h: orig_img.height(),
            right_w: decoy.canvas_width,
            right_h: decoy.canvas_height,
        });
    }
    let original = OriginalLayer::new(orig_img, orig_geom, background)?;
    let decoy_img = decoy_layer(decoy, hues, params.decoy_l, params.decoy_c, params.kernel_size)?;
    let masked = original.masked(params.mask_area)?;
    Ok((composite(background, &decoy_img, &masked)?, flatten(background, &decoy_img)))
}
