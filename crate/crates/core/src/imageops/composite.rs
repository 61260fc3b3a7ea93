//! Source-over layer compositing in linear light.

use super::color::{decode_u8, encode_linear};
use super::raster::{RasterImage, Rgba, Srgb};
use crate::error::Result;

/// Flattens `decoy` then `original` over a solid `background`, bottom to top.
/// The result is opaque.
pub fn composite(background: Srgb, decoy: &RasterImage, original: &RasterImage) -> Result<RasterImage> {
    decoy.same_dims(original)?;
    let bg = [decode_u8(background.0[0]), decode_u8(background.0[1]), decode_u8(background.0[2])];
    let pixels: Vec<Rgba> = decoy
        .pixels()
        .iter()
        .zip(original.pixels())
        .map(|(d, o)| over_pixel(bg, background, d, o))
        .collect();
    RasterImage::from_pixels(decoy.width(), decoy.height(), false, pixels)
}

/// Flattens a single layer over `background`.
pub fn flatten(background: Srgb, layer: &RasterImage) -> RasterImage {
    let bg = [decode_u8(background.0[0]), decode_u8(background.0[1]), decode_u8(background.0[2])];
    let clear = [0u8; 4];
    let pixels = layer.pixels().iter().map(|p| over_pixel(bg, background, p, &clear)).collect();
    RasterImage::from_pixels(layer.width(), layer.height(), false, pixels).expect("same dims")
}

#[inline]
fn over_pixel(bg: [f64; 3], bg8: Srgb, d: &Rgba, o: &Rgba) -> Rgba {
    // Exact shortcuts; they agree with the general formula because
    // encode(decode(v)) == v for every 8-bit code.
    if o[3] == 255 {
        return [o[0], o[1], o[2], 255];
    }
    if o[3] == 0 {
        if d[3] == 255 {
            return [d[0], d[1], d[2], 255];
        }
        if d[3] == 0 {
            return bg8.opaque();
        }
    }
    let da = d[3] as f64 / 255.0;
    let oa = o[3] as f64 / 255.0;
    let mut out = [0u8, 0, 0, 255];
    for c in 0..3 {
        let under = decode_u8(d[c]) * da + bg[c] * (1.0 - da);
        out[c] = encode_linear(decode_u8(o[c]) * oa + under * (1.0 - oa));
    }
    out
}
