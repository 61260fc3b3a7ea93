use std::fmt;
use std::io::Cursor;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An 8-bit sRGB color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Srgb(pub [u8; 3]);

impl Srgb {
    pub const WHITE: Srgb = Srgb([255, 255, 255]);
    pub const BLACK: Srgb = Srgb([0, 0, 0]);

    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Srgb([r, g, b])
    }

    pub fn opaque(self) -> Rgba {
        [self.0[0], self.0[1], self.0[2], 255]
    }
}

impl fmt::Display for Srgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0[0], self.0[1], self.0[2])
    }
}

/// Straight (non-premultiplied) 8-bit RGBA.
pub type Rgba = [u8; 4];

pub const TRANSPARENT: Rgba = [0, 0, 0, 0];

/// Axis-aligned pixel rectangle, half-open: covers `x..x+w` by `y..y+h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PixelRect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl PixelRect {
    pub const fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        PixelRect { x, y, w, h }
    }

    pub fn right(&self) -> u32 {
        self.x + self.w
    }

    pub fn bottom(&self) -> u32 {
        self.y + self.h
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.x as f64 && x <= self.right() as f64 && y >= self.y as f64 && y <= self.bottom() as f64
    }

    pub fn fits_within(&self, width: u32, height: u32) -> bool {
        self.right() <= width && self.bottom() <= height
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }
}

/// Row-major 8-bit sRGB raster with optional alpha.
///
/// Pixels are always stored as RGBA; `has_alpha` records whether the alpha
/// channel is meaningful (and therefore whether PNG export writes RGBA).
#[derive(Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    has_alpha: bool,
    pixels: Vec<Rgba>,
}

impl fmt::Debug for RasterImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RasterImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("has_alpha", &self.has_alpha)
            .finish_non_exhaustive()
    }
}

impl RasterImage {
    pub fn filled(width: u32, height: u32, color: Rgba) -> Result<Self> {
        check_dims(width, height)?;
        Ok(RasterImage {
            width,
            height,
            has_alpha: color[3] != 255,
            pixels: vec![color; width as usize * height as usize],
        })
    }

    /// A fully transparent layer.
    pub fn transparent(width: u32, height: u32) -> Result<Self> {
        Self::filled(width, height, TRANSPARENT)
    }

    pub fn from_pixels(width: u32, height: u32, has_alpha: bool, pixels: Vec<Rgba>) -> Result<Self> {
        check_dims(width, height)?;
        if pixels.len() != width as usize * height as usize {
            return Err(Error::param(format!(
                "pixel count {} does not match {}x{}",
                pixels.len(),
                width,
                height
            )));
        }
        Ok(RasterImage {
            width,
            height,
            has_alpha,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn has_alpha(&self) -> bool {
        self.has_alpha
    }

    pub fn set_has_alpha(&mut self, has_alpha: bool) {
        self.has_alpha = has_alpha;
    }

    pub fn pixels(&self) -> &[Rgba] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [Rgba] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<Rgba> {
        self.pixels
    }

    #[inline]
    pub fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Rgba {
        self.pixels[self.index(x, y)]
    }

    #[inline]
    pub fn put(&mut self, x: u32, y: u32, px: Rgba) {
        let i = self.index(x, y);
        self.pixels[i] = px;
    }

    pub fn same_dims(&self, other: &RasterImage) -> Result<()> {
        if self.dims() == other.dims() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left_w: self.width,
                left_h: self.height,
                right_w: other.width,
                right_h: other.height,
            })
        }
    }

    /// Encodes as PNG: RGBA when `has_alpha`, RGB otherwise.
    pub fn to_png_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut encoder = png::Encoder::new(&mut out, self.width, self.height);
            encoder.set_depth(png::BitDepth::Eight);
            encoder.set_compression(png::Compression::Balanced);
            let data: Vec<u8> = if self.has_alpha {
                encoder.set_color(png::ColorType::Rgba);
                self.pixels.iter().flatten().copied().collect()
            } else {
                encoder.set_color(png::ColorType::Rgb);
                self.pixels.iter().flat_map(|p| [p[0], p[1], p[2]]).collect()
            };
            let mut writer = encoder.write_header().map_err(|e| Error::Png(e.to_string()))?;
            writer
                .write_image_data(&data)
                .map_err(|e| Error::Png(e.to_string()))?;
        }
        Ok(out)
    }

    /// Decodes an 8-bit (or 16-bit, stripped) PNG of any color type.
    pub fn from_png_bytes(bytes: &[u8]) -> Result<Self> {
        let mut decoder = png::Decoder::new(Cursor::new(bytes));
        decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
        let mut reader = decoder.read_info().map_err(|e| Error::Png(e.to_string()))?;
        let size = reader
            .output_buffer_size()
            .ok_or_else(|| Error::Png("image too large".into()))?;
        let mut buf = vec![0u8; size];
        let info = reader.next_frame(&mut buf).map_err(|e| Error::Png(e.to_string()))?;
        let buf = &buf[..info.buffer_size()];
        let (w, h) = (info.width, info.height);
        let (pixels, has_alpha): (Vec<Rgba>, bool) = match info.color_type {
            png::ColorType::Rgba => (buf.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]).collect(), true),
            png::ColorType::Rgb => (buf.chunks_exact(3).map(|c| [c[0], c[1], c[2], 255]).collect(), false),
            png::ColorType::GrayscaleAlpha => (buf.chunks_exact(2).map(|c| [c[0], c[0], c[0], c[1]]).collect(), true),
            png::ColorType::Grayscale => (buf.iter().map(|&g| [g, g, g, 255]).collect(), false),
            png::ColorType::Indexed => return Err(Error::Png("unexpanded palette image".into())),
        };
        RasterImage::from_pixels(w, h, has_alpha, pixels)
    }

    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_png_bytes()?)?;
        Ok(())
    }

    pub fn load_png(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::from_png_bytes(&bytes)
    }
}

fn check_dims(width: u32, height: u32) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::param(format!("image dimensions must be positive, got {width}x{height}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trip_rgb_and_rgba() {
        let mut img = RasterImage::filled(5, 3, [10, 20, 30, 255]).unwrap();
        img.put(4, 2, [200, 100, 0, 255]);
        let back = RasterImage::from_png_bytes(&img.to_png_bytes().unwrap()).unwrap();
        assert_eq!(back, img);

        let mut layer = RasterImage::transparent(4, 4).unwrap();
        layer.put(1, 1, [1, 2, 3, 128]);
        let back = RasterImage::from_png_bytes(&layer.to_png_bytes().unwrap()).unwrap();
        assert!(back.has_alpha());
        assert_eq!(back, layer);
    }

    #[test]
    fn zero_dims_rejected() {
        assert!(RasterImage::filled(0, 4, TRANSPARENT).is_err());
        assert!(RasterImage::from_pixels(2, 2, false, vec![[0; 4]; 3]).is_err());
    }
}
