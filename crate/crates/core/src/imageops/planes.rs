use super::color::{decode_u8, encode_linear};
use super::raster::{RasterImage, Rgba};

/// Premultiplied linear-light channel planes of an image.
///
/// When every source pixel is opaque the alpha plane is skipped and treated
/// as constant 1.
pub(crate) struct LinearPlanes {
    pub rgb: [Vec<f64>; 3],
    pub alpha: Option<Vec<f64>>,
}

impl LinearPlanes {
    pub fn from_image(img: &RasterImage) -> Self {
        let px = img.pixels();
        let opaque = px.iter().all(|p| p[3] == 255);
        let n = px.len();
        let mut rgb = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let alpha = if opaque {
            for (i, p) in px.iter().enumerate() {
                for c in 0..3 {
                    rgb[c][i] = decode_u8(p[c]);
                }
            }
            None
        } else {
            let mut a = vec![0.0; n];
            for (i, p) in px.iter().enumerate() {
                let av = p[3] as f64 / 255.0;
                a[i] = av;
                for c in 0..3 {
                    rgb[c][i] = decode_u8(p[c]) * av;
                }
            }
            Some(a)
        };
        LinearPlanes { rgb, alpha }
    }

    pub fn map(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        LinearPlanes {
            rgb: [f(&self.rgb[0]), f(&self.rgb[1]), f(&self.rgb[2])],
            alpha: self.alpha.as_deref().map(&f),
        }
    }

    pub fn to_image(&self, width: u32, height: u32, has_alpha: bool) -> RasterImage {
        let n = self.rgb[0].len();
        let pixels: Vec<Rgba> = (0..n)
            .map(|i| match &self.alpha {
                None => [
                    encode_linear(self.rgb[0][i]),
                    encode_linear(self.rgb[1][i]),
                    encode_linear(self.rgb[2][i]),
                    255,
                ],
                Some(a) => {
                    let av = a[i];
                    let a8 = (av * 255.0).round().clamp(0.0, 255.0) as u8;
                    if a8 == 0 {
                        [0, 0, 0, 0]
                    } else {
                        [
                            encode_linear(self.rgb[0][i] / av),
                            encode_linear(self.rgb[1][i] / av),
                            encode_linear(self.rgb[2][i] / av),
                            a8,
                        ]
                    }
                }
            })
            .collect();
        RasterImage::from_pixels(width, height, has_alpha || self.alpha.is_some(), pixels)
            .expect("plane dimensions match")
    }
}
