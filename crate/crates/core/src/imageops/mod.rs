//! Raster and color primitives: LCH conversion, circular hue mean, Gaussian
//! low-pass, area resampling, cell masking and layer compositing.
//!
//! Every operation that averages or blends pixel values does so in
//! linearized RGB.

mod blur;
mod color;
mod composite;
mod mask;
mod planes;
mod raster;
mod resample;

pub use blur::{blur_plane, gaussian_blur, gaussian_taps, sigma_for_kernel};
pub use color::{
    circular_mean_hue, cosd, decode_u8, encode_linear, hue_distance, lab_to_linear, lch_to_srgb,
    linear_rgb, linear_to_lab, normalize_degrees, sind, srgb_eotf, srgb_oetf, srgb_to_lch, HueMean,
    LchColor,
};
pub use composite::{composite, flatten};
pub use mask::{apply_mask, apply_mask_in_place, MaskOrientation, MaskPattern, MaskPhase, MaskRegion};
pub use raster::{PixelRect, RasterImage, Rgba, Srgb, TRANSPARENT};
pub use resample::{resample, resample_many, resample_to, scaled_dims};

pub(crate) use blur::gaussian_taps_sigma;
