//! Distance-dependent perception and similarity scoring.
//!
//! Images are shrunk by a viewing-distance factor and compared with
//! MS-SSIM (luma) and a saliency-weighted index (VSI). Transparent pixels
//! are treated as white.

mod gaps;
mod manifest;
mod msssim;
mod saliency;
mod viewing;
mod vsi;

pub use gaps::{gap_scores, GapScores, PerceivedPair};
pub use manifest::{MetricManifest, MsSsimConfig, SaliencyConfig, VsiConfig, DEFAULT_MANIFEST};
pub use msssim::{ms_ssim, scale_count, MsSsim, MsSsimPrepared};
pub use saliency::saliency_map;
pub use viewing::{
    gamma, simulate_perception, simulate_perception_pair, ViewingConfig, ViewingContext, CLOSE_DISTANCE_CM, FAR_DISTANCE_CM,
    PHONE_DENSITY_PX_PER_CM, PHONE_WIDTH_PX, THETA_H_DEG, THETA_W_DEG,
};
pub use vsi::{vsi, Vsi, VsiPrepared};

use std::borrow::Cow;

use crate::imageops::{flatten, RasterImage, Rgba, Srgb};

fn opaque_rgb(img: &RasterImage) -> Cow<'_, [Rgba]> {
    if img.has_alpha() {
        Cow::Owned(flatten(Srgb::WHITE, img).into_pixels())
    } else {
        Cow::Borrowed(img.pixels())
    }
}
