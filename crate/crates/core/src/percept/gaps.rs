use serde::{Deserialize, Serialize};

use super::msssim::MsSsim;
use super::viewing::{gamma, simulate_perception, ViewingContext};
use super::vsi::Vsi;
use crate::error::{Error, Result};
use crate::imageops::RasterImage;

/// An image as seen from the close and far distances.
#[derive(Clone, Debug, PartialEq)]
pub struct PerceivedPair {
    pub close: RasterImage,
    pub far: RasterImage,
    pub gamma_close: f64,
    pub gamma_far: f64,
}

impl PerceivedPair {
    pub fn new(img: &RasterImage, close: &ViewingContext, far: &ViewingContext) -> Result<Self> {
        let (gamma_close, gamma_far) = (gamma(close)?, gamma(far)?);
        if gamma_far > gamma_close {
            return Err(Error::param("far context must not shrink less than the close one"));
        }
        Ok(PerceivedPair {
            close: simulate_perception(img, close)?,
            far: simulate_perception(img, far)?,
            gamma_close,
            gamma_far,
        })
    }
}

/// Visibility gap toward the original, attacker gap toward the decoy, and
/// their weighted sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapScores {
    pub gap1: f64,
    pub gap2: f64,
    pub score: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl GapScores {
    /// Builds from the four similarity values
    /// `(vsi_close, vsi_far, ssim_far, ssim_close)`.
    pub fn from_similarities(vsi_close: f64, vsi_far: f64, ssim_far: f64, ssim_close: f64, alpha: f64, beta: f64) -> Self {
        let gap1 = vsi_close - vsi_far;
        let gap2 = ssim_far - ssim_close;
        GapScores { gap1, gap2, score: alpha * gap1 + beta * gap2, alpha, beta }
    }
}

/// Scores a protected image against its original and decoy.
pub fn gap_scores(
    original: &PerceivedPair,
    decoy: &PerceivedPair,
    protected: &PerceivedPair,
    alpha: f64,
    beta: f64,
) -> Result<GapScores> {
    for (a, b) in [
        (&original.close, &protected.close),
        (&decoy.close, &protected.close),
        (&original.far, &protected.far),
        (&decoy.far, &protected.far),
    ] {
        a.same_dims(b)?;
    }
    let (vsi, ssim) = (Vsi::default(), MsSsim::default());
    Ok(GapScores::from_similarities(
        vsi.compare(&original.close, &protected.close)?,
        vsi.compare(&original.far, &protected.far)?,
        ssim.compare(&decoy.far, &protected.far)?,
        ssim.compare(&decoy.close, &protected.close)?,
        alpha,
        beta,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let g = GapScores::from_similarities(0.9, 0.4, 0.8, 0.3, 0.5, 0.5);
        assert!((g.gap1 - 0.5).abs() < 1e-15);
        assert!((g.gap2 - 0.5).abs() < 1e-15);
        assert!((g.score - 0.5).abs() < 1e-15);
        let same = GapScores::from_similarities(0.7, 0.7, 0.7, 0.7, 0.5, 0.5);
        assert_eq!(same.score, 0.0);
    }

    #[test]
    fn linear_in_weights() {
        let g = GapScores::from_similarities(0.93, 0.41, 0.77, 0.35, 0.3, 0.6);
        let d = GapScores::from_similarities(0.93, 0.41, 0.77, 0.35, 0.6, 1.2);
        assert_eq!(d.score, 2.0 * g.score);
    }

    #[test]
    fn serializes() {
        let g = GapScores::from_similarities(0.9, 0.4, 0.8, 0.3, 0.5, 0.5);
        let json = serde_json::to_string(&g).unwrap();
        assert!(json.contains("\"gap1\""));
        let back: GapScores = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }
}
