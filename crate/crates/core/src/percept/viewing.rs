//! Viewing geometry and the distance-dependent downsampling factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageops::{resample, resample_many, RasterImage};

/// Default visual angles, in degrees.
pub const THETA_H_DEG: f64 = 40.0;
pub const THETA_W_DEG: f64 = 50.0;
/// Owner and shoulder-surfer distances, in centimeters.
pub const CLOSE_DISTANCE_CM: f64 = 30.0;
pub const FAR_DISTANCE_CM: f64 = 90.0;
/// Pixel density of a 6.67-inch 1080x2400 phone panel, px/cm.
pub const PHONE_DENSITY_PX_PER_CM: f64 = 155.55;
pub const PHONE_WIDTH_PX: u32 = 1080;

/// One observer looking at one image.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewingContext {
    pub distance_cm: f64,
    pub theta_h_deg: f64,
    pub theta_w_deg: f64,
    /// Image pixels per centimeter as displayed.
    pub display_density_px_per_cm: f64,
    pub image_width_px: u32,
    pub image_height_px: u32,
}

impl ViewingContext {
    pub fn validate(&self) -> Result<()> {
        let angle_ok = |t: f64| t > 0.0 && t < 180.0;
        if !(self.distance_cm > 0.0 && self.distance_cm.is_finite()) {
            return Err(Error::param(format!("viewing distance must be positive, got {}", self.distance_cm)));
        }
        if !angle_ok(self.theta_h_deg) || !angle_ok(self.theta_w_deg) {
            return Err(Error::param("visual angles must lie in (0, 180) degrees"));
        }
        if !(self.display_density_px_per_cm > 0.0 && self.display_density_px_per_cm.is_finite()) {
            return Err(Error::param("display density must be positive"));
        }
        if self.image_width_px == 0 || self.image_height_px == 0 {
            return Err(Error::param("image dimensions must be positive"));
        }
        Ok(())
    }

    /// Visual field `(H_v, W_v)` in image pixels.
    pub fn visual_field_px(&self) -> (f64, f64) {
        let span = |theta: f64| 2.0 * (theta.to_radians() / 2.0).tan() * self.distance_cm * self.display_density_px_per_cm;
        (span(self.theta_h_deg), span(self.theta_w_deg))
    }

    /// Unclamped `sqrt(H_i W_i / (H_v W_v))`.
    pub fn raw_gamma(&self) -> f64 {
        let (hv, wv) = self.visual_field_px();
        ((self.image_height_px as f64 * self.image_width_px as f64) / (hv * wv)).sqrt()
    }
}

/// Downsampling factor for a viewing context, clamped to at most 1.
pub fn gamma(ctx: &ViewingContext) -> Result<f64> {
    ctx.validate()?;
    Ok(ctx.raw_gamma().min(1.0))
}

/// The image as perceived from the context's distance.
pub fn simulate_perception(img: &RasterImage, ctx: &ViewingContext) -> Result<RasterImage> {
    check_dims(img, ctx)?;
    resample(img, gamma(ctx)?)
}

fn check_dims(img: &RasterImage, ctx: &ViewingContext) -> Result<()> {
    if (ctx.image_width_px, ctx.image_height_px) != img.dims() {
        return Err(Error::param(format!(
            "viewing context is for a {}x{} image, got {}x{}",
            ctx.image_width_px,
            ctx.image_height_px,
            img.width(),
            img.height()
        )));
    }
    Ok(())
}

/// The image as perceived from the close and far contexts; equal to two
/// [`simulate_perception`] calls but decodes the image once.
pub fn simulate_perception_pair(img: &RasterImage, close: &ViewingContext, far: &ViewingContext) -> Result<(RasterImage, RasterImage)> {
    check_dims(img, close)?;
    check_dims(img, far)?;
    let mut v = resample_many(img, &[gamma(close)?, gamma(far)?])?;
    let far_img = v.pop().expect("two outputs");
    Ok((v.pop().expect("two outputs"), far_img))
}

/// Observer and display settings shared by the close and far conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ViewingConfig {
    pub close_cm: f64,
    pub far_cm: f64,
    pub theta_h_deg: f64,
    pub theta_w_deg: f64,
    /// Physical pixel density of the display, px/cm.
    pub display_density_px_per_cm: f64,
    /// Width in display pixels at which the chart is shown. The chart is
    /// scaled to this width, so its effective density is
    /// `display_density * image_width / displayed_width_px`. `None` shows
    /// the chart 1:1.
    pub displayed_width_px: Option<u32>,
}

impl Default for ViewingConfig {
    fn default() -> Self {
        ViewingConfig {
            close_cm: CLOSE_DISTANCE_CM,
            far_cm: FAR_DISTANCE_CM,
            theta_h_deg: THETA_H_DEG,
            theta_w_deg: THETA_W_DEG,
            display_density_px_per_cm: PHONE_DENSITY_PX_PER_CM,
            displayed_width_px: Some(PHONE_WIDTH_PX),
        }
    }
}

impl ViewingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.close_cm > 0.0 && self.far_cm > self.close_cm) {
            return Err(Error::param(format!(
                "distances must satisfy 0 < close < far, got close={} far={}",
                self.close_cm, self.far_cm
            )));
        }
        if self.displayed_width_px == Some(0) {
            return Err(Error::param("displayed width must be positive"));
        }
        self.context(self.close_cm, 1, 1).validate()
    }

    /// Context for an image of the given size at an arbitrary distance.
    pub fn context(&self, distance_cm: f64, width: u32, height: u32) -> ViewingContext {
        let density = match self.displayed_width_px {
            Some(shown) if shown > 0 => self.display_density_px_per_cm * width as f64 / shown as f64,
            _ => self.display_density_px_per_cm,
        };
        ViewingContext {
            distance_cm,
            theta_h_deg: self.theta_h_deg,
            theta_w_deg: self.theta_w_deg,
            display_density_px_per_cm: density,
            image_width_px: width,
            image_height_px: height,
        }
    }

    pub fn close(&self, width: u32, height: u32) -> ViewingContext {
        self.context(self.close_cm, width, height)
    }

    pub fn far(&self, width: u32, height: u32) -> ViewingContext {
        self.context(self.far_cm, width, height)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn phone(d: f64) -> ViewingContext {
        ViewingContext {
            distance_cm: d,
            theta_h_deg: 40.0,
            theta_w_deg: 50.0,
            display_density_px_per_cm: PHONE_DENSITY_PX_PER_CM,
            image_width_px: 1080,
            image_height_px: 2400,
        }
    }

    #[test]
    fn close_and_far_on_the_study_phone() {
        // Independent closed form: sqrt(1080*2400 / (2 tan20° 30ρ · 2 tan25° 30ρ)).
        let rho = 155.55f64;
        let hv = 2.0 * 20f64.to_radians().tan() * 30.0 * rho;
        let wv = 2.0 * 25f64.to_radians().tan() * 30.0 * rho;
        let expected30 = (1080.0 * 2400.0 / (hv * wv)).sqrt();
        let g30 = gamma(&phone(30.0)).unwrap();
        let g90 = gamma(&phone(90.0)).unwrap();
        assert!(((g30 - expected30) / expected30).abs() < 1e-9);
        assert!(((g90 - expected30 / 3.0) / g90).abs() < 1e-9);
        assert!(g90 < g30);
        assert!((g30 - 0.418723).abs() < 1e-6, "{g30}");
    }

    #[test]
    fn limits() {
        assert_eq!(gamma(&phone(0.5)).unwrap(), 1.0);
        assert!(gamma(&phone(1e9)).unwrap() < 1e-6);
        assert!(gamma(&phone(0.0)).is_err());
        let mut bad = phone(30.0);
        bad.theta_h_deg = 180.0;
        assert!(gamma(&bad).is_err());
    }

    #[test]
    fn perception_sizes_shrink_with_distance() {
        let cfg = ViewingConfig::default();
        let img = RasterImage::filled(360, 270, [200, 10, 10, 255]).unwrap();
        let near = simulate_perception(&img, &cfg.close(360, 270)).unwrap();
        let far = simulate_perception(&img, &cfg.far(360, 270)).unwrap();
        assert!(far.width() < near.width() && far.height() < near.height());
        let again = simulate_perception(&img, &cfg.close(360, 270)).unwrap();
        assert_eq!(again, near);
        let mut tiny = cfg;
        tiny.close_cm = 1.0;
        assert_eq!(simulate_perception(&img, &tiny.close(360, 270)).unwrap(), img);
        assert!(simulate_perception(&img, &cfg.close(100, 100)).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(ViewingConfig::default().validate().is_ok());
        let swapped = ViewingConfig { close_cm: 90.0, far_cm: 30.0, ..Default::default() };
        assert!(swapped.validate().is_err());
    }

    proptest! {
        #[test]
        fn strictly_decreasing_in_distance(d in 1.0f64..500.0, step in 0.01f64..100.0) {
            let a = phone(d).raw_gamma();
            let b = phone(d + step).raw_gamma();
            prop_assert!(b < a);
        }

        // Same physical image size: more pixels at proportionally higher density.
        #[test]
        fn invariant_under_joint_resolution_scaling(d in 5.0f64..200.0, s in 0.25f64..4.0) {
            let base = phone(d);
            let w = (1080.0 * s).round();
            let h = (2400.0 * s).round();
            let scaled = ViewingContext {
                image_width_px: w as u32,
                image_height_px: h as u32,
                display_density_px_per_cm: base.display_density_px_per_cm * w / 1080.0,
                ..base
            };
            let expected = base.raw_gamma() * (h / 2400.0 / (w / 1080.0)).sqrt();
            prop_assert!((scaled.raw_gamma() - expected).abs() / expected < 1e-12);
        }
    }
}
