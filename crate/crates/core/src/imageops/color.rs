//! sRGB, linear light and CIE LCH(ab) conversions.
//!
//! Lab uses the D65 white point and the 2° standard observer. All 8-bit
//! encodes in the crate go through [`encode_linear`] so that decoding and
//! re-encoding an 8-bit value is always the identity.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::raster::Srgb;
use crate::error::{Error, Result};

/// D65 reference white in XYZ (Y normalized to 1).
const WHITE_D65: [f64; 3] = [0.95047, 1.0, 1.08883];

const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

const LAB_EPSILON: f64 = 216.0 / 24389.0;
const LAB_DELTA: f64 = 6.0 / 29.0;

/// Tolerance for calling a linear channel outside [0, 1] out of gamut.
const GAMUT_EPS: f64 = 1e-9;

/// A color in cylindrical CIE Lab: lightness, chroma, hue in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LchColor {
    pub l: f64,
    pub c: f64,
    pub h: f64,
}

impl LchColor {
    /// Clamps `l` to [0, 100], `c` to ≥ 0 and wraps `h` into [0, 360).
    pub fn new(l: f64, c: f64, h: f64) -> Self {
        LchColor {
            l: l.clamp(0.0, 100.0),
            c: c.max(0.0),
            h: normalize_degrees(h),
        }
    }
}

/// sRGB transfer function, continuous form.
pub fn srgb_eotf(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

pub fn srgb_oetf(v: f64) -> f64 {
    if v <= 0.0031308 {
        12.92 * v
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

fn decode_table() -> &'static [f64; 256] {
    static TABLE: OnceLock<[f64; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; 256];
        for (i, v) in t.iter_mut().enumerate() {
            *v = srgb_eotf(i as f64 / 255.0);
        }
        t
    })
}

// Linear-light decision boundaries between adjacent 8-bit codes.
fn encode_thresholds() -> &'static [f64; 255] {
    static TABLE: OnceLock<[f64; 255]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; 255];
        for (i, v) in t.iter_mut().enumerate() {
            *v = srgb_eotf((i as f64 + 0.5) / 255.0);
        }
        t
    })
}

/// 8-bit sRGB code to linear light in [0, 1].
#[inline]
pub fn decode_u8(c: u8) -> f64 {
    decode_table()[c as usize]
}

/// Linear light to the nearest 8-bit sRGB code, i.e. `round(255 * oetf(v))`
/// evaluated with a threshold table; out-of-range input saturates.
#[inline]
pub fn encode_linear(v: f64) -> u8 {
    encode_thresholds().partition_point(|&t| t <= v) as u8
}

pub fn linear_rgb(c: Srgb) -> [f64; 3] {
    [decode_u8(c.0[0]), decode_u8(c.0[1]), decode_u8(c.0[2])]
}

// Exact numerical inverse of RGB_TO_XYZ, so that in-gamut round trips do not
// pick up the rounding of a separately published inverse matrix.
fn xyz_to_rgb() -> &'static [[f64; 3]; 3] {
    static INV: OnceLock<[[f64; 3]; 3]> = OnceLock::new();
    INV.get_or_init(|| {
        let m = RGB_TO_XYZ;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let adj = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        let det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
        adj.map(|row| row.map(|v| v / det))
    })
}

fn mat_mul(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn lab_f(t: f64) -> f64 {
    if t > LAB_EPSILON {
        t.cbrt()
    } else {
        t / (3.0 * LAB_DELTA * LAB_DELTA) + 4.0 / 29.0
    }
}

fn lab_f_inv(t: f64) -> f64 {
    if t > LAB_DELTA {
        t * t * t
    } else {
        3.0 * LAB_DELTA * LAB_DELTA * (t - 4.0 / 29.0)
    }
}

/// CIE Lab from linear RGB.
pub fn linear_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let xyz = mat_mul(&RGB_TO_XYZ, rgb);
    let fx = lab_f(xyz[0] / WHITE_D65[0]);
    let fy = lab_f(xyz[1] / WHITE_D65[1]);
    let fz = lab_f(xyz[2] / WHITE_D65[2]);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

pub fn lab_to_linear(lab: [f64; 3]) -> [f64; 3] {
    let fy = (lab[0] + 16.0) / 116.0;
    let fx = fy + lab[1] / 500.0;
    let fz = fy - lab[2] / 200.0;
    let xyz = [
        WHITE_D65[0] * lab_f_inv(fx),
        WHITE_D65[1] * lab_f_inv(fy),
        WHITE_D65[2] * lab_f_inv(fz),
    ];
    mat_mul(xyz_to_rgb(), xyz)
}

pub fn srgb_to_lch(c: Srgb) -> LchColor {
    let [l, a, b] = linear_to_lab(linear_rgb(c));
    LchColor {
        l,
        c: a.hypot(b),
        h: normalize_degrees(b.atan2(a).to_degrees()),
    }
}

/// Converts back to 8-bit sRGB. The flag is `true` when the exact color lies
/// outside the sRGB gamut and channels were clipped.
pub fn lch_to_srgb(c: LchColor) -> (Srgb, bool) {
    let lab = [c.l, c.c * cosd(c.h), c.c * sind(c.h)];
    let lin = lab_to_linear(lab);
    let clipped = lin.iter().any(|&v| !(-GAMUT_EPS..=1.0 + GAMUT_EPS).contains(&v));
    (Srgb([encode_linear(lin[0]), encode_linear(lin[1]), encode_linear(lin[2])]), clipped)
}

pub fn normalize_degrees(h: f64) -> f64 {
    let r = h.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs.
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Sine of an angle in degrees, exact at multiples of 90°.
pub fn sind(deg: f64) -> f64 {
    let (q, r) = quadrant(deg);
    match q {
        0 => r.to_radians().sin(),
        1 => r.to_radians().cos(),
        2 => -r.to_radians().sin(),
        _ => -r.to_radians().cos(),
    }
}

/// Cosine of an angle in degrees, exact at multiples of 90°.
pub fn cosd(deg: f64) -> f64 {
    let (q, r) = quadrant(deg);
    match q {
        0 => r.to_radians().cos(),
        1 => -r.to_radians().sin(),
        2 => -r.to_radians().cos(),
        _ => r.to_radians().sin(),
    }
}

// Splits `deg` into a quadrant count and a remainder in [-45, 45].
fn quadrant(deg: f64) -> (u8, f64) {
    let d = deg.rem_euclid(360.0);
    let q = (d / 90.0).round();
    let r = d - q * 90.0;
    ((q as i64).rem_euclid(4) as u8, r)
}

/// Result of a circular mean over hues.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HueMean {
    pub hue: f64,
    /// Set when the resultant vector vanished; `hue` is then the first input.
    pub undefined: bool,
}

/// Circular mean of hue angles in degrees, in [0, 360).
pub fn circular_mean_hue(hues: &[f64]) -> Result<HueMean> {
    let first = *hues
        .first()
        .ok_or_else(|| Error::param("circular mean of an empty hue list"))?;
    let n = hues.len() as f64;
    let s = hues.iter().map(|&h| sind(h)).sum::<f64>() / n;
    let c = hues.iter().map(|&h| cosd(h)).sum::<f64>() / n;
    if s.hypot(c) < 1e-9 {
        return Ok(HueMean {
            hue: normalize_degrees(first),
            undefined: true,
        });
    }
    Ok(HueMean {
        hue: normalize_degrees(s.atan2(c).to_degrees()),
        undefined: false,
    })
}

/// Smallest angular distance between two hues, in [0, 180].
pub fn hue_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}
