use serde::{Deserialize, Serialize};

use super::DecoyGeometry;
use crate::chartgen::{GeometrySet, Mark};
use crate::imageops::{circular_mean_hue, hue_distance, srgb_to_lch};

/// Originals whose hues all lie within this many degrees of each other count
/// as single-hue.
pub const SINGLE_HUE_SPREAD: f64 = 5.0;

/// Hue per decoy mark, in degrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HuePlan {
    pub hues: Vec<f64>,
    pub single_hue: bool,
}

fn angular_gap(a: f64, b: f64) -> f64 {
    hue_distance(a, b)
}

/// Plans decoy hues from explicit original hues (`orig_hues[i]` belongs to
/// `orig[i]`).
///
/// Single-hue originals give every decoy that hue. Otherwise each decoy
/// takes the circular mean of its two nearest originals: nearest by center
/// distance, or for pie slices by mid-angle. Ties go to the lower index.
pub fn plan_decoy_hues(orig: &[Mark], orig_hues: &[f64], decoy: &[Mark]) -> HuePlan {
    assert_eq!(orig.len(), orig_hues.len(), "one hue per original mark");
    if orig.is_empty() {
        return HuePlan { hues: vec![0.0; decoy.len()], single_hue: true };
    }
    let single = orig_hues.iter().all(|&a| orig_hues.iter().all(|&b| hue_distance(a, b) < SINGLE_HUE_SPREAD));
    if single {
        let h = circular_mean_hue(orig_hues).expect("non-empty").hue;
        return HuePlan { hues: vec![h; decoy.len()], single_hue: true };
    }
    let hues = decoy
        .iter()
        .map(|d| {
            let dist = |o: &Mark| match (d, o) {
                (Mark::Slice(a), Mark::Slice(b)) => angular_gap(a.mid_angle(), b.mid_angle()),
                _ => {
                    let (p, q) = (d.center(), o.center());
                    (p.0 - q.0).hypot(p.1 - q.1)
                }
            };
            let mut order: Vec<(f64, usize)> = orig.iter().enumerate().map(|(i, o)| (dist(o), i)).collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let near: Vec<f64> = order.iter().take(2).map(|&(_, i)| orig_hues[i]).collect();
            circular_mean_hue(&near).expect("non-empty").hue
        })
        .collect();
    HuePlan { hues, single_hue: false }
}

/// Plans decoy hues from the colors of the original's data marks.
pub fn plan_decoy_colors(orig: &GeometrySet, decoy: &DecoyGeometry) -> HuePlan {
    let marks: Vec<Mark> = orig.data_marks().cloned().collect();
    let hues: Vec<f64> = marks.iter().map(|m| srgb_to_lch(m.color()).h).collect();
    plan_decoy_hues(&marks, &hues, &decoy.marks)
}
