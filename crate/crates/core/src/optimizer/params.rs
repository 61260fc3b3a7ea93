use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One point of the search: decoy lightness and chroma, decoy blur kernel,
/// and original mask cell size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgnosticParams {
    pub decoy_l: f64,
    pub decoy_c: f64,
    pub kernel_size: u32,
    pub mask_area: u32,
}

impl AgnosticParams {
    /// Checks ranges for an `img_w` x `img_h` image whose smallest data
    /// mark spans `extent_min` pixels on its shorter side.
    pub fn validate(&self, img_w: u32, img_h: u32, extent_min: u32) -> Result<()> {
        if !(0.0..=100.0).contains(&self.decoy_l) || !(0.0..=100.0).contains(&self.decoy_c) {
            return Err(Error::param(format!("decoy L and C must lie in [0, 100], got {} and {}", self.decoy_l, self.decoy_c)));
        }
        if self.kernel_size % 2 == 0 || self.kernel_size > img_w.min(img_h) {
            return Err(Error::param(format!(
                "kernel size must be odd and at most {}, got {}",
                img_w.min(img_h),
                self.kernel_size
            )));
        }
        if self.mask_area == 0 || self.mask_area > extent_min.max(1) {
            return Err(Error::param(format!("mask area must lie in [1, {}], got {}", extent_min.max(1), self.mask_area)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StagePlan {
    SinglePass,
    /// After the grid, evaluate the winner's immediate neighborhood at half
    /// the grid spacing once.
    #[default]
    CoarseThenRefine,
}

/// Named grids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridPreset {
    /// L, C in steps of 10; six kernels; six mask sizes; refined once.
    Coarse,
    /// L, C in steps of 5; every odd kernel to 21; eight mask sizes.
    Fine,
    /// The finest published steps on a small window: L and C at 0.1 within
    /// 50 ± 0.5, every odd kernel to 31, every mask size to 16.
    PaperLiteralSubset,
}

impl GridPreset {
    pub const ALL: [GridPreset; 3] = [GridPreset::Coarse, GridPreset::Fine, GridPreset::PaperLiteralSubset];

    pub fn name(self) -> &'static str {
        match self {
            GridPreset::Coarse => "coarse",
            GridPreset::Fine => "fine",
            GridPreset::PaperLiteralSubset => "paper-literal-subset",
        }
    }
}

impl fmt::Display for GridPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GridPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GridPreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param(format!("unknown grid preset {s:?} (expected coarse, fine or paper-literal-subset)")))
    }
}

/// Cartesian search grid. Every list is strictly ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchGrid {
    pub l_values: Vec<f64>,
    pub c_values: Vec<f64>,
    pub k_values: Vec<u32>,
    pub m_values: Vec<u32>,
    #[serde(default)]
    pub stage_plan: StagePlan,
}

fn steps(lo: f64, hi: f64, step_tenths: i64) -> Vec<f64> {
    let (a, b) = ((lo * 10.0).round() as i64, (hi * 10.0).round() as i64);
    (a..=b).step_by(step_tenths as usize).map(|t| t as f64 / 10.0).collect()
}

impl SearchGrid {
    /// A preset sized for an `img_w` x `img_h` image whose smallest data
    /// mark spans `extent_min` pixels; kernel and mask lists are cut to
    /// range.
    pub fn preset(preset: GridPreset, img_w: u32, img_h: u32, extent_min: u32) -> SearchGrid {
        let k_cap = img_w.min(img_h);
        let m_cap = extent_min.max(1);
        let (l, k, m, plan): (Vec<f64>, Vec<u32>, Vec<u32>, StagePlan) = match preset {
            GridPreset::Coarse => (steps(0.0, 100.0, 100), vec![1, 5, 9, 13, 17, 21], vec![2, 4, 6, 8, 12, 16], StagePlan::CoarseThenRefine),
            GridPreset::Fine => (steps(0.0, 100.0, 50), (1..=21).step_by(2).collect(), vec![1, 2, 3, 4, 6, 8, 12, 16], StagePlan::SinglePass),
            GridPreset::PaperLiteralSubset => (
                steps(49.5, 50.5, 1),
                (1..=k_cap.min(31)).step_by(2).collect(),
                (1..=m_cap.min(16)).collect(),
                StagePlan::SinglePass,
            ),
        };
        let mut k: Vec<u32> = k.into_iter().filter(|&v| v <= k_cap).collect();
        if k.is_empty() {
            k.push(1);
        }
        let mut m: Vec<u32> = m.into_iter().filter(|&v| v <= m_cap).collect();
        if m.is_empty() {
            m.push(1);
        }
        SearchGrid { l_values: l.clone(), c_values: l, k_values: k, m_values: m, stage_plan: plan }
    }

    pub fn single(p: AgnosticParams) -> SearchGrid {
        SearchGrid {
            l_values: vec![p.decoy_l],
            c_values: vec![p.decoy_c],
            k_values: vec![p.kernel_size],
            m_values: vec![p.mask_area],
            stage_plan: StagePlan::SinglePass,
        }
    }

    pub fn len(&self) -> usize {
        self.l_values.len() * self.c_values.len() * self.k_values.len() * self.m_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self, img_w: u32, img_h: u32, extent_min: u32) -> Result<()> {
        if self.is_empty() {
            return Err(Error::param("search grid is empty"));
        }
        let ascending_f = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        let ascending_u = |v: &[u32]| v.windows(2).all(|w| w[0] < w[1]);
        if !ascending_f(&self.l_values) || !ascending_f(&self.c_values) || !ascending_u(&self.k_values) || !ascending_u(&self.m_values) {
            return Err(Error::param("search grid lists must be strictly ascending"));
        }
        // The corners bound every point.
        let lo = AgnosticParams { decoy_l: self.l_values[0], decoy_c: self.c_values[0], kernel_size: self.k_values[0], mask_area: self.m_values[0] };
        let hi = AgnosticParams {
            decoy_l: *self.l_values.last().unwrap(),
            decoy_c: *self.c_values.last().unwrap(),
            kernel_size: *self.k_values.last().unwrap(),
            mask_area: *self.m_values.last().unwrap(),
        };
        lo.validate(img_w, img_h, extent_min)?;
        hi.validate(img_w, img_h, extent_min)?;
        if let Some(k) = self.k_values.iter().find(|k| *k % 2 == 0) {
            return Err(Error::param(format!("kernel size must be odd, got {k}")));
        }
        Ok(())
    }

    /// All points, with mask area varying fastest, then kernel, then C, then L.
    pub fn points(&self) -> Vec<AgnosticParams> {
        let mut out = Vec::with_capacity(self.len());
        for &l in &self.l_values {
            for &c in &self.c_values {
                for &k in &self.k_values {
                    for &m in &self.m_values {
                        out.push(AgnosticParams { decoy_l: l, decoy_c: c, kernel_size: k, mask_area: m });
                    }
                }
            }
        }
        out
    }

    /// The single-pass grid around `at` (a point of this grid): on every
    /// axis, `at`'s value plus the midpoints toward its neighbors. L and C
    /// midpoints round to 0.1, kernel midpoints down to odd, mask midpoints
    /// down to integers.
    pub fn refine_around(&self, at: &AgnosticParams) -> SearchGrid {
        fn around<T: Copy + PartialEq + PartialOrd>(v: &[T], x: T, mid: impl Fn(T, T) -> T) -> Vec<T> {
            let i = v.iter().position(|&y| y == x).expect("refinement center lies on the grid");
            let mut out = Vec::with_capacity(3);
            if i > 0 {
                out.push(mid(v[i - 1], x));
            }
            out.push(x);
            if i + 1 < v.len() {
                out.push(mid(x, v[i + 1]));
            }
            out.dedup_by(|a, b| a == b);
            out
        }
        let mid_f = |a: f64, b: f64| ((a + b) * 5.0).round() / 10.0;
        let mid_odd = |a: u32, b: u32| {
            let m = (a + b) / 2;
            if m % 2 == 0 { m - 1 } else { m }
        };
        SearchGrid {
            l_values: around(&self.l_values, at.decoy_l, mid_f),
            c_values: around(&self.c_values, at.decoy_c, mid_f),
            k_values: around(&self.k_values, at.kernel_size, mid_odd),
            m_values: around(&self.m_values, at.mask_area, |a, b| (a + b) / 2),
            stage_plan: StagePlan::SinglePass,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_preset_shape() {
        let g = SearchGrid::preset(GridPreset::Coarse, 400, 400, 1000);
        assert_eq!(g.l_values.len(), 11);
        assert_eq!(g.l_values[3], 30.0);
        assert_eq!(g.len(), 11 * 11 * 6 * 6);
        g.validate(400, 400, 1000).unwrap();
        let small = SearchGrid::preset(GridPreset::Coarse, 12, 400, 7);
        assert_eq!(small.k_values, vec![1, 5, 9]);
        assert_eq!(small.m_values, vec![2, 4, 6]);
    }

    #[test]
    fn literal_subset_preset() {
        let g = SearchGrid::preset(GridPreset::PaperLiteralSubset, 400, 300, 1000);
        assert_eq!(g.l_values.len(), 11);
        assert_eq!(g.l_values[0], 49.5);
        assert_eq!(g.l_values[10], 50.5);
        assert_eq!(g.k_values.last(), Some(&31));
        assert_eq!(g.m_values, (1..=16).collect::<Vec<_>>());
        g.validate(400, 300, 1000).unwrap();
    }

    #[test]
    fn refinement_neighborhood() {
        let g = SearchGrid::preset(GridPreset::Coarse, 400, 400, 1000);
        let r = g.refine_around(&AgnosticParams { decoy_l: 30.0, decoy_c: 0.0, kernel_size: 5, mask_area: 16 });
        assert_eq!(r.l_values, vec![25.0, 30.0, 35.0]);
        assert_eq!(r.c_values, vec![0.0, 5.0]);
        assert_eq!(r.k_values, vec![3, 5, 7]);
        assert_eq!(r.m_values, vec![14, 16]);
        let r = g.refine_around(&AgnosticParams { decoy_l: 100.0, decoy_c: 50.0, kernel_size: 1, mask_area: 2 });
        assert_eq!(r.k_values, vec![1, 3]);
        assert_eq!(r.m_values, vec![2, 3]);
        assert_eq!(r.l_values, vec![95.0, 100.0]);
    }

    #[test]
    fn validation() {
        let mut g = SearchGrid::preset(GridPreset::Coarse, 400, 400, 1000);
        g.k_values = vec![1, 4];
        assert!(g.validate(400, 400, 1000).is_err());
        g.k_values = vec![5, 3];
        assert!(g.validate(400, 400, 1000).is_err());
        g.k_values = vec![];
        assert!(g.validate(400, 400, 1000).is_err());
        let p = AgnosticParams { decoy_l: 50.0, decoy_c: 50.0, kernel_size: 3, mask_area: 5 };
        assert!(p.validate(2, 2, 10).is_err());
        assert!(p.validate(10, 10, 4).is_err());
        assert!(AgnosticParams { decoy_l: 100.1, ..p }.validate(10, 10, 10).is_err());
        assert_eq!("fine".parse::<GridPreset>().unwrap(), GridPreset::Fine);
        assert!("nope".parse::<GridPreset>().is_err());
    }

    #[test]
    fn grid_from_toml() {
        let g: SearchGrid = toml::from_str("l_values = [40.0, 60.0]\nc_values = [10.0]\nk_values = [1, 3]\nm_values = [4]\nstage_plan = \"single-pass\"").unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.stage_plan, StagePlan::SinglePass);
        assert_eq!(g.points()[1], AgnosticParams { decoy_l: 40.0, decoy_c: 10.0, kernel_size: 3, mask_area: 4 });
    }
}
