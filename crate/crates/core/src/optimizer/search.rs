use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::layers::{build_candidate, decoy_layer, OriginalLayer};
use super::params::{AgnosticParams, SearchGrid, StagePlan};
use crate::chartgen::GeometrySet;
use crate::decoy::{DecoyGeometry, HuePlan};
use crate::error::{Error, Result};
use crate::imageops::{composite, flatten, RasterImage, Srgb};
use crate::percept::{gamma, gap_scores, simulate_perception, simulate_perception_pair, GapScores, MsSsim, PerceivedPair, ViewingContext, Vsi, VsiPrepared};

/// Largest grid the oracle will enumerate.
pub const ORACLE_MAX_POINTS: usize = 1000;

/// Viewing contexts and score weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub close: ViewingContext,
    pub far: ViewingContext,
    pub alpha: f64,
    pub beta: f64,
}

impl Objective {
    fn validate(&self, img: &RasterImage) -> Result<()> {
        for ctx in [&self.close, &self.far] {
            if (ctx.image_width_px, ctx.image_height_px) != img.dims() {
                return Err(Error::param("viewing contexts must describe the original image"));
            }
        }
        if gamma(&self.far)? > gamma(&self.close)? {
            return Err(Error::param("far context must not shrink less than the close one"));
        }
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(Error::param("score weights must be finite"));
        }
        Ok(())
    }
}

/// Everything a search holds fixed.
#[derive(Clone, Copy, Debug)]
pub struct SearchInputs<'a> {
    pub orig_img: &'a RasterImage,
    pub orig_geom: &'a GeometrySet,
    pub decoy: &'a DecoyGeometry,
    pub hues: &'a HuePlan,
    pub background: Srgb,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoredCandidate {
    pub params: AgnosticParams,
    pub scores: GapScores,
    /// The protected composite at native resolution.
    pub protected_image: RasterImage,
}

/// Original, decoy and protected images with their perceived renditions.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtectedBundle {
    pub original: RasterImage,
    /// Blurred, colored decoy flattened on the background.
    pub decoy: RasterImage,
    pub protected: RasterImage,
    pub best: ScoredCandidate,
    pub preview_original: PerceivedPair,
    pub preview_decoy: PerceivedPair,
    pub preview_protected: PerceivedPair,
    /// Number of distinct candidates scored.
    pub evaluated: usize,
}

/// Scores a protected image against the original and decoy as seen from
/// both distances.
pub fn evaluate_candidate(
    orig_img: &RasterImage,
    decoy_flat: &RasterImage,
    protected: &RasterImage,
    close: &ViewingContext,
    far: &ViewingContext,
    alpha: f64,
    beta: f64,
) -> Result<GapScores> {
    let o = PerceivedPair::new(orig_img, close, far)?;
    let d = PerceivedPair::new(decoy_flat, close, far)?;
    let p = PerceivedPair::new(protected, close, far)?;
    gap_scores(&o, &d, &p, alpha, beta)
}

/// Selection order: higher score, then smaller kernel, larger mask cell,
/// L nearer 50, C nearer 50, smaller L, smaller C. `Less` means `a` wins.
pub fn preference(a: (&AgnosticParams, &GapScores), b: (&AgnosticParams, &GapScores)) -> Ordering {
    let (pa, pb) = (a.0, b.0);
    b.1.score
        .total_cmp(&a.1.score)
        .then(pa.kernel_size.cmp(&pb.kernel_size))
        .then(pb.mask_area.cmp(&pa.mask_area))
        .then((pa.decoy_l - 50.0).abs().total_cmp(&(pb.decoy_l - 50.0).abs()))
        .then((pa.decoy_c - 50.0).abs().total_cmp(&(pb.decoy_c - 50.0).abs()))
        .then(pa.decoy_l.total_cmp(&pb.decoy_l))
        .then(pa.decoy_c.total_cmp(&pb.decoy_c))
}

type Key = (u64, u64, u32, u32);

fn key(p: &AgnosticParams) -> Key {
    (p.decoy_l.to_bits(), p.decoy_c.to_bits(), p.kernel_size, p.mask_area)
}

/// Shared, read-only state of one search: the original's prepared
/// perceptions and the masked original layers.
struct Evaluator<'a> {
    inputs: SearchInputs<'a>,
    objective: Objective,
    vsi: Vsi,
    ssim: MsSsim,
    orig_close: VsiPrepared,
    orig_far: VsiPrepared,
    original: OriginalLayer,
    masked: BTreeMap<u32, RasterImage>,
}

impl<'a> Evaluator<'a> {
    fn new(inputs: SearchInputs<'a>, objective: Objective) -> Result<Self> {
        let (vsi, ssim) = (Vsi::default(), MsSsim::default());
        let orig_close = vsi.prepare(&simulate_perception(inputs.orig_img, &objective.close)?)?;
        let orig_far = vsi.prepare(&simulate_perception(inputs.orig_img, &objective.far)?)?;
        let original = OriginalLayer::new(inputs.orig_img, inputs.orig_geom, inputs.background)?;
        Ok(Evaluator { inputs, objective, vsi, ssim, orig_close, orig_far, original, masked: BTreeMap::new() })
    }

    fn ensure_masks(&mut self, points: &[AgnosticParams]) -> Result<()> {
        for p in points {
            if !self.masked.contains_key(&p.mask_area) {
                self.masked.insert(p.mask_area, self.original.masked(p.mask_area)?);
            }
        }
        Ok(())
    }

    /// Scores points sharing one decoy layer. The similarity calls mirror
    /// [`gap_scores`] exactly, so results are bit-identical to
    /// [`evaluate_candidate`].
    fn score_group(&self, l: f64, c: f64, k: u32, masks: &[u32]) -> Result<Vec<(AgnosticParams, GapScores)>> {
        let o = &self.objective;
        let layer = decoy_layer(self.inputs.decoy, self.inputs.hues, l, c, k)?;
        let flat = flatten(self.inputs.background, &layer);
        let (flat_close, flat_far) = simulate_perception_pair(&flat, &o.close, &o.far)?;
        let (decoy_close, decoy_far) = (self.ssim.prepare(&flat_close)?, self.ssim.prepare(&flat_far)?);
        masks
            .iter()
            .map(|&m| {
                let protected = composite(self.inputs.background, &layer, &self.masked[&m])?;
                let (p_close, p_far) = simulate_perception_pair(&protected, &o.close, &o.far)?;
                let scores = GapScores::from_similarities(
                    self.vsi.compare_with(&self.orig_close, &p_close)?,
                    self.vsi.compare_with(&self.orig_far, &p_far)?,
                    self.ssim.compare_prepared(&decoy_far, &self.ssim.prepare(&p_far)?)?,
                    self.ssim.compare_prepared(&decoy_close, &self.ssim.prepare(&p_close)?)?,
                    o.alpha,
                    o.beta,
                );
                Ok((AgnosticParams { decoy_l: l, decoy_c: c, kernel_size: k, mask_area: m }, scores))
            })
            .collect()
    }

    fn score_points(&mut self, points: &[AgnosticParams], parallel: bool) -> Result<Vec<(AgnosticParams, GapScores)>> {
        self.ensure_masks(points)?;
        let mut groups: BTreeMap<(u64, u64, u32), Vec<u32>> = BTreeMap::new();
        for p in points {
            groups.entry((p.decoy_l.to_bits(), p.decoy_c.to_bits(), p.kernel_size)).or_default().push(p.mask_area);
        }
        let groups: Vec<_> = groups.into_iter().collect();
        let this = &*self;
        let run = |((l, c, k), masks): &((u64, u64, u32), Vec<u32>)| this.score_group(f64::from_bits(*l), f64::from_bits(*c), *k, masks);
        let nested: Vec<Result<Vec<_>>> = if parallel { groups.par_iter().map(run).collect() } else { groups.iter().map(run).collect() };
        let mut out = Vec::with_capacity(points.len());
        for g in nested {
            out.extend(g?);
        }
        Ok(out)
    }
}

fn best_of(scored: &[(AgnosticParams, GapScores)]) -> (AgnosticParams, GapScores) {
    *scored.iter().min_by(|a, b| preference((&a.0, &a.1), (&b.0, &b.1))).expect("non-empty")
}

fn check_inputs(inputs: &SearchInputs, grid: &SearchGrid, objective: &Objective) -> Result<()> {
    objective.validate(inputs.orig_img)?;
    let (w, h) = inputs.orig_img.dims();
    let (vw, vh) = inputs.orig_geom.element_extent;
    grid.validate(w, h, vw.min(vh))
}

/// Exhaustive search over `grid`, plus one refinement pass around the
/// winner when the grid asks for it. Every point is scored independently,
/// so `parallel` changes speed only.
pub fn optimize(inputs: &SearchInputs, grid: &SearchGrid, objective: &Objective, parallel: bool) -> Result<ProtectedBundle> {
    check_inputs(inputs, grid, objective)?;
    let mut ev = Evaluator::new(*inputs, *objective)?;
    let mut scored = ev.score_points(&grid.points(), parallel)?;
    if grid.stage_plan == StagePlan::CoarseThenRefine {
        let seen: std::collections::HashSet<Key> = scored.iter().map(|s| key(&s.0)).collect();
        let extra: Vec<AgnosticParams> = grid.refine_around(&best_of(&scored).0).points().into_iter().filter(|p| !seen.contains(&key(p))).collect();
        scored.extend(ev.score_points(&extra, parallel)?);
    }
    let (params, scores) = best_of(&scored);
    let (protected, decoy) = build_candidate(inputs.orig_img, inputs.orig_geom, inputs.decoy, inputs.hues, &params, inputs.background)?;
    let o = objective;
    Ok(ProtectedBundle {
        preview_original: PerceivedPair::new(inputs.orig_img, &o.close, &o.far)?,
        preview_decoy: PerceivedPair::new(&decoy, &o.close, &o.far)?,
        preview_protected: PerceivedPair::new(&protected, &o.close, &o.far)?,
        original: inputs.orig_img.clone(),
        decoy,
        protected: protected.clone(),
        best: ScoredCandidate { params, scores, protected_image: protected },
        evaluated: scored.len(),
    })
}

fn enumerate(inputs: &SearchInputs, points: &[AgnosticParams], o: &Objective) -> Result<Vec<ScoredCandidate>> {
    points
        .iter()
        .map(|p| {
            let (protected, flat) = build_candidate(inputs.orig_img, inputs.orig_geom, inputs.decoy, inputs.hues, p, inputs.background)?;
            let scores = evaluate_candidate(inputs.orig_img, &flat, &protected, &o.close, &o.far, o.alpha, o.beta)?;
            Ok(ScoredCandidate { params: *p, scores, protected_image: protected })
        })
        .collect()
}

/// Reference implementation of [`optimize`]: builds and scores every
/// candidate from scratch, without caching, and returns them all sorted
/// best first. Refinement, when requested, follows the head of the sorted
/// grid results.
pub fn oracle_enumerate(inputs: &SearchInputs, grid: &SearchGrid, objective: &Objective) -> Result<Vec<ScoredCandidate>> {
    if grid.len() > ORACLE_MAX_POINTS {
        return Err(Error::param(format!("oracle grid has {} points; the limit is {ORACLE_MAX_POINTS}", grid.len())));
    }
    check_inputs(inputs, grid, objective)?;
    let sort = |v: &mut Vec<ScoredCandidate>| v.sort_by(|a, b| preference((&a.params, &a.scores), (&b.params, &b.scores)));
    let mut all = enumerate(inputs, &grid.points(), objective)?;
    sort(&mut all);
    if grid.stage_plan == StagePlan::CoarseThenRefine {
        let refine = grid.refine_around(&all[0].params);
        let extra: Vec<AgnosticParams> = refine.points().into_iter().filter(|p| all.iter().all(|c| key(&c.params) != key(p))).collect();
        all.extend(enumerate(inputs, &extra, objective)?);
        sort(&mut all);
    }
    Ok(all)
}
