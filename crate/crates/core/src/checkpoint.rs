//! Checkpoint placement and checkpoint-filtered discovery.
//!
//! Checkpoints are spaced δ apart, so every run of length ≥ δ contains at
//! least one of them. Candidates are filtered only at checkpoints and then
//! verified in both directions, with an early probe at `start + δ - 1` that
//! discards runs which cannot reach δ.
//!
//! A run that contains the previous checkpoint was already verified there.
//! Backward scans therefore stop at the previous checkpoint, which also
//! keeps each result from being re-derived at every checkpoint it spans.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bins::{bin_number, BinIndex};
use crate::error::{Error, Result};
use crate::expand::{dominated, Expansion, Group};
use crate::model::{within, BundleMatch, Dataset, Interval, PairMatch, Params, SeriesId};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckpointPlan {
    pub checkpoints: Vec<usize>,
    pub shift: usize,
    pub cost: f64,
}

/// `{s, s + δ, s + 2δ, ...} ∩ [0, k)`.
pub fn checkpoints_for_shift(k: usize, delta: usize, shift: usize) -> Result<Vec<usize>> {
    if delta == 0 || delta > k {
        return Err(Error::Argument(format!(
            "delta must lie in [1, k={k}], got {delta}"
        )));
    }
    if shift >= delta {
        return Err(Error::Argument(format!(
            "shift {shift} must be smaller than delta {delta}"
        )));
    }
    let cps: Vec<usize> = (shift..k).step_by(delta).collect();
    Ok(restore_covering(cps, k, delta))
}

/// Whether every window of `delta` consecutive timestamps in `[0, k)`
/// contains a checkpoint.
pub fn is_covering(checkpoints: &[usize], k: usize, delta: usize) -> bool {
    if delta == 0 || delta > k {
        return false;
    }
    let mut prev: Option<usize> = None;
    for &c in checkpoints {
        let gap_ok = match prev {
            None => c < delta,
            Some(p) => c > p && c - p <= delta,
        };
        if !gap_ok || c >= k {
            return false;
        }
        prev = Some(c);
    }
    matches!(prev, Some(last) if last + delta >= k)
}

/// Inserts extra checkpoints wherever a gap would let a δ-window slip
/// through. Arithmetic progressions with `shift < δ` already cover.
pub fn restore_covering(mut checkpoints: Vec<usize>, k: usize, delta: usize) -> Vec<usize> {
    checkpoints.retain(|&c| c < k);
    checkpoints.sort_unstable();
    checkpoints.dedup();
    if delta == 0 || k == 0 {
        return checkpoints;
    }
    let mut out = Vec::with_capacity(checkpoints.len() + 2);
    // Earliest window [next, next + δ) not yet covered starts at `next`.
    let mut next = 0usize;
    for c in checkpoints {
        while c >= next + delta {
            out.push(next + delta - 1);
            next += delta;
        }
        out.push(c);
        next = c + 1;
    }
    while next + delta <= k {
        out.push(next + delta - 1);
        next += delta;
    }
    out
}

/// Largest bin cardinality at every timestamp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityProfile {
    n: usize,
    max_bin: Vec<usize>,
}

impl DensityProfile {
    pub fn from_index(idx: &BinIndex, n: usize) -> Result<Self> {
        let max_bin = (0..idx.k())
            .map(|t| idx.max_bin_cardinality(t))
            .collect::<Result<_>>()?;
        Ok(DensityProfile { n, max_bin })
    }

    /// Computes the profile straight from the data without sorting values.
    pub fn compute(ds: &Dataset, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Argument(format!(
                "bin width must be positive and finite, got {epsilon}"
            )));
        }
        let (origin, max) = ds.value_range();
        let top = bin_number(max, origin, epsilon);
        let n = ds.n();
        let mut zs: Vec<i64> = vec![0; n];
        let dense = top >= 0 && (top as u64) < 4 * n as u64 + 64;
        let mut counts = if dense { vec![0u32; top as usize + 1] } else { Vec::new() };
        let mut max_bin = Vec::with_capacity(ds.k());
        for t in 0..ds.k() {
            for (s, z) in zs.iter_mut().enumerate() {
                *z = bin_number(ds.value(s, t), origin, epsilon);
            }
            let best = if dense {
                counts.iter_mut().for_each(|c| *c = 0);
                let mut best = 0;
                for &z in &zs {
                    let c = &mut counts[z as usize];
                    *c += 1;
                    best = best.max(*c as usize);
                }
                best
            } else {
                zs.sort_unstable();
                zs.chunk_by(|a, b| a == b).map(<[i64]>::len).max().unwrap_or(0)
            };
            max_bin.push(best);
        }
        Ok(DensityProfile { n, max_bin })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.max_bin.len()
    }

    pub fn max_bin(&self) -> &[usize] {
        &self.max_bin
    }

    fn total(&self, checkpoints: &[usize]) -> u64 {
        checkpoints.iter().map(|&c| self.max_bin[c] as u64).sum()
    }
}

/// Sum over checkpoints of the largest bin's share of the `n` series.
pub fn placement_cost(profile: &DensityProfile, checkpoints: &[usize]) -> Result<f64> {
    if checkpoints.is_empty() {
        return Err(Error::Argument("placement cost of an empty checkpoint list".into()));
    }
    if let Some(&c) = checkpoints.iter().find(|&&c| c >= profile.k()) {
        return Err(Error::Index(format!(
            "checkpoint {c} out of range for k={}",
            profile.k()
        )));
    }
    Ok(profile.total(checkpoints) as f64 / profile.n as f64)
}

/// Tries every shift `0..δ` and keeps the cheapest; ties go to the smaller
/// shift.
pub fn optimize_placement(profile: &DensityProfile, delta: usize) -> Result<CheckpointPlan> {
    let k = profile.k();
    let mut best: Option<(u64, usize, Vec<usize>)> = None;
    for shift in 0..delta {
        let cps = checkpoints_for_shift(k, delta, shift)?;
        let total = profile.total(&cps);
        if best.as_ref().is_none_or(|(b, _, _)| total < *b) {
            best = Some((total, shift, cps));
        }
    }
    let (total, shift, checkpoints) =
        best.ok_or_else(|| Error::Argument("delta must be at least 1".into()))?;
    Ok(CheckpointPlan {
        checkpoints,
        shift,
        cost: total as f64 / profile.n as f64,
    })
}

fn plan_for(ds: &Dataset, params: &Params) -> Result<CheckpointPlan> {
    let profile = DensityProfile::compute(ds, params.epsilon)?;
    optimize_placement(&profile, params.delta)
}

fn check_plan(ds: &Dataset, params: &Params, plan: &CheckpointPlan) -> Result<()> {
    if !is_covering(&plan.checkpoints, ds.k(), params.delta) {
        return Err(Error::Argument(format!(
            "checkpoints do not cover every window of {} timestamps",
            params.delta
        )));
    }
    Ok(())
}

/// Lowest admissible start for runs discovered at checkpoint index `i`.
fn floor_of(checkpoints: &[usize], i: usize) -> usize {
    if i == 0 {
        0
    } else {
        checkpoints[i - 1] + 1
    }
}

/// Two-way verification of a pair known to qualify at `c`. Returns `None`
/// if the run is shorter than δ or extends back below `floor`.
fn two_way_pair(
    ds: &Dataset,
    a: SeriesId,
    b: SeriesId,
    c: usize,
    delta: usize,
    epsilon: f64,
    floor: usize,
) -> Option<Interval> {
    let (xa, xb) = (ds.series(a), ds.series(b));
    let ok = |t: usize| within(xa[t], xb[t], epsilon);
    let k = ds.k();

    let mut start = c;
    while start > 0 && ok(start - 1) {
        if start - 1 < floor {
            return None;
        }
        start -= 1;
    }
    let probe = start + delta - 1;
    if probe >= k {
        return None;
    }
    if probe > c && !(c + 1..=probe).rev().all(ok) {
        return None;
    }
    let mut end = probe.max(c) + 1;
    while end < k && ok(end) {
        end += 1;
    }
    Some(Interval::new(start, end))
}

/// Maximal run of the pair through checkpoint `t`, if it lasts at least δ.
pub fn verify_pair_two_way(
    ds: &Dataset,
    a: SeriesId,
    b: SeriesId,
    t: usize,
    params: &Params,
) -> Result<Option<PairMatch>> {
    if !crate::model::pair_qualifies(ds, a, b, t, params.epsilon)? {
        return Err(Error::Contract(format!(
            "pair ({a}, {b}) is not within epsilon at timestamp {t}"
        )));
    }
    Ok(two_way_pair(ds, a, b, t, params.delta, params.epsilon, 0)
        .map(|iv| PairMatch::new(a, b, iv)))
}

pub fn discover_pairs_checkpoint(ds: &Dataset, params: &Params) -> Result<Vec<PairMatch>> {
    params.validate_for(ds)?;
    let plan = plan_for(ds, params)?;
    discover_pairs_with_plan(ds, params, &plan)
}

/// Checkpoint pair discovery over a caller-supplied covering plan.
pub fn discover_pairs_with_plan(
    ds: &Dataset,
    params: &Params,
    plan: &CheckpointPlan,
) -> Result<Vec<PairMatch>> {
    params.validate_for(ds)?;
    check_plan(ds, params, plan)?;
    let cps = &plan.checkpoints;
    let idx = BinIndex::build(ds, params.epsilon, cps.iter().copied())?;
    let mut out = BTreeSet::new();
    for (i, &c) in cps.iter().enumerate() {
        let floor = floor_of(cps, i);
        idx.layer(c)?.for_each_candidate_pair(|a, b| {
            if let Some(iv) = two_way_pair(ds, a, b, c, params.delta, params.epsilon, floor) {
                out.insert(PairMatch::new(a, b, iv));
            }
        });
    }
    Ok(out.into_iter().collect())
}

/// Two-way bundle verification of `seed` around checkpoint `c`, admitting
/// only runs that start at or after `floor`.
fn two_way_bundle(
    ds: &Dataset,
    seed: Group,
    c: usize,
    params: &Params,
    floor: usize,
    out: &mut BTreeSet<BundleMatch>,
) {
    let eps = params.epsilon;
    let mu = params.mu;
    let k = ds.k();

    // Backward: every maximal sub-group tight over [start, c] together with
    // the start where it first breaks.
    let mut backward = Expansion::new(ds, vec![seed], eps, mu, |_: &[SeriesId]| true);
    let mut starts: Vec<(Group, usize)> = Vec::new();
    let lowest = floor.saturating_sub(1);
    let mut u = c;
    while u > lowest && !backward.is_empty() {
        u -= 1;
        backward.visit(u, |g| starts.push((g.clone(), u + 1)));
    }
    if floor == 0 {
        starts.extend(backward.groups.drain(..).map(|g| (g, 0)));
    }

    for (group, start) in starts {
        let probe = start + params.delta - 1;
        if probe >= k {
            continue;
        }
        let keep = |g: &[SeriesId]| start == 0 || !ds.tight_at(g, start - 1, eps);
        let mut family = Expansion::new(ds, vec![group], eps, mu, keep);
        // Eager probe from start + δ - 1 back towards the checkpoint.
        for t in (c + 1..=probe).rev() {
            family.visit(t, |_| {});
            if family.is_empty() {
                break;
            }
        }
        let mut emit = |g: &Group, end: usize| {
            if !dominated(ds, g, start, end, eps) {
                out.insert(BundleMatch::new(g.clone(), Interval::new(start, end)));
            }
        };
        let mut t = probe.max(c) + 1;
        while t < k && !family.is_empty() {
            family.visit(t, |g| emit(g, t));
            t += 1;
        }
        for g in &family.groups {
            emit(g, k);
        }
    }
}

/// Qualifying bundles whose interval contains checkpoint `t`, grown from a
/// seed group that is tight at `t`.
pub fn verify_bundle_two_way(
    ds: &Dataset,
    seed: &[SeriesId],
    t: usize,
    params: &Params,
) -> Result<Vec<BundleMatch>> {
    params.validate_for(ds)?;
    ds.check_timestamp(t)?;
    let mut group = seed.to_vec();
    group.sort_unstable();
    group.dedup();
    for &s in &group {
        ds.check_series(s)?;
    }
    if group.len() < params.mu || !ds.tight_at(&group, t, params.epsilon) {
        return Err(Error::Contract(format!(
            "seed group of {} members is not a tight group of at least mu={} at timestamp {t}",
            group.len(),
            params.mu
        )));
    }
    let mut out = BTreeSet::new();
    two_way_bundle(ds, group, t, params, 0, &mut out);
    Ok(out.into_iter().collect())
}

pub fn discover_bundles_checkpoint(ds: &Dataset, params: &Params) -> Result<Vec<BundleMatch>> {
    params.validate_for(ds)?;
    if params.mu > ds.n() {
        return Ok(Vec::new());
    }
    let plan = plan_for(ds, params)?;
    discover_bundles_with_plan(ds, params, &plan)
}

/// Checkpoint bundle discovery over a caller-supplied covering plan.
pub fn discover_bundles_with_plan(
    ds: &Dataset,
    params: &Params,
    plan: &CheckpointPlan,
) -> Result<Vec<BundleMatch>> {
    params.validate_for(ds)?;
    check_plan(ds, params, plan)?;
    if params.mu > ds.n() {
        return Ok(Vec::new());
    }
    let cps = &plan.checkpoints;
    let idx = BinIndex::build(ds, params.epsilon, cps.iter().copied())?;
    let mut out = BTreeSet::new();
    for (i, &c) in cps.iter().enumerate() {
        let floor = floor_of(cps, i);
        for seed in idx.layer(c)?.maximal_windows(params.mu) {
            two_way_bundle(ds, seed, c, params, floor, &mut out);
        }
    }
    Ok(out.into_iter().collect())
}
