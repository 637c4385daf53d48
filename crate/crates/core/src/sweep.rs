//! Sweep-line baselines: filter candidates at every timestamp and verify
//! each one forward in time.

use std::collections::BTreeSet;

use crate::bins::create_bins;
use crate::error::{Error, Result};
use crate::expand::{dominated, Expansion, Group};
use crate::model::{within, BundleMatch, Dataset, Interval, PairMatch, Params, SeriesId};

/// First timestamp after `t` at which the pair exceeds ε, or `k`.
fn forward_end(ds: &Dataset, a: SeriesId, b: SeriesId, t: usize, epsilon: f64) -> usize {
    let (xa, xb) = (ds.series(a), ds.series(b));
    (t + 1..ds.k())
        .find(|&u| !within(xa[u], xb[u], epsilon))
        .unwrap_or(ds.k())
}

/// Expands a pair that qualifies at `t` forward until ε is violated.
pub fn verify_pair_forward(
    ds: &Dataset,
    a: SeriesId,
    b: SeriesId,
    t: usize,
    epsilon: f64,
) -> Result<Interval> {
    if !crate::model::pair_qualifies(ds, a, b, t, epsilon)? {
        return Err(Error::Contract(format!(
            "pair ({a}, {b}) is not within epsilon at timestamp {t}"
        )));
    }
    Ok(Interval::new(t, forward_end(ds, a, b, t, epsilon)))
}

/// All maximal runs of length at least δ, found by filtering candidate
/// pairs at every timestamp.
pub fn discover_pairs_sweepline(ds: &Dataset, params: &Params) -> Result<Vec<PairMatch>> {
    params.validate_for(ds)?;
    let eps = params.epsilon;
    let idx = create_bins(ds, eps)?;
    let mut out = Vec::new();
    for t in 0..ds.k() {
        idx.layer(t)?.for_each_candidate_pair(|a, b| {
            // A pair already within ε at t-1 belongs to a run verified there.
            if t > 0 && within(ds.value(a, t - 1), ds.value(b, t - 1), eps) {
                return;
            }
            let end = forward_end(ds, a, b, t, eps);
            if end - t >= params.delta {
                out.push(PairMatch::new(a, b, Interval::new(t, end)));
            }
        });
    }
    out.sort_unstable();
    Ok(out)
}

fn check_seed(ds: &Dataset, seed: &[SeriesId], t: usize, params: &Params) -> Result<Group> {
    ds.check_timestamp(t)?;
    let mut group = seed.to_vec();
    group.sort_unstable();
    group.dedup();
    for &s in &group {
        ds.check_series(s)?;
    }
    if group.len() < params.mu {
        return Err(Error::Contract(format!(
            "seed group has {} members, below mu={}",
            group.len(),
            params.mu
        )));
    }
    if !ds.tight_at(&group, t, params.epsilon) {
        return Err(Error::Contract(format!(
            "seed group is not within epsilon at timestamp {t}"
        )));
    }
    Ok(group)
}

/// Expands `seed` forward from `t`, collecting `(group, [t, end))` for every
/// group of the family at the moment it breaks (or reaches the end of the
/// data). When `left_closed` is set, groups that are also tight at `t - 1`
/// are dropped, since their runs start earlier.
fn expand_forward(
    ds: &Dataset,
    seed: Group,
    t: usize,
    params: &Params,
    left_closed: bool,
    mut emit: impl FnMut(Group, Interval),
) {
    let eps = params.epsilon;
    let keep = |g: &[SeriesId]| !left_closed || t == 0 || !ds.tight_at(g, t - 1, eps);
    if !keep(&seed) {
        return;
    }
    let mut family = Expansion::new(ds, vec![seed], eps, params.mu, keep);
    for u in t + 1..ds.k() {
        family.visit(u, |g| emit(g.clone(), Interval::new(t, u)));
        if family.is_empty() {
            return;
        }
    }
    for g in family.groups {
        emit(g, Interval::new(t, ds.k()));
    }
}

/// Candidate bundles reachable from `seed` by expanding forward from `t`.
///
/// Each returned group is a maximal subset of the seed over its interval
/// `[t, end)`. Candidates are not filtered by δ, by left maximality or
/// against supersets outside the seed.
pub fn verify_bundle_forward(
    ds: &Dataset,
    seed: &[SeriesId],
    t: usize,
    params: &Params,
) -> Result<Vec<BundleMatch>> {
    let group = check_seed(ds, seed, t, params)?;
    let mut out = BTreeSet::new();
    expand_forward(ds, group, t, params, false, |g, iv| {
        out.insert(BundleMatch::new(g, iv));
    });
    Ok(out.into_iter().collect())
}

/// Every maximal bundle, found by seeding at every timestamp.
pub fn discover_bundles_sweepline(ds: &Dataset, params: &Params) -> Result<Vec<BundleMatch>> {
    params.validate_for(ds)?;
    if params.mu > ds.n() {
        return Ok(Vec::new());
    }
    let eps = params.epsilon;
    let idx = create_bins(ds, eps)?;
    let mut out = BTreeSet::new();
    for t in 0..ds.k() {
        for seed in idx.layer(t)?.maximal_windows(params.mu) {
            expand_forward(ds, seed, t, params, true, |g, iv| {
                if iv.len() >= params.delta && !dominated(ds, &g, iv.start, iv.end, eps) {
                    out.insert(BundleMatch::new(g, iv));
                }
            });
        }
    }
    Ok(out.into_iter().collect())
}
