//! Brute-force reference answers for small instances.
//!
//! Nothing here uses bins, checkpoints or group expansion: pairs come from
//! scanning every pair at every timestamp, bundles from enumerating every
//! subset of series.

use crate::error::{Error, Result};
use crate::model::{group_spread, pair_qualifies, BundleMatch, Dataset, Interval, PairMatch, Params};

/// Largest dataset the subset enumeration accepts by default.
pub const DEFAULT_MAX_SERIES: usize = 20;

/// Maximal runs of `true` in `flags`.
pub fn true_runs(flags: &[bool]) -> Vec<Interval> {
    let mut runs = Vec::new();
    let mut start = None;
    for (t, &f) in flags.iter().enumerate() {
        match (f, start) {
            (true, None) => start = Some(t),
            (false, Some(s)) => {
                runs.push(Interval::new(s, t));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push(Interval::new(s, flags.len()));
    }
    runs
}

pub fn oracle_pairs(ds: &Dataset, params: &Params) -> Result<Vec<PairMatch>> {
    params.validate_for(ds)?;
    let mut out = Vec::new();
    for a in 0..ds.n() {
        for b in a + 1..ds.n() {
            let flags = (0..ds.k())
                .map(|t| pair_qualifies(ds, a, b, t, params.epsilon))
                .collect::<Result<Vec<_>>>()?;
            out.extend(
                true_runs(&flags)
                    .into_iter()
                    .filter(|iv| iv.len() >= params.delta)
                    .map(|iv| PairMatch::new(a, b, iv)),
            );
        }
    }
    out.sort_unstable();
    Ok(out)
}

pub fn oracle_bundles(ds: &Dataset, params: &Params) -> Result<Vec<BundleMatch>> {
    params.validate_for(ds)?;
    oracle_groups(ds, params.epsilon, params.delta, params.mu, DEFAULT_MAX_SERIES)
}

/// Subset enumeration with an arbitrary membership floor (which may be
/// below the usual minimum of three).
pub fn oracle_groups(
    ds: &Dataset,
    epsilon: f64,
    delta: usize,
    min_members: usize,
    max_series: usize,
) -> Result<Vec<BundleMatch>> {
    let n = ds.n();
    if n > max_series || n >= usize::BITS as usize {
        return Err(Error::Capacity(format!(
            "subset enumeration limited to {max_series} series, dataset has {n}"
        )));
    }
    let min_members = min_members.max(1);

    let mut qualifying: Vec<(u64, Interval)> = Vec::new();
    for mask in 1u64..(1u64 << n) {
        if (mask.count_ones() as usize) < min_members {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let flags = (0..ds.k())
            .map(|t| group_spread(ds, &members, t).map(|s| s <= epsilon))
            .collect::<Result<Vec<_>>>()?;
        qualifying.extend(
            true_runs(&flags)
                .into_iter()
                .filter(|iv| iv.len() >= delta)
                .map(|iv| (mask, iv)),
        );
    }

    let mut out: Vec<BundleMatch> = qualifying
        .iter()
        .filter(|&&(mask, iv)| {
            !qualifying
                .iter()
                .any(|&(other, ov)| other != mask && other & mask == mask && ov.covers(&iv))
        })
        .map(|&(mask, iv)| BundleMatch::new((0..n).filter(|&i| mask >> i & 1 == 1).collect(), iv))
        .collect();
    out.sort_unstable();
    Ok(out)
}
