//! Side-by-side timing of the sweep-line and checkpoint algorithms.

use std::fmt::Debug;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Dataset, Params};
use crate::{discover_bundles, discover_pairs, Algorithm};

/// Median wall times of both algorithms on one problem.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub sweepline_ms: f64,
    pub checkpoint_ms: f64,
    /// `sweepline_ms / checkpoint_ms`.
    pub speedup: f64,
    pub matches: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub delta: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<usize>,
    pub reps: usize,
    pub pairs: Comparison,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bundles: Option<Comparison>,
}

pub fn median(xs: &mut [f64]) -> f64 {
    assert!(!xs.is_empty(), "median of no samples");
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / 2.0
    }
}

/// One element present in exactly one of two sorted result lists.
pub fn first_difference<T: Ord + Debug>(sweepline: &[T], checkpoint: &[T]) -> Option<String> {
    let (mut i, mut j) = (0, 0);
    loop {
        match (sweepline.get(i), checkpoint.get(j)) {
            (None, None) => return None,
            (Some(a), None) => return Some(format!("only in sweepline: {a:?}")),
            (None, Some(b)) => return Some(format!("only in checkpoint: {b:?}")),
            (Some(a), Some(b)) => match a.cmp(b) {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => return Some(format!("only in sweepline: {a:?}")),
                std::cmp::Ordering::Greater => {
                    return Some(format!("only in checkpoint: {b:?}"))
                }
            },
        }
    }
}

fn timed<T>(f: &mut impl FnMut() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64() * 1e3))
}

/// Runs both closures `reps` times, checks that every run of each returns
/// the same canonical result set, and reports median times.
pub fn compare<T: Ord + Debug>(
    reps: usize,
    mut sweepline: impl FnMut() -> Result<Vec<T>>,
    mut checkpoint: impl FnMut() -> Result<Vec<T>>,
) -> Result<Comparison> {
    if reps == 0 {
        return Err(Error::Argument("repetitions must be at least 1".into()));
    }
    let mut sl_ms = Vec::with_capacity(reps);
    let mut cp_ms = Vec::with_capacity(reps);
    let mut matches = 0;
    for _ in 0..reps {
        let (mut sl, t_sl) = timed(&mut sweepline)?;
        let (mut cp, t_cp) = timed(&mut checkpoint)?;
        sl.sort_unstable();
        cp.sort_unstable();
        if let Some(diff) = first_difference(&sl, &cp) {
            return Err(Error::Mismatch(diff));
        }
        matches = sl.len();
        sl_ms.push(t_sl);
        cp_ms.push(t_cp);
    }
    let sweepline_ms = median(&mut sl_ms);
    let checkpoint_ms = median(&mut cp_ms);
    // Clamp to one nanosecond so the ratio stays finite.
    let speedup = sweepline_ms.max(1e-6) / checkpoint_ms.max(1e-6);
    Ok(Comparison {
        sweepline_ms,
        checkpoint_ms,
        speedup,
        matches,
    })
}

/// Pair comparison always; bundle comparison when `with_bundles` is set.
pub fn run(ds: &Dataset, params: &Params, reps: usize, with_bundles: bool) -> Result<BenchmarkReport> {
    let pairs = compare(
        reps,
        || discover_pairs(ds, params, Algorithm::Sweepline),
        || discover_pairs(ds, params, Algorithm::Checkpoint),
    )?;
    let bundles = if with_bundles {
        Some(compare(
            reps,
            || discover_bundles(ds, params, Algorithm::Sweepline),
            || discover_bundles(ds, params, Algorithm::Checkpoint),
        )?)
    } else {
        None
    };
    Ok(BenchmarkReport {
        n: ds.n(),
        k: ds.k(),
        epsilon: params.epsilon,
        delta: params.delta,
        mu: with_bundles.then_some(params.mu),
        reps,
        pairs,
        bundles,
    })
}
