//! Horizontal expansion of candidate groups along the time axis.
//!
//! A family is an antichain of member sets, each tight (spread ≤ ε) at every
//! timestamp visited so far. Visiting a new timestamp keeps the groups that
//! stay tight, reports the ones that break, and replaces each broken group
//! by its maximal tight pieces at that timestamp. After visiting a set of
//! timestamps `T`, the family holds exactly the maximal subsets of the seed
//! that are tight over all of `T` and pass the caller's filter, regardless
//! of the visiting order.

use crate::model::{Dataset, SeriesId};

pub(crate) type Group = Vec<SeriesId>;

/// Maximal subsets of `group` that are tight at `t`, with at least
/// `min_size` members each. Output groups are sorted by series index.
pub(crate) fn split_at(
    ds: &Dataset,
    group: &[SeriesId],
    t: usize,
    epsilon: f64,
    min_size: usize,
) -> Vec<Group> {
    if group.len() < min_size.max(1) {
        return Vec::new();
    }
    let mut sorted: Vec<(f64, SeriesId)> = group.iter().map(|&s| (ds.value(s, t), s)).collect();
    sorted.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    let mut starts = Vec::with_capacity(sorted.len());
    let mut lo = 0;
    for j in 0..sorted.len() {
        while sorted[j].0 - sorted[lo].0 > epsilon {
            lo += 1;
        }
        starts.push(lo);
    }

    let mut out = Vec::new();
    for j in 0..sorted.len() {
        let lo = starts[j];
        let maximal = j + 1 == sorted.len() || starts[j + 1] > lo;
        if maximal && j + 1 - lo >= min_size {
            let mut piece: Group = sorted[lo..=j].iter().map(|&(_, s)| s).collect();
            piece.sort_unstable();
            out.push(piece);
        }
    }
    out
}

/// `a ⊆ b` for sorted member lists.
pub(crate) fn is_subset(a: &[SeriesId], b: &[SeriesId]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut it = b.iter();
    'outer: for x in a {
        for y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

pub(crate) struct Expansion<'a, F> {
    ds: &'a Dataset,
    epsilon: f64,
    min_size: usize,
    keep: F,
    pub(crate) groups: Vec<Group>,
}

impl<'a, F: Fn(&[SeriesId]) -> bool> Expansion<'a, F> {
    pub(crate) fn new(ds: &'a Dataset, seeds: Vec<Group>, epsilon: f64, min_size: usize, keep: F) -> Self {
        Expansion {
            ds,
            epsilon,
            min_size,
            keep,
            groups: seeds,
        }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Visits timestamp `t`; `on_break` receives each group that is not tight
    /// there, before it is split.
    pub(crate) fn visit(&mut self, t: usize, mut on_break: impl FnMut(&Group)) {
        let mut broken = Vec::new();
        let mut i = 0;
        while i < self.groups.len() {
            if self.ds.tight_at(&self.groups[i], t, self.epsilon) {
                i += 1;
            } else {
                let g = self.groups.swap_remove(i);
                on_break(&g);
                broken.push(g);
            }
        }
        if broken.is_empty() {
            return;
        }

        let mut pieces: Vec<Group> = broken
            .iter()
            .flat_map(|g| split_at(self.ds, g, t, self.epsilon, self.min_size))
            .filter(|p| (self.keep)(p))
            .collect();
        pieces.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        pieces.dedup();

        // Survivors are never inside a piece: a piece lies within a broken
        // group, and the family was an antichain before this step.
        for p in pieces {
            if !self.groups.iter().any(|g| is_subset(&p, g)) {
                self.groups.push(p);
            }
        }
    }
}

/// True when some series outside `members` could join them over
/// `[start, end)` without exceeding ε.
pub(crate) fn dominated(ds: &Dataset, members: &[SeriesId], start: usize, end: usize, epsilon: f64) -> bool {
    let len = end - start;
    let mut lo = vec![f64::INFINITY; len];
    let mut hi = vec![f64::NEG_INFINITY; len];
    for &m in members {
        let row = &ds.series(m)[start..end];
        for (i, &v) in row.iter().enumerate() {
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    (0..ds.n())
        .filter(|x| members.binary_search(x).is_err())
        .any(|x| {
            let row = &ds.series(x)[start..end];
            row.iter()
                .enumerate()
                .all(|(i, &v)| hi[i].max(v) - lo[i].min(v) <= epsilon)
        })
}
