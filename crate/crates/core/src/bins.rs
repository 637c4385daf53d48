//! Per-timestamp discretization of values into width-ε bins.
//!
//! At every indexed timestamp the values are kept in one ascending
//! `(value, series)` array, cut into runs that share a bin number
//! `floor((v - origin) / ε)`. A window `[v - ε, v]` anchored at an observed
//! value only ever touches the anchor's bin and the bin right below it, so
//! candidate generation is a contiguous range scan.

use std::cmp::Ordering;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::model::{Dataset, SeriesId};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub value: f64,
    pub series: SeriesId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Bin {
    z: i64,
    start: usize,
    end: usize,
}

/// Bin number of `value` for a grid of width `epsilon` starting at `origin`.
#[inline]
pub fn bin_number(value: f64, origin: f64, epsilon: f64) -> i64 {
    ((value - origin) / epsilon).floor() as i64
}

/// The bins of a single timestamp.
#[derive(Clone, Debug)]
pub struct BinLayer {
    epsilon: f64,
    origin: f64,
    entries: Vec<Entry>,
    bins: Vec<Bin>,
    slot_of: Vec<u32>,
}

impl BinLayer {
    fn build(ds: &Dataset, t: usize, origin: f64, epsilon: f64) -> Self {
        let mut entries: Vec<Entry> = (0..ds.n())
            .map(|series| Entry {
                value: ds.value(series, t),
                series,
            })
            .collect();
        entries.sort_unstable_by(cmp_entry);

        let mut bins: Vec<Bin> = Vec::new();
        let mut slot_of = Vec::with_capacity(entries.len());
        for (pos, e) in entries.iter().enumerate() {
            let z = bin_number(e.value, origin, epsilon);
            match bins.last_mut() {
                Some(b) if b.z == z => b.end = pos + 1,
                _ => bins.push(Bin {
                    z,
                    start: pos,
                    end: pos + 1,
                }),
            }
            slot_of.push((bins.len() - 1) as u32);
        }
        BinLayer {
            epsilon,
            origin,
            entries,
            bins,
            slot_of,
        }
    }

    /// All entries at this timestamp, ascending by `(value, series)`.
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Non-empty bins, ascending by bin number.
    pub fn bins(&self) -> impl Iterator<Item = (i64, &[Entry])> + '_ {
        self.bins
            .iter()
            .map(move |b| (b.z, &self.entries[b.start..b.end]))
    }

    pub fn max_bin_cardinality(&self) -> usize {
        self.bins.iter().map(|b| b.end - b.start).max().unwrap_or(0)
    }

    /// First position of the bin below `slot` if that bin is adjacent,
    /// otherwise the first position of `slot` itself.
    fn scan_floor(&self, slot: usize) -> usize {
        let here = self.bins[slot];
        match slot.checked_sub(1).map(|s| self.bins[s]) {
            Some(below) if below.z == here.z - 1 => below.start,
            _ => here.start,
        }
    }

    /// Lowest position whose value is within ε below `anchor`, searching
    /// `[scan_floor(slot), hi)`.
    fn window_start(&self, anchor: f64, slot: usize, hi: usize) -> usize {
        let eps = self.epsilon;
        let mut lo = self.scan_floor(slot);
        // Floating-point rounding in the bin arithmetic can leave a value
        // that is exactly ε away two bins down.
        while lo > 0 && anchor - self.entries[lo - 1].value <= eps {
            lo -= 1;
        }
        lo + self.entries[lo..hi].partition_point(|e| anchor - e.value > eps)
    }

    /// Positions of the anchored window for the entry at `pos`: every entry
    /// ordered at or before `pos` whose value is within ε below it.
    pub fn anchored_range(&self, pos: usize) -> Range<usize> {
        let anchor = self.entries[pos].value;
        self.window_start(anchor, self.slot_of[pos] as usize, pos)..pos + 1
    }

    /// Series whose value lies in `[anchor - ε, anchor]`.
    pub fn anchored_group(&self, anchor: f64) -> Vec<SeriesId> {
        if self.entries.is_empty() {
            return Vec::new();
        }
        let z = bin_number(anchor, self.origin, self.epsilon);
        let (slot, hi) = match self.bins.binary_search_by(|b| b.z.cmp(&z)) {
            Ok(slot) => {
                let b = self.bins[slot];
                let hi = b.start + self.entries[b.start..b.end].partition_point(|e| e.value <= anchor);
                (slot, hi)
            }
            // Anchor bin is empty: only the bin below can contribute.
            Err(0) => return Vec::new(),
            Err(ins) => {
                let below = self.bins[ins - 1];
                if below.z != z - 1 {
                    return Vec::new();
                }
                (ins - 1, below.end)
            }
        };
        if hi == 0 {
            return Vec::new();
        }
        let lo = self.window_start(anchor, slot, hi);
        let mut out: Vec<SeriesId> = self.entries[lo..hi].iter().map(|e| e.series).collect();
        out.sort_unstable();
        out
    }

    /// Calls `f(a, b)` once for every unordered pair within ε, with the pair
    /// anchored at its larger `(value, series)` endpoint.
    pub fn for_each_candidate_pair(&self, mut f: impl FnMut(SeriesId, SeriesId)) {
        for pos in 0..self.entries.len() {
            let anchor = self.entries[pos].series;
            let range = self.anchored_range(pos);
            for e in &self.entries[range.start..pos] {
                f(e.series, anchor);
            }
        }
    }

    pub fn candidate_pairs(&self) -> Vec<(SeriesId, SeriesId)> {
        let mut out = Vec::new();
        self.for_each_candidate_pair(|a, b| out.push(if a < b { (a, b) } else { (b, a) }));
        out
    }

    /// Anchored windows not contained in any other anchored window, with at
    /// least `min_size` members. Members are sorted by series index.
    pub fn maximal_windows(&self, min_size: usize) -> Vec<Vec<SeriesId>> {
        let n = self.entries.len();
        let starts: Vec<usize> = (0..n).map(|pos| self.anchored_range(pos).start).collect();
        let mut out = Vec::new();
        for pos in 0..n {
            let lo = starts[pos];
            let maximal = pos + 1 == n || starts[pos + 1] > lo;
            if maximal && pos + 1 - lo >= min_size {
                let mut members: Vec<SeriesId> =
                    self.entries[lo..=pos].iter().map(|e| e.series).collect();
                members.sort_unstable();
                out.push(members);
            }
        }
        out
    }
}

fn cmp_entry(a: &Entry, b: &Entry) -> Ordering {
    a.value
        .partial_cmp(&b.value)
        .unwrap_or(Ordering::Equal)
        .then(a.series.cmp(&b.series))
}

/// Bin layers for some or all timestamps of a dataset.
#[derive(Clone, Debug)]
pub struct BinIndex {
    epsilon: f64,
    origin: f64,
    layers: Vec<Option<BinLayer>>,
}

/// Builds bins at every timestamp.
pub fn create_bins(ds: &Dataset, epsilon: f64) -> Result<BinIndex> {
    BinIndex::build(ds, epsilon, 0..ds.k())
}

impl BinIndex {
    /// Builds bins only at the given timestamps.
    pub fn build(
        ds: &Dataset,
        epsilon: f64,
        timestamps: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Argument(format!(
                "bin width must be positive and finite, got {epsilon}"
            )));
        }
        let (origin, max) = ds.value_range();
        if !(origin.is_finite() && max.is_finite()) {
            return Err(Error::Data("dataset contains non-finite values".into()));
        }
        let mut layers = vec![None; ds.k()];
        for t in timestamps {
            ds.check_timestamp(t)?;
            if layers[t].is_none() {
                layers[t] = Some(BinLayer::build(ds, t, origin, epsilon));
            }
        }
        Ok(BinIndex {
            epsilon,
            origin,
            layers,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// Number of timestamps of the underlying dataset.
    pub fn k(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, t: usize) -> Result<&BinLayer> {
        match self.layers.get(t) {
            Some(Some(layer)) => Ok(layer),
            Some(None) => Err(Error::Index(format!("timestamp {t} is not indexed"))),
            None => Err(Error::Index(format!(
                "timestamp {t} out of range for k={}",
                self.layers.len()
            ))),
        }
    }

    pub fn bin_number(&self, value: f64) -> i64 {
        bin_number(value, self.origin, self.epsilon)
    }

    pub fn anchored_group(&self, t: usize, anchor_value: f64) -> Result<Vec<SeriesId>> {
        Ok(self.layer(t)?.anchored_group(anchor_value))
    }

    pub fn candidate_pairs_at(&self, t: usize) -> Result<Vec<(SeriesId, SeriesId)>> {
        Ok(self.layer(t)?.candidate_pairs())
    }

    pub fn max_bin_cardinality(&self, t: usize) -> Result<usize> {
        Ok(self.layer(t)?.max_bin_cardinality())
    }
}
