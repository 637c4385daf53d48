//! Dataset, parameters and result types shared by every discovery algorithm.
//!
//! All qualification decisions in the crate go through [`within`] and
//! [`group_spread`], so that the sweep-line, checkpoint and brute-force
//! implementations agree bit for bit.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Index of a series inside a [`Dataset`].
pub type SeriesId = usize;

/// Inclusive similarity predicate on two values.
#[inline]
pub fn within(x: f64, y: f64, epsilon: f64) -> bool {
    (x - y).abs() <= epsilon
}

/// A set of co-evolving series, all of length `k`.
///
/// Values are stored series-major in one flat buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    ids: Vec<String>,
    values: Vec<f64>,
    k: usize,
    min: f64,
    max: f64,
}

impl Dataset {
    pub fn new(ids: Vec<String>, series: Vec<Vec<f64>>) -> Result<Self> {
        if ids.len() != series.len() {
            return Err(Error::Argument(format!(
                "{} ids given for {} series",
                ids.len(),
                series.len()
            )));
        }
        if series.is_empty() {
            return Err(Error::Data("dataset holds no series".into()));
        }
        let k = series[0].len();
        if k == 0 {
            return Err(Error::Data("series have length zero".into()));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if id.is_empty() {
                return Err(Error::Data("empty series id".into()));
            }
            if !seen.insert(id.as_str()) {
                return Err(Error::Data(format!("duplicate series id {id:?}")));
            }
        }

        let mut values = Vec::with_capacity(series.len() * k);
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for (id, row) in ids.iter().zip(&series) {
            if row.len() != k {
                return Err(Error::Data(format!(
                    "series {id:?} has length {}, expected {k}",
                    row.len()
                )));
            }
            for (t, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Data(format!(
                        "series {id:?} has non-finite value at timestamp {t}"
                    )));
                }
                min = min.min(v);
                max = max.max(v);
            }
            values.extend_from_slice(row);
        }

        Ok(Dataset {
            ids,
            values,
            k,
            min,
            max,
        })
    }

    /// Build a dataset with generated ids `S0`, `S1`, ...
    pub fn from_rows(series: Vec<Vec<f64>>) -> Result<Self> {
        let ids = (0..series.len()).map(|i| format!("S{i}")).collect();
        Dataset::new(ids, series)
    }

    /// Number of series.
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    /// Number of timestamps.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, series: SeriesId) -> &str {
        &self.ids[series]
    }

    pub fn value_range(&self) -> (f64, f64) {
        (self.min, self.max)
    }

    pub fn series(&self, series: SeriesId) -> &[f64] {
        &self.values[series * self.k..(series + 1) * self.k]
    }

    /// Unchecked accessor used on hot paths; panics on out-of-range input.
    #[inline]
    pub fn value(&self, series: SeriesId, t: usize) -> f64 {
        debug_assert!(t < self.k);
        self.values[series * self.k + t]
    }

    pub(crate) fn check_series(&self, series: SeriesId) -> Result<()> {
        if series >= self.n() {
            return Err(Error::Index(format!(
                "series {series} out of range for n={}",
                self.n()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_timestamp(&self, t: usize) -> Result<()> {
        if t >= self.k {
            return Err(Error::Index(format!(
                "timestamp {t} out of range for k={}",
                self.k
            )));
        }
        Ok(())
    }

    /// Whether every pair of `members` is within `epsilon` at `t`.
    #[inline]
    pub(crate) fn tight_at(&self, members: &[SeriesId], t: usize, epsilon: f64) -> bool {
        spread_unchecked(self, members, t) <= epsilon
    }
}

/// Discovery thresholds: value threshold, minimum duration and minimum
/// bundle membership.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    pub epsilon: f64,
    pub delta: usize,
    pub mu: usize,
}

impl Params {
    pub fn new(epsilon: f64, delta: usize, mu: usize) -> Result<Self> {
        let p = Params { epsilon, delta, mu };
        p.validate()?;
        Ok(p)
    }

    /// Parameters for pair discovery, where membership is irrelevant.
    pub fn pairs(epsilon: f64, delta: usize) -> Result<Self> {
        Params::new(epsilon, delta, 3)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Argument(format!(
                "epsilon must be a positive finite number, got {}",
                self.epsilon
            )));
        }
        if self.delta < 2 {
            return Err(Error::Argument(format!(
                "delta must be greater than 1, got {}",
                self.delta
            )));
        }
        if self.mu < 3 {
            return Err(Error::Argument(format!(
                "mu must be greater than 2, got {}",
                self.mu
            )));
        }
        Ok(())
    }

    /// Validate against a concrete dataset. `mu > n` is accepted and simply
    /// yields no bundles.
    pub fn validate_for(&self, ds: &Dataset) -> Result<()> {
        self.validate()?;
        if self.delta > ds.k() {
            return Err(Error::Argument(format!(
                "delta {} exceeds series length {}",
                self.delta,
                ds.k()
            )));
        }
        Ok(())
    }
}

/// Half-open run of timestamps `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start < end);
        Interval { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, t: usize) -> bool {
        self.start <= t && t < self.end
    }

    pub fn covers(&self, other: &Interval) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairMatch {
    pub a: SeriesId,
    pub b: SeriesId,
    pub interval: Interval,
}

impl PairMatch {
    /// Builds a match with the two series in ascending order.
    pub fn new(a: SeriesId, b: SeriesId, interval: Interval) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        PairMatch { a, b, interval }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BundleMatch {
    /// Sorted, duplicate-free series indices.
    pub members: Vec<SeriesId>,
    pub interval: Interval,
}

impl BundleMatch {
    pub fn new(mut members: Vec<SeriesId>, interval: Interval) -> Self {
        members.sort_unstable();
        members.dedup();
        BundleMatch { members, interval }
    }
}

/// `|X_a^t - X_b^t| <= eps`.
pub fn pair_qualifies(
    ds: &Dataset,
    a: SeriesId,
    b: SeriesId,
    t: usize,
    epsilon: f64,
) -> Result<bool> {
    ds.check_series(a)?;
    ds.check_series(b)?;
    ds.check_timestamp(t)?;
    if a == b {
        return Err(Error::Argument(format!("pair of series {a} with itself")));
    }
    Ok(within(ds.value(a, t), ds.value(b, t), epsilon))
}

/// Max minus min of the member values at `t`.
pub fn group_spread(ds: &Dataset, members: &[SeriesId], t: usize) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::Argument("group spread of an empty member set".into()));
    }
    ds.check_timestamp(t)?;
    for &m in members {
        ds.check_series(m)?;
    }
    Ok(spread_unchecked(ds, members, t))
}

#[inline]
fn spread_unchecked(ds: &Dataset, members: &[SeriesId], t: usize) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &m in members {
        let v = ds.value(m, t);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

/// A result that fails its defining conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Violation {}

fn check_interval(ds: &Dataset, params: &Params, iv: &Interval) -> Result<(), Violation> {
    if iv.start >= iv.end || iv.end > ds.k() {
        return Err(Violation(format!("interval {iv} not inside [0, {})", ds.k())));
    }
    if iv.len() < params.delta {
        return Err(Violation(format!(
            "interval {iv} shorter than delta={}",
            params.delta
        )));
    }
    Ok(())
}

/// Checks every defining property of a pair result against the data.
pub fn check_pair(ds: &Dataset, params: &Params, m: &PairMatch) -> Result<(), Violation> {
    if m.a >= m.b || m.b >= ds.n() {
        return Err(Violation(format!("bad series pair ({}, {})", m.a, m.b)));
    }
    let iv = m.interval;
    check_interval(ds, params, &iv)?;
    let eps = params.epsilon;
    let ok = |t: usize| within(ds.value(m.a, t), ds.value(m.b, t), eps);
    if let Some(t) = (iv.start..iv.end).find(|&t| !ok(t)) {
        return Err(Violation(format!(
            "pair ({}, {}) exceeds epsilon at {t}",
            m.a, m.b
        )));
    }
    if iv.start > 0 && ok(iv.start - 1) {
        return Err(Violation(format!("pair ({}, {}) extends left of {iv}", m.a, m.b)));
    }
    if iv.end < ds.k() && ok(iv.end) {
        return Err(Violation(format!("pair ({}, {}) extends right of {iv}", m.a, m.b)));
    }
    Ok(())
}

/// Checks every defining property of a bundle result, including that no
/// single additional series could join it over the same interval (which in
/// one dimension rules out every strict superset).
pub fn check_bundle(ds: &Dataset, params: &Params, m: &BundleMatch) -> Result<(), Violation> {
    let members = &m.members;
    if members.len() < params.mu {
        return Err(Violation(format!(
            "bundle of {} members below mu={}",
            members.len(),
            params.mu
        )));
    }
    if members.windows(2).any(|w| w[0] >= w[1]) || members.iter().any(|&s| s >= ds.n()) {
        return Err(Violation(format!("bad member list {members:?}")));
    }
    let iv = m.interval;
    check_interval(ds, params, &iv)?;
    let eps = params.epsilon;
    if let Some(t) = (iv.start..iv.end).find(|&t| !ds.tight_at(members, t, eps)) {
        return Err(Violation(format!("bundle {members:?} exceeds epsilon at {t}")));
    }
    if iv.start > 0 && ds.tight_at(members, iv.start - 1, eps) {
        return Err(Violation(format!("bundle {members:?} extends left of {iv}")));
    }
    if iv.end < ds.k() && ds.tight_at(members, iv.end, eps) {
        return Err(Violation(format!("bundle {members:?} extends right of {iv}")));
    }
    let mut extended = members.clone();
    for x in (0..ds.n()).filter(|x| members.binary_search(x).is_err()) {
        extended.clear();
        extended.extend_from_slice(members);
        extended.push(x);
        if (iv.start..iv.end).all(|t| ds.tight_at(&extended, t, eps)) {
            return Err(Violation(format!(
                "bundle {members:?} over {iv} is dominated by adding series {x}"
            )));
        }
    }
    Ok(())
}
