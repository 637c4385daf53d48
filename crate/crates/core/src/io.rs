//! Dataset ingestion, preprocessing, synthetic generation and result output.

use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BundleMatch, Dataset, PairMatch, Params, SeriesId};

/// Reads a wide CSV table: one row per series, the id first and then one
/// value per timestamp. A first row whose first field is `id` is a header.
pub fn read_csv(reader: impl Read) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut ids = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Format {
            row: i + 1,
            message: e.to_string(),
        })?;
        let row = record.position().map_or(i + 1, |p| p.line() as usize);
        if i == 0 && record.get(0) == Some("id") {
            continue;
        }
        let id = record.get(0).unwrap_or_default().to_string();
        if record.len() < 2 {
            return Err(Error::Format {
                row,
                message: format!("series {id:?} has no values"),
            });
        }
        if let Some(first) = rows.first() {
            if record.len() - 1 != first.len() {
                return Err(Error::Format {
                    row,
                    message: format!(
                        "series {id:?} has {} values, expected {}",
                        record.len() - 1,
                        first.len()
                    ),
                });
            }
        }
        let values = record
            .iter()
            .enumerate()
            .skip(1)
            .map(|(col, cell)| match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Parse {
                    row,
                    column: col + 1,
                    cell: cell.to_string(),
                }),
            })
            .collect::<Result<Vec<f64>>>()?;
        ids.push(id);
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::Format {
            row: 1,
            message: "no series rows".into(),
        });
    }
    Dataset::new(ids, rows)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(std::io::BufReader::new(file))
}

/// Wide CSV text for a dataset, with an `id,t0,t1,...` header. Values use
/// the shortest representation that parses back to the same float.
pub fn dataset_to_csv(ds: &Dataset) -> String {
    let mut out = String::from("id");
    for t in 0..ds.k() {
        out.push_str(&format!(",t{t}"));
    }
    out.push('\n');
    for s in 0..ds.n() {
        out.push_str(ds.id(s));
        for v in ds.series(s) {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

/// Per-series `(x - mean) / σ` with the population standard deviation.
/// Constant series map to zeros.
pub fn z_normalize(ds: &Dataset) -> Dataset {
    let k = ds.k() as f64;
    let rows = (0..ds.n())
        .map(|s| {
            let xs = ds.series(s);
            if xs.iter().all(|&x| x == xs[0]) {
                return vec![0.0; xs.len()];
            }
            let mean = xs.iter().sum::<f64>() / k;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / k;
            let sd = var.sqrt();
            if sd == 0.0 {
                vec![0.0; xs.len()]
            } else {
                xs.iter().map(|x| (x - mean) / sd).collect()
            }
        })
        .collect();
    Dataset::new(ds.ids().to_vec(), rows).expect("normalizing keeps the dataset shape")
}

/// Gaussian random walks: `x_0 ~ N(0,1)`, `x_{t+1} = x_t + N(0,1)`. The
/// output is a pure function of `(n, k, seed)`.
pub fn generate_synthetic(n: usize, k: usize, seed: u64) -> Result<Dataset> {
    if n == 0 || k == 0 {
        return Err(Error::Argument(format!(
            "synthetic dataset needs n >= 1 and k >= 1, got n={n}, k={k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = (n - 1).to_string().len();
    let mut ids = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for s in 0..n {
        let mut row = Vec::with_capacity(k);
        let mut x: f64 = StandardNormal.sample(&mut rng);
        row.push(x);
        for _ in 1..k {
            let step: f64 = StandardNormal.sample(&mut rng);
            x += step;
            row.push(x);
        }
        ids.push(format!("S{s:0width$}"));
        rows.push(row);
    }
    Dataset::new(ids, rows)
}

/// A parameter given either as an absolute value or as a percentage of a
/// dataset quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quantity {
    Absolute(f64),
    Percent(f64),
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, pct) = match s.strip_suffix('%') {
            Some(body) => (body.trim(), true),
            None => (s, false),
        };
        let v: f64 = body
            .parse()
            .map_err(|_| Error::Argument(format!("not a number: {s:?}")))?;
        if !v.is_finite() {
            return Err(Error::Argument(format!("not a finite number: {s:?}")));
        }
        Ok(if pct { Quantity::Percent(v) } else { Quantity::Absolute(v) })
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Absolute(v) => write!(f, "{v}"),
            Quantity::Percent(v) => write!(f, "{v}%"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamSpec {
    pub epsilon: Quantity,
    pub delta: Quantity,
    /// Defaults to the smallest valid membership when absent.
    pub mu: Option<Quantity>,
}

fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

fn count_param(name: &str, q: Quantity, base: usize, floor: usize) -> Result<usize> {
    let v = match q {
        Quantity::Percent(p) => round_half_up(p * base as f64 / 100.0).max(floor as f64),
        Quantity::Absolute(v) => {
            if v.fract() != 0.0 {
                return Err(Error::Argument(format!("{name} must be a whole number, got {v}")));
            }
            v
        }
    };
    if v < 0.0 || v > u32::MAX as f64 {
        return Err(Error::Argument(format!("{name} out of range: {v}")));
    }
    Ok(v as usize)
}

/// Resolves ε against the value range, δ against the length and μ against
/// the number of series.
pub fn resolve_params(spec: &ParamSpec, ds: &Dataset) -> Result<Params> {
    let (lo, hi) = ds.value_range();
    let epsilon = match spec.epsilon {
        Quantity::Absolute(v) => v,
        Quantity::Percent(p) => p * (hi - lo) / 100.0,
    };
    let delta = count_param("delta", spec.delta, ds.k(), 2)?;
    let mu = match spec.mu {
        Some(q) => count_param("mu", q, ds.n(), 3)?,
        None => 3,
    };
    let params = Params::new(epsilon, delta, mu)?;
    params.validate_for(ds)?;
    Ok(params)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Argument(format!("unknown output format {other:?}"))),
        }
    }
}

/// Anything that serializes as a member list plus interval.
pub trait MatchRecord {
    fn member_indices(&self) -> Vec<SeriesId>;
    fn bounds(&self) -> (usize, usize);
}

impl MatchRecord for PairMatch {
    fn member_indices(&self) -> Vec<SeriesId> {
        vec![self.a, self.b]
    }
    fn bounds(&self) -> (usize, usize) {
        (self.interval.start, self.interval.end)
    }
}

impl MatchRecord for BundleMatch {
    fn member_indices(&self) -> Vec<SeriesId> {
        self.members.clone()
    }
    fn bounds(&self) -> (usize, usize) {
        (self.interval.start, self.interval.end)
    }
}

#[derive(Serialize)]
struct Record<'a> {
    members: Vec<&'a str>,
    start: usize,
    end: usize,
}

fn records<'a, M: MatchRecord>(ds: &'a Dataset, matches: &[M]) -> Vec<Record<'a>> {
    let mut out: Vec<Record<'a>> = matches
        .iter()
        .map(|m| {
            let (start, end) = m.bounds();
            Record {
                members: m.member_indices().into_iter().map(|s| ds.id(s)).collect(),
                start,
                end,
            }
        })
        .collect();
    out.sort_by(|a, b| (a.start, a.end, &a.members).cmp(&(b.start, b.end, &b.members)));
    out
}

/// Serialized results, ordered by `(start, end, members)`.
pub fn render_results<M: MatchRecord>(ds: &Dataset, matches: &[M], format: OutputFormat) -> String {
    let recs = records(ds, matches);
    match format {
        OutputFormat::Json => serde_json::to_string(&recs).expect("records serialize"),
        OutputFormat::Csv => {
            let mut out = String::from("members,start,end\n");
            for r in &recs {
                out.push_str(&format!("{},{},{}\n", r.members.join(";"), r.start, r.end));
            }
            out
        }
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so a failure never leaves a partial file behind.
pub fn write_atomic(path: impl AsRef<Path>, contents: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_results<M: MatchRecord>(
    ds: &Dataset,
    matches: &[M],
    format: OutputFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    write_atomic(path, render_results(ds, matches, format).as_bytes())
}
