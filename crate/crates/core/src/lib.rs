//! Discovery of locally similar pairs and bundles over co-evolving time
//! series.
//!
//! Two series are locally similar when their values stay within ε of each
//! other for at least δ consecutive timestamps; a bundle is a maximal group
//! of at least μ series that are pairwise similar over a common interval.
//! Each problem has a sweep-line baseline that filters candidates at every
//! timestamp, and a checkpoint variant that filters only at δ-spaced
//! checkpoints and verifies in both directions.

pub mod benchmark;
pub mod bins;
pub mod checkpoint;
pub mod cli;
pub mod error;
mod expand;
pub mod io;
pub mod model;
pub mod oracle;
pub mod sweep;

pub use bins::{create_bins, BinIndex, BinLayer};
pub use checkpoint::{
    checkpoints_for_shift, discover_bundles_checkpoint, discover_pairs_checkpoint,
    optimize_placement, placement_cost, verify_bundle_two_way, verify_pair_two_way,
    CheckpointPlan, DensityProfile,
};
pub use error::{Error, Result};
pub use model::{
    check_bundle, check_pair, group_spread, pair_qualifies, BundleMatch, Dataset, Interval,
    PairMatch, Params, SeriesId,
};
pub use oracle::{oracle_bundles, oracle_pairs};
pub use sweep::{
    discover_bundles_sweepline, discover_pairs_sweepline, verify_bundle_forward,
    verify_pair_forward,
};

/// Which discovery strategy to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Sweepline,
    Checkpoint,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sweepline" => Ok(Algorithm::Sweepline),
            "checkpoint" => Ok(Algorithm::Checkpoint),
            other => Err(Error::Argument(format!("unknown algorithm {other:?}"))),
        }
    }
}

pub fn discover_pairs(ds: &Dataset, params: &Params, algorithm: Algorithm) -> Result<Vec<PairMatch>> {
    match algorithm {
        Algorithm::Sweepline => discover_pairs_sweepline(ds, params),
        Algorithm::Checkpoint => discover_pairs_checkpoint(ds, params),
    }
}

pub fn discover_bundles(
    ds: &Dataset,
    params: &Params,
    algorithm: Algorithm,
) -> Result<Vec<BundleMatch>> {
    match algorithm {
        Algorithm::Sweepline => discover_bundles_sweepline(ds, params),
        Algorithm::Checkpoint => discover_bundles_checkpoint(ds, params),
    }
}
