//! Command-line front end.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::benchmark;
use crate::error::{Error, Result};
use crate::io::{
    dataset_to_csv, generate_synthetic, load_csv, resolve_params, write_atomic, write_results,
    z_normalize, OutputFormat, ParamSpec, Quantity,
};
use crate::model::{Dataset, Params};
use crate::{discover_bundles, discover_pairs, Algorithm};

#[derive(Debug, Parser)]
#[command(name = "cobundle", version, about = "Locally similar pairs and bundles over co-evolving time series")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find pairs of series within epsilon for at least delta timestamps.
    Pairs(DiscoverArgs),
    /// Find maximal groups of at least mu mutually similar series.
    Bundles(DiscoverArgs),
    /// Write a synthetic random-walk dataset as wide CSV.
    Generate(GenerateArgs),
    /// Time sweep-line against checkpoint discovery on the same input.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    /// Value threshold, absolute or as a percentage of the value range ("0.2%").
    #[arg(long)]
    pub epsilon: Quantity,
    /// Minimum duration in timestamps, or a percentage of the series length.
    #[arg(long)]
    pub delta: Quantity,
    /// Minimum bundle membership, or a percentage of the number of series.
    #[arg(long)]
    pub mu: Option<Quantity>,
    /// z-normalize every series before resolving parameters.
    #[arg(long)]
    pub znormalize: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DiscoverArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    /// sweepline or checkpoint.
    #[arg(long, default_value = "checkpoint")]
    pub algorithm: Algorithm,
    /// json or csv.
    #[arg(long, default_value = "json")]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BenchmarkArgs {
    /// Dataset to benchmark on; generated from --n/--k/--seed when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    /// Repetitions per algorithm; the median is reported.
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
}

fn prepare(ds: Dataset, t: &ThresholdArgs, need_mu: bool) -> Result<(Dataset, Params)> {
    if need_mu && t.mu.is_none() {
        return Err(Error::Argument("--mu is required".into()));
    }
    let ds = if t.znormalize { z_normalize(&ds) } else { ds };
    let spec = ParamSpec {
        epsilon: t.epsilon,
        delta: t.delta,
        mu: t.mu,
    };
    let params = resolve_params(&spec, &ds)?;
    Ok((ds, params))
}

pub fn run_pairs(args: &DiscoverArgs) -> Result<()> {
    let (ds, params) = prepare(load_csv(&args.input)?, &args.thresholds, false)?;
    let start = Instant::now();
    let matches = discover_pairs(&ds, &params, args.algorithm)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    write_results(&ds, &matches, args.format, &args.output)?;
    eprintln!(
        "pairs: n={} k={} epsilon={} delta={} matches={} time_ms={ms:.3}",
        ds.n(),
        ds.k(),
        params.epsilon,
        params.delta,
        matches.len()
    );
    Ok(())
}

pub fn run_bundles(args: &DiscoverArgs) -> Result<()> {
    let (ds, params) = prepare(load_csv(&args.input)?, &args.thresholds, true)?;
    let start = Instant::now();
    let matches = discover_bundles(&ds, &params, args.algorithm)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    write_results(&ds, &matches, args.format, &args.output)?;
    eprintln!(
        "bundles: n={} k={} epsilon={} delta={} mu={} matches={} time_ms={ms:.3}",
        ds.n(),
        ds.k(),
        params.epsilon,
        params.delta,
        params.mu,
        matches.len()
    );
    Ok(())
}

pub fn run_generate(args: &GenerateArgs) -> Result<()> {
    let ds = generate_synthetic(args.n, args.k, args.seed)?;
    write_atomic(&args.output, dataset_to_csv(&ds).as_bytes())?;
    eprintln!("generate: n={} k={} seed={}", ds.n(), ds.k(), args.seed);
    Ok(())
}

pub fn run_benchmark(args: &BenchmarkArgs) -> Result<benchmark::BenchmarkReport> {
    let ds = match (&args.input, args.n, args.k) {
        (Some(path), _, _) => load_csv(path)?,
        (None, Some(n), Some(k)) => generate_synthetic(n, k, args.seed)?,
        _ => {
            return Err(Error::Argument(
                "benchmark needs --input or both --n and --k".into(),
            ))
        }
    };
    let (ds, params) = prepare(ds, &args.thresholds, false)?;
    benchmark::run(&ds, &params, args.reps, args.thresholds.mu.is_some())
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    match &cfg.command {
        Command::Pairs(a) => run_pairs(a),
        Command::Bundles(a) => run_bundles(a),
        Command::Generate(a) => run_generate(a),
        Command::Benchmark(a) => {
            let report = run_benchmark(a)?;
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            Ok(())
        }
    }
}
