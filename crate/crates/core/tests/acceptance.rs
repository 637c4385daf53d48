//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use cobundle::checkpoint::{checkpoints_for_shift, is_covering, optimize_placement, DensityProfile};
use cobundle::io::{generate_synthetic, resolve_params, ParamSpec, Quantity};
use cobundle::{
    benchmark, check_pair, discover_bundles_checkpoint, discover_bundles_sweepline,
    discover_pairs, discover_pairs_checkpoint, discover_pairs_sweepline, oracle_bundles,
    oracle_pairs, Algorithm, BundleMatch, Dataset, Interval, PairMatch, Params,
};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort_unstable();
    v
}

fn pair_equivalence() -> Outcome {
    let mut rng = common::rng(1001);
    let instances = 1200;
    let mut matched = 0;
    for i in 0..instances {
        let n = rng.random_range(2..=8);
        let k = rng.random_range(2..=40);
        let ds = common::random_dataset(&mut rng, n, k);
        let params = Params::pairs(common::random_epsilon(&mut rng), rng.random_range(2..=k.min(8)))
            .map_err(|e| e.to_string())?;
        let oracle = oracle_pairs(&ds, &params).map_err(|e| e.to_string())?;
        let sl = sorted(discover_pairs_sweepline(&ds, &params).map_err(|e| e.to_string())?);
        let cp = sorted(discover_pairs_checkpoint(&ds, &params).map_err(|e| e.to_string())?);
        if sl != oracle || cp != oracle {
            return Err(format!(
                "instance {i} (n={n}, k={k}, {params:?}): oracle {oracle:?}, sweepline {sl:?}, checkpoint {cp:?}"
            ));
        }
        matched += oracle.len();
    }
    Ok(format!("{instances} instances, {matched} pairs"))
}

fn bundle_equivalence() -> Outcome {
    let mut rng = common::rng(2002);
    let instances = 600;
    let mut matched = 0;
    for i in 0..instances {
        let n = rng.random_range(3..=7);
        let k = rng.random_range(2..=30);
        let ds = common::random_dataset(&mut rng, n, k);
        let params = Params::new(
            common::random_epsilon(&mut rng),
            rng.random_range(2..=k.min(6)),
            rng.random_range(3..=n),
        )
        .map_err(|e| e.to_string())?;
        let oracle = oracle_bundles(&ds, &params).map_err(|e| e.to_string())?;
        let sl = sorted(discover_bundles_sweepline(&ds, &params).map_err(|e| e.to_string())?);
        let cp = sorted(discover_bundles_checkpoint(&ds, &params).map_err(|e| e.to_string())?);
        if sl != oracle || cp != oracle {
            return Err(format!(
                "instance {i} (n={n}, k={k}, {params:?}): oracle {oracle:?}, sweepline {sl:?}, checkpoint {cp:?}"
            ));
        }
        matched += oracle.len();
    }
    Ok(format!("{instances} instances, {matched} bundles"))
}

fn covering() -> Outcome {
    let mut plans = 0u64;
    for k in 1..=200 {
        for delta in 2..=k {
            for shift in 0..delta {
                let cps = checkpoints_for_shift(k, delta, shift).map_err(|e| e.to_string())?;
                for start in 0..=k - delta {
                    if !cps.iter().any(|&c| (start..start + delta).contains(&c)) {
                        return Err(format!("k={k} delta={delta} shift={shift}: window at {start} uncovered"));
                    }
                }
                if !is_covering(&cps, k, delta) {
                    return Err(format!("k={k} delta={delta} shift={shift}: is_covering disagrees"));
                }
                plans += 1;
            }
        }
    }
    Ok(format!("{plans} plans checked"))
}

/// Largest bin population at `t`, tallied with a hash map.
fn max_bin_by_hand(ds: &Dataset, t: usize, eps: f64) -> u64 {
    let (origin, _) = ds.value_range();
    let mut counts: HashMap<i64, u64> = HashMap::new();
    for s in 0..ds.n() {
        *counts.entry(((ds.value(s, t) - origin) / eps).floor() as i64).or_default() += 1;
    }
    counts.into_values().max().unwrap_or(0)
}

fn placement_optimality() -> Outcome {
    let mut rng = common::rng(4004);
    for i in 0..100 {
        let n = rng.random_range(2..=12);
        let k = rng.random_range(2..=60);
        let ds = common::random_dataset(&mut rng, n, k);
        let eps = common::random_epsilon(&mut rng);
        let delta = rng.random_range(2..=k);
        let profile = DensityProfile::compute(&ds, eps).map_err(|e| e.to_string())?;
        let plan = optimize_placement(&profile, delta).map_err(|e| e.to_string())?;

        let tally: Vec<u64> = (0..k).map(|t| max_bin_by_hand(&ds, t, eps)).collect();
        let costs: Vec<u64> = (0..delta)
            .map(|s| (s..k).step_by(delta).map(|t| tally[t]).sum())
            .collect();
        let best = *costs.iter().min().unwrap();
        let best_shift = costs.iter().position(|&c| c == best).unwrap();
        let expected: Vec<usize> = (best_shift..k).step_by(delta).collect();
        let plan_sum: u64 = plan.checkpoints.iter().map(|&t| tally[t]).sum();
        if plan.shift != best_shift || plan.checkpoints != expected || plan_sum != best {
            return Err(format!(
                "dataset {i}: plan shift {} sum {plan_sum}, best shift {best_shift} sum {best} (costs {costs:?})",
                plan.shift
            ));
        }
        if (plan.cost - best as f64 / n as f64).abs() > 1e-12 {
            return Err(format!("dataset {i}: reported cost {} for sum {best}/{n}", plan.cost));
        }
    }
    Ok("100 datasets".into())
}

fn pair_ids(v: &[PairMatch]) -> BTreeSet<(usize, usize)> {
    v.iter().map(|m| (m.a, m.b)).collect()
}

fn monotonicity() -> Outcome {
    let mut rng = common::rng(5005);
    let mut alg = Algorithm::Sweepline;
    for i in 0..100 {
        let n = rng.random_range(2..=8);
        let k = rng.random_range(5..=40);
        let ds = common::random_dataset(&mut rng, n, k);
        let eps = common::random_epsilon(&mut rng);
        alg = match alg {
            Algorithm::Sweepline => Algorithm::Checkpoint,
            Algorithm::Checkpoint => Algorithm::Sweepline,
        };
        let run = |eps: f64, delta: usize| -> Result<Vec<PairMatch>, String> {
            let p = Params::pairs(eps, delta).map_err(|e| e.to_string())?;
            discover_pairs(&ds, &p, alg).map_err(|e| e.to_string())
        };
        let mut prev: Option<BTreeSet<PairMatch>> = None;
        for delta in 2..=5 {
            let cur: BTreeSet<PairMatch> = run(eps, delta)?.into_iter().collect();
            if let Some(p) = &prev {
                if !cur.is_subset(p) {
                    return Err(format!("instance {i}: delta {delta} added matches"));
                }
            }
            prev = Some(cur);
        }
        for delta in 2..=5 {
            let small = pair_ids(&run(eps, delta)?);
            let large = pair_ids(&run(2.0 * eps, delta)?);
            if !small.is_subset(&large) {
                return Err(format!("instance {i}: doubling epsilon lost pairs at delta {delta}"));
            }
        }
    }
    Ok("100 instances".into())
}

fn speedup() -> Outcome {
    let ds = generate_synthetic(2000, 500, 7).map_err(|e| e.to_string())?;
    let spec = ParamSpec {
        epsilon: Quantity::Percent(0.2),
        delta: Quantity::Percent(2.5),
        mu: Some(Quantity::Percent(1.25)),
    };
    let params = resolve_params(&spec, &ds).map_err(|e| e.to_string())?;
    if params.delta != 13 || params.mu != 25 {
        return Err(format!("resolved {params:?}"));
    }
    let report = benchmark::run(&ds, &params, 3, true).map_err(|e| e.to_string())?;
    let bundles = report.bundles.as_ref().expect("bundles requested");
    let detail = format!(
        "pairs {:.1} ms vs {:.1} ms ({:.2}x), bundles {:.1} ms vs {:.1} ms ({:.2}x)",
        report.pairs.sweepline_ms,
        report.pairs.checkpoint_ms,
        report.pairs.speedup,
        bundles.sweepline_ms,
        bundles.checkpoint_ms,
        bundles.speedup
    );
    let ok = report.pairs.checkpoint_ms <= 0.5 * report.pairs.sweepline_ms
        && bundles.checkpoint_ms <= 0.5 * bundles.sweepline_ms;
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn figure_fixture() -> Outcome {
    let ds = common::figure_fixture();
    let params = Params::new(1.0, 4, 3).map_err(|e| e.to_string())?;
    let expected = vec![BundleMatch::new(vec![1, 2, 3], Interval::new(10, 18))];
    let oracle = oracle_bundles(&ds, &params).map_err(|e| e.to_string())?;
    if oracle != expected {
        return Err(format!("oracle disagrees with the fixture: {oracle:?}"));
    }
    let early = PairMatch::new(0, 1, Interval::new(0, 6));
    for alg in [Algorithm::Sweepline, Algorithm::Checkpoint] {
        let bundles = sorted(cobundle::discover_bundles(&ds, &params, alg).map_err(|e| e.to_string())?);
        if bundles != expected {
            return Err(format!("{alg:?} bundles {bundles:?}"));
        }
        let pairs = discover_pairs(&ds, &params, alg).map_err(|e| e.to_string())?;
        if !pairs.contains(&early) {
            return Err(format!("{alg:?} pairs miss the early pair: {pairs:?}"));
        }
    }
    Ok("one bundle {B,C,D} on [10, 18), early pair {A,B} on [0, 6)".into())
}

fn cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cobundle"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn cli_round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let data = path("data.csv");
    cli(&["generate", "--n", "30", "--k", "200", "--seed", "11", "--output", &data])?;
    let mut outputs = Vec::new();
    for alg in ["sweepline", "checkpoint"] {
        let out = path(&format!("{alg}.json"));
        cli(&[
            "pairs", "--input", &data, "--output", &out, "--epsilon", "1.5", "--delta", "4",
            "--algorithm", alg,
        ])?;
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    if outputs[0] != outputs[1] {
        return Err("sweepline and checkpoint outputs differ".into());
    }
    let ds = cobundle::io::load_csv(Path::new(&data)).map_err(|e| e.to_string())?;
    let params = Params::pairs(1.5, 4).map_err(|e| e.to_string())?;
    let index: HashMap<&str, usize> = ds.ids().iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let json: serde_json::Value = serde_json::from_slice(&outputs[0]).map_err(|e| e.to_string())?;
    let records = json.as_array().ok_or("output is not a JSON array")?;
    if records.is_empty() {
        return Err("no matches to validate".into());
    }
    for r in records {
        let members: Vec<usize> = r["members"]
            .as_array()
            .ok_or("members missing")?
            .iter()
            .map(|m| m.as_str().and_then(|s| index.get(s).copied()).ok_or("unknown member"))
            .collect::<Result<_, _>>()?;
        let (start, end) = (
            r["start"].as_u64().ok_or("start missing")? as usize,
            r["end"].as_u64().ok_or("end missing")? as usize,
        );
        if members.len() != 2 {
            return Err(format!("pair record with {} members", members.len()));
        }
        let m = PairMatch::new(members[0], members[1], Interval::new(start, end));
        check_pair(&ds, &params, &m).map_err(|v| format!("{m:?}: {}", v.0))?;
    }
    Ok(format!("{} bytes identical, {} matches validated", outputs[0].len(), records.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("pair oracle equivalence", pair_equivalence),
        ("bundle oracle equivalence", bundle_equivalence),
        ("checkpoint covering", covering),
        ("placement optimality", placement_optimality),
        ("monotonicity in delta and epsilon", monotonicity),
        ("checkpoint speedup at desk scale", speedup),
        ("four-series fixture", figure_fixture),
        ("CLI round trip", cli_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: {name}: PASS ({detail}; {secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: {name}: FAIL ({detail}; {secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
