#![allow(dead_code)]

use cobundle::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random walks whose values live on a 0.1 grid, so exact ties and exact
/// ε distances are common.
pub fn grid_walks(rng: &mut impl Rng, n: usize, k: usize) -> Dataset {
    let rows = (0..n)
        .map(|_| {
            let mut x: i32 = rng.random_range(-6..=6);
            (0..k)
                .map(|_| {
                    x += rng.random_range(-2..=2);
                    x as f64 / 10.0
                })
                .collect()
        })
        .collect();
    Dataset::from_rows(rows).unwrap()
}

/// Continuous walks started from a handful of shared clusters so groups
/// form and dissolve over time.
pub fn clustered_walks(rng: &mut impl Rng, n: usize, k: usize) -> Dataset {
    let centers: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
    let rows = (0..n)
        .map(|_| {
            let mut x = centers[rng.random_range(0..centers.len())] + rng.random_range(-0.2..0.2);
            (0..k)
                .map(|_| {
                    x += rng.random_range(-0.25..0.25);
                    x
                })
                .collect()
        })
        .collect();
    Dataset::from_rows(rows).unwrap()
}

pub fn random_dataset(rng: &mut impl Rng, n: usize, k: usize) -> Dataset {
    if rng.random_bool(0.5) {
        grid_walks(rng, n, k)
    } else {
        clustered_walks(rng, n, k)
    }
}

/// An ε that is sometimes an exact grid multiple and sometimes not.
pub fn random_epsilon(rng: &mut impl Rng) -> f64 {
    if rng.random_bool(0.5) {
        rng.random_range(1..=8) as f64 / 10.0
    } else {
        rng.random_range(0.05..0.9)
    }
}

/// Four series: the first two stay close early, the last three stay close
/// later.
pub fn figure_fixture() -> Dataset {
    let at = |t: usize| match t {
        0..=5 => [0.0, 0.5, 10.0, -10.0],
        10..=17 => [20.0, 5.0, 5.4, 5.8],
        _ => [20.0, 5.0, 10.0, -10.0],
    };
    let rows = (0..4).map(|s| (0..20).map(|t| at(t)[s]).collect()).collect();
    Dataset::new(
        ["A", "B", "C", "D"].map(String::from).to_vec(),
        rows,
    )
    .unwrap()
}
