mod common;

use cobundle::model::{check_bundle, check_pair};
use cobundle::{
    discover_bundles_checkpoint, discover_bundles_sweepline, discover_pairs_checkpoint,
    discover_pairs_sweepline, oracle_bundles, oracle_pairs, Dataset, Params,
};
use proptest::prelude::*;

fn dataset(max_n: usize, max_k: usize) -> impl Strategy<Value = Dataset> {
    (2..=max_n, 2..=max_k, any::<u64>()).prop_map(|(n, k, seed)| {
        let mut rng = common::rng(seed);
        common::random_dataset(&mut rng, n, k)
    })
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort_unstable();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pairs_match_oracle(ds in dataset(9, 50), eps_tenths in 1u32..9, jitter in any::<bool>(), delta in 2usize..7) {
        let eps = if jitter { eps_tenths as f64 / 10.0 + 0.013 } else { eps_tenths as f64 / 10.0 };
        let params = Params::pairs(eps, delta.min(ds.k())).unwrap();
        let oracle = oracle_pairs(&ds, &params).unwrap();
        prop_assert_eq!(&sorted(discover_pairs_sweepline(&ds, &params).unwrap()), &oracle);
        prop_assert_eq!(&sorted(discover_pairs_checkpoint(&ds, &params).unwrap()), &oracle);
        for m in &oracle {
            prop_assert!(check_pair(&ds, &params, m).is_ok());
        }
    }

    #[test]
    fn bundles_match_oracle(ds in dataset(9, 35), eps_tenths in 1u32..9, delta in 2usize..6, mu in 3usize..6) {
        let params = Params::new(eps_tenths as f64 / 10.0, delta.min(ds.k()), mu).unwrap();
        let oracle = oracle_bundles(&ds, &params).unwrap();
        prop_assert_eq!(&sorted(discover_bundles_sweepline(&ds, &params).unwrap()), &oracle);
        prop_assert_eq!(&sorted(discover_bundles_checkpoint(&ds, &params).unwrap()), &oracle);
        for m in &oracle {
            prop_assert!(check_bundle(&ds, &params, m).is_ok());
        }
    }
}

#[test]
fn long_series_agree_between_algorithms() {
    let mut rng = common::rng(77);
    for _ in 0..20 {
        let ds = common::clustered_walks(&mut rng, 40, 300);
        let params = Params::new(0.4, 6, 4).unwrap();
        assert_eq!(
            sorted(discover_pairs_sweepline(&ds, &params).unwrap()),
            sorted(discover_pairs_checkpoint(&ds, &params).unwrap())
        );
        assert_eq!(
            sorted(discover_bundles_sweepline(&ds, &params).unwrap()),
            sorted(discover_bundles_checkpoint(&ds, &params).unwrap())
        );
    }
}

#[test]
fn mu_above_n_finds_nothing() {
    let ds = Dataset::from_rows(vec![vec![0.0; 5]; 3]).unwrap();
    let params = Params::new(1.0, 2, 4).unwrap();
    assert!(discover_bundles_sweepline(&ds, &params).unwrap().is_empty());
    assert!(discover_bundles_checkpoint(&ds, &params).unwrap().is_empty());
    assert!(oracle_bundles(&ds, &params).unwrap().is_empty());
}

#[test]
fn delta_longer_than_series_is_rejected() {
    let ds = Dataset::from_rows(vec![vec![0.0; 3]; 3]).unwrap();
    let params = Params::pairs(1.0, 4).unwrap();
    assert!(discover_pairs_sweepline(&ds, &params).is_err());
    assert!(discover_pairs_checkpoint(&ds, &params).is_err());
}
