use std::cmp::Ordering;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratpath::distcmp::{DistCmp, DistCmpConfig, DistanceComparator, ExactComparator, PairwiseDelta};
use ratpath::ratnum::{rat, BigRational, WordBudget};

fn random_tree(n: usize, seed: u64, max_num: i64, max_den: i64) -> Vec<(usize, BigRational)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=n)
        .map(|v| {
            let p = if rng.gen_bool(0.7) { v - 1 } else { rng.gen_range(0..v) };
            (p, rat(rng.gen_range(0..=max_num), rng.gen_range(1..=max_den)))
        })
        .collect()
}

/// Queries mixing exact ties, near misses and random short comparands.
fn queries(ex: &ExactComparator, count: usize, seed: u64, budget: WordBudget) -> Vec<(usize, usize, BigRational)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ex.len();
    let mut out = Vec::new();
    while out.len() < count {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let d = ex.distance(u) - ex.distance(v);
        let beta = match rng.gen_range(0..3) {
            0 => d,
            1 => d + rat(rng.gen_range(-1..=1), rng.gen_range(50..200)),
            _ => rat(rng.gen_range(-30..30), rng.gen_range(1..20)),
        };
        if budget.is_short(&beta, 1) {
            out.push((u, v, beta));
        }
    }
    out
}

#[test]
fn distcmp_agrees_with_exact_on_random_trees() {
    for seed in 0..4 {
        let tree = random_tree(150, seed, 12, 7);
        let budget = WordBudget::new(12).unwrap();
        let mut dc = DistCmp::new(DistCmpConfig::new(150, 1, budget), seed).unwrap();
        let mut ex = ExactComparator::new();
        for (p, w) in &tree {
            dc.insert_leaf(*p, w).unwrap();
            ex.insert_leaf(*p, w).unwrap();
        }
        for (u, v, beta) in queries(&ex, 3000, seed + 100, budget) {
            assert_eq!(dc.compare(u, v, &beta).unwrap(), ex.compare(u, v, &beta).unwrap(), "{u} {v} {beta}");
        }
        let st = dc.stats();
        assert!(st.difficult[0] > 0);
    }
}

#[test]
fn interleaved_inserts_and_rebuilds() {
    let budget = WordBudget::new(10).unwrap();
    let mut dc = DistCmp::new(DistCmpConfig::new(8, 1, budget), 9).unwrap();
    let mut ex = ExactComparator::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..120 {
        let p = rng.gen_range(0..ex.len());
        let w = rat(rng.gen_range(0..9), rng.gen_range(1..6));
        dc.insert_leaf(p, &w).unwrap();
        ex.insert_leaf(p, &w).unwrap();
        for _ in 0..5 {
            let u = rng.gen_range(0..ex.len());
            let v = rng.gen_range(0..ex.len());
            let beta = ex.distance(u) - ex.distance(v) + rat(rng.gen_range(-1..=1), 97);
            if !budget.is_short(&beta, 1) {
                continue;
            }
            assert_eq!(dc.compare(u, v, &beta).unwrap(), ex.compare(u, v, &beta).unwrap());
        }
    }
    assert!(dc.stats().reinitializations >= 3);
}

#[test]
fn pairwise_delta_agrees_with_exact() {
    let tree = random_tree(200, 3, 20, 9);
    let budget = WordBudget::new(12).unwrap();
    let mut pd = PairwiseDelta::new(200, 4, 1, budget, 2, 1);
    let mut ex = ExactComparator::new();
    for (p, w) in &tree {
        pd.insert_leaf(*p, w).unwrap();
        ex.insert_leaf(*p, w).unwrap();
    }
    for (u, v, beta) in queries(&ex, 3000, 77, budget) {
        assert_eq!(pd.compare(u, v, &beta).unwrap(), ex.compare(u, v, &beta).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distcmp_sign_matches(
        weights in prop::collection::vec((0usize..1000, 0i64..8, 1i64..5), 1..40),
        qs in prop::collection::vec((0usize..1000, 0usize..1000, -20i64..20, 1i64..16), 1..60),
        seed in any::<u64>(),
    ) {
        let budget = WordBudget::new(8).unwrap();
        let mut dc = DistCmp::new(DistCmpConfig::new(weights.len(), 1, budget), seed).unwrap();
        let mut ex = ExactComparator::new();
        for (p, a, b) in &weights {
            let p = p % ex.len();
            let w = rat(*a, *b);
            dc.insert_leaf(p, &w).unwrap();
            ex.insert_leaf(p, &w).unwrap();
        }
        for (u, v, a, b) in qs {
            let (u, v) = (u % ex.len(), v % ex.len());
            let beta = rat(a, b);
            let want = ex.compare(u, v, &beta).unwrap();
            prop_assert_eq!(dc.compare(u, v, &beta).unwrap(), want);
            let d = ex.distance(u) - ex.distance(v);
            if budget.is_short(&d, 1) {
                prop_assert_eq!(dc.compare(u, v, &d).unwrap(), Ordering::Equal);
            }
        }
    }
}

#[test]
fn schedules_are_valid_for_small_inputs() {
    for capacity in 1..300 {
        for bits in 2..=12 {
            for c in 1..=3 {
                let cfg = DistCmpConfig::new(capacity, c, WordBudget::new(bits).unwrap());
                let s = ratpath::distcmp::Schedule::new(&cfg).unwrap();
                assert!(s.levels.iter().take(s.t).all(|p| p.sim_ell >= 4 * p.sim_bits + 5));
            }
        }
    }
}
