use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratpath::graph::{
    check_eps_feasible, find_negative_cycle, gen_planted_negative_cycle, gen_random, NegativeMode, WeightClass,
    WeightedDigraph,
};
use ratpath::ratnum::{rat, BigRational, Integer};
use ratpath::scaling::{
    assemble_price, eps_feasible_price, eps_feasible_price_with, integer_sssp, scaled_weight, BellmanFord,
    IntOutcome, ScalingOutcome, ScalingStats,
};

/// `|V|` synchronous rounds, then one more to expose a negative cycle.
fn naive_int_sssp(adj: &[Vec<(usize, i128)>], s: usize) -> Option<Vec<Option<i128>>> {
    let n = adj.len();
    let mut d: Vec<Option<i128>> = vec![None; n];
    d[s] = Some(0);
    for round in 0..=n {
        let prev = d.clone();
        let mut changed = false;
        for u in 0..n {
            let Some(du) = prev[u] else { continue };
            for &(v, w) in &adj[u] {
                if d[v].is_none_or(|dv| du + w < dv) {
                    d[v] = Some(du + w);
                    changed = true;
                }
            }
        }
        if !changed {
            return Some(d);
        }
        if round == n {
            return None;
        }
    }
    unreachable!()
}

#[test]
fn integer_sssp_matches_naive_relaxation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let n = rng.gen_range(1..9);
        let mut adj = vec![Vec::new(); n];
        for _ in 0..rng.gen_range(0..2 * n * n / 3 + 1) {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            adj[u].push((v, rng.gen_range(-3i128..12)));
        }
        match (integer_sssp(&adj, 0), naive_int_sssp(&adj, 0)) {
            (IntOutcome::Distances(a), Some(b)) => assert_eq!(a, b),
            (IntOutcome::NegativeCycle(c), None) => {
                let mut sum = 0i128;
                for i in 0..c.len() {
                    let (a, b) = (c[i], c[(i + 1) % c.len()]);
                    sum += adj[a].iter().filter(|e| e.0 == b).map(|e| e.1).min().unwrap();
                }
                assert!(sum < 0);
            }
            (x, y) => panic!("disagree: {x:?} vs {y:?}"),
        }
    }
}

proptest! {
    #[test]
    fn scaled_weight_inequalities(num in -5000i64..5000, den in 1i64..300, j in 0u32..20, gap in 1u32..12) {
        let w = rat(num, den);
        let l = j + gap;
        let wj = scaled_weight(&w, j);
        let wj1 = scaled_weight(&w, j + 1);
        let wl = scaled_weight(&w, l);
        let two_j_w = w.shl(j);
        let as_rat = |x: &Integer| BigRational::from_integer(x.clone());
        prop_assert!(two_j_w <= as_rat(&wj));
        prop_assert!(as_rat(&wj) <= &two_j_w + rat(2, 1));
        prop_assert!(wj1 <= Integer::from(&wj * 2));
        prop_assert!(wj1 >= Integer::from(&wj * 2) - 2);
        let f = Integer::from(1) << gap;
        prop_assert!(wl <= Integer::from(&wj * &f));
        prop_assert!(wl >= Integer::from(&wj * &f) - Integer::from(&f * 2));
    }

    #[test]
    fn assemble_matches_naive_sum(ps in prop::collection::vec(prop::collection::vec(-1000i128..1000, 3), 1..40)) {
        let got = assemble_price(&ps);
        for v in 0..3 {
            let naive: BigRational = ps.iter().enumerate().map(|(i, p)| BigRational::dyadic(p[v], i as u32)).fold(BigRational::zero(), |a, b| a + b);
            prop_assert_eq!(&got.0[v], &naive);
        }
    }
}

#[test]
fn priced_graphs_become_feasible() {
    for seed in 0..60u64 {
        let n = 5 + (seed as usize % 30);
        let m = (n * 3).min(n * (n - 1));
        let class = WeightClass::Rational { max_num: 20, max_den: 9 };
        let g = gen_random(n, m, seed, class, NegativeMode::Priced).unwrap();
        for k in [1u32, 8, 32] {
            let mut stats = ScalingStats::default();
            let ScalingOutcome::Price(p) = eps_feasible_price_with(&g, k, &BellmanFord, &mut stats).unwrap() else {
                panic!("priced graph has no negative cycle");
            };
            assert!(check_eps_feasible(&g, &p, &BigRational::dyadic(1, k)));
            let bound = Integer::from(1) << (k + 1);
            assert!(p.0.iter().all(|x| bound.is_divisible(x.denom())));
            assert_eq!(stats.iterations, k as u64 + 2);
        }
    }
}

#[test]
fn signed_random_graphs_agree_on_cycles() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let n = rng.gen_range(2..12);
        let mut g = WeightedDigraph::new(n);
        for _ in 0..rng.gen_range(1..3 * n) {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                g.add_edge(u, v, rat(rng.gen_range(-4..12), rng.gen_range(1..7))).unwrap();
            }
        }
        let oracle = find_negative_cycle(&g);
        match eps_feasible_price(&g, 6).unwrap() {
            ScalingOutcome::Price(p) => {
                assert!(oracle.is_none());
                assert!(check_eps_feasible(&g, &p, &rat(1, 64)));
            }
            ScalingOutcome::NegativeCycle(c) => {
                assert!(oracle.is_some());
                assert!(c.verify(&g));
            }
        }
    }
}

#[test]
fn planted_cycles_are_found() {
    // The planted cycle weighs at most -1/7 over fewer than 26 edges, so no
    // 2^-16-feasible price exists; at k = 2 either answer is allowed.
    for seed in 0..40u64 {
        let n = 6 + seed as usize % 20;
        let class = WeightClass::Rational { max_num: 10, max_den: 7 };
        let g = gen_planted_negative_cycle(n, 2 * n, seed, class, 2 + seed as usize % (n - 2)).unwrap();
        match eps_feasible_price(&g, 16).unwrap() {
            ScalingOutcome::NegativeCycle(c) => assert!(c.verify(&g)),
            other => panic!("missed cycle: {other:?}"),
        }
        match eps_feasible_price(&g, 2).unwrap() {
            ScalingOutcome::NegativeCycle(c) => assert!(c.verify(&g)),
            ScalingOutcome::Price(p) => assert!(check_eps_feasible(&g, &p, &rat(1, 4))),
        }
    }
}
