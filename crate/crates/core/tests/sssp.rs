use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratpath::graph::{
    bf_exact, gen_planted_negative_cycle, gen_random, gen_small_diff, verify_sssp, BfOutcome, NegativeMode,
    VerifyMode, WeightClass, WeightedDigraph,
};
use ratpath::ratnum::{rat, BigRational, WordBudget};
use ratpath::sssp::{
    cut_dijkstra, cut_preprocess, default_k, dijkstra_nonneg, hitting_graph, negative_sssp, replay_enhanced_order,
    sample_hitting_set, CutContext, NegConfig, NegOutcome, Preprocessed, Strategy,
};

fn oracle(g: &WeightedDigraph, s: usize) -> Vec<Option<BigRational>> {
    match bf_exact(g, s, None) {
        BfOutcome::Distances { dist, .. } => dist,
        BfOutcome::NegativeCycle(_) => panic!("unexpected negative cycle"),
    }
}

fn reachable_distances(r: &ratpath::graph::SsspResult) -> Vec<Option<BigRational>> {
    let d = r.distances().unwrap();
    d.into_iter().enumerate().map(|(v, x)| x.filter(|_| r.is_reachable(v))).collect()
}

fn random_class(rng: &mut ChaCha8Rng) -> WeightClass {
    match rng.gen_range(0..3) {
        0 => WeightClass::Integer { max: rng.gen_range(1..50) },
        1 => WeightClass::Rational { max_num: rng.gen_range(1..30), max_den: rng.gen_range(1..30) },
        _ => WeightClass::Word { bits: rng.gen_range(4..10) },
    }
}

#[test]
fn nonneg_strategies_match_bellman_ford() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for seed in 0..60u64 {
        let n = rng.gen_range(1..60);
        let m = rng.gen_range(0..=(n * (n - 1)).min(300));
        let g = gen_random(n, m, seed, random_class(&mut rng), NegativeMode::None).unwrap();
        let want = oracle(&g, 0);
        for st in [Strategy::ExactOracle, Strategy::DistCmp, Strategy::PairwiseDelta] {
            let r = dijkstra_nonneg(&g, 0, st).unwrap();
            assert_eq!(reachable_distances(&r), want, "seed {seed} {st:?}");
            assert!(verify_sssp(&ratpath::graph::augment_source(&g, 0).unwrap(), &r, VerifyMode::Exact)
                .unwrap()
                .is_valid());
        }
    }
}

#[test]
fn gadgets_resolve_their_gap() {
    for bound in [3u64, 6, 12, 20, 30] {
        let sd = gen_small_diff(bound, true).unwrap();
        let r = dijkstra_nonneg(&sd.graph, sd.source, Strategy::DistCmp).unwrap();
        assert_eq!(r.distances().unwrap()[sd.target], Some(sd.distance()), "bound {bound}");
    }
}

fn context(g: &WeightedDigraph, k: usize) -> Box<CutContext> {
    match cut_preprocess(g, k, WordBudget::fitting(g.weights())).unwrap() {
        Preprocessed::Context(c) => c,
        Preprocessed::NegativeCycle(c) => panic!("unexpected cycle {c:?}"),
    }
}

#[test]
fn cut_dijkstra_dominates_and_hits_hop_bounded_distances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for seed in 0..40u64 {
        let n = rng.gen_range(2..40);
        let m = rng.gen_range(n..=(n * (n - 1)).min(4 * n));
        let g = gen_random(n, m, seed, WeightClass::Rational { max_num: 9, max_den: 6 }, NegativeMode::Priced)
            .unwrap();
        for k in [1, 2, default_k(n), n] {
            let ctx = context(&g, k);
            let s = rng.gen_range(0..n);
            let r = cut_dijkstra(&ctx, &g, s, seed).unwrap();
            let exact = oracle(&g, s);
            let hop = match bf_exact(&g, s, Some(k)) {
                BfOutcome::Distances { dist, .. } => dist,
                _ => unreachable!(),
            };
            for v in 0..n {
                match (&r.dist[v], &exact[v]) {
                    (Some(d), Some(e)) => assert!(d >= e),
                    (Some(_), None) => panic!("finite estimate for an unreachable vertex"),
                    _ => {}
                }
                if hop[v].is_some() && hop[v] == exact[v] {
                    assert_eq!(r.dist[v], exact[v], "seed {seed} k {k} v {v}");
                }
                if let Some(d) = &r.dist[v] {
                    let p = r.path_to(v).unwrap();
                    assert_eq!(&g.walk_weight(&p, false).unwrap(), d);
                }
            }
            assert_eq!(replay_enhanced_order(&g, s, &r.order, &r.processed), r.dist);
            let nf = n as f64;
            assert!(r.stats.heap_inserts as f64 <= nf + 2.0 * nf * nf.sqrt());
            assert_eq!(r.stats.forced_inserts, 0);
        }
    }
}

#[test]
fn cut_dijkstra_with_k_n_is_dijkstra_on_nonnegative_graphs() {
    for seed in 0..20u64 {
        let n = 5 + seed as usize;
        let g = gen_random(n, 3 * n, seed, WeightClass::Rational { max_num: 7, max_den: 5 }, NegativeMode::None)
            .unwrap();
        let ctx = context(&g, n);
        let r = cut_dijkstra(&ctx, &g, 0, 1).unwrap();
        let d = dijkstra_nonneg(&g, 0, Strategy::DistCmp).unwrap();
        assert_eq!(r.dist, reachable_distances(&d));
    }
}

#[test]
fn negative_pipeline_matches_bellman_ford() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for seed in 0..30u64 {
        let n = rng.gen_range(2..40);
        let m = rng.gen_range(n - 1..=(n * (n - 1)).min(4 * n));
        let g = gen_random(n, m, seed, random_class(&mut rng), NegativeMode::Priced).unwrap();
        for k in [2, default_k(n)] {
            let cfg = NegConfig { k: Some(k), seed, ..Default::default() };
            let NegOutcome::Tree(run) = negative_sssp(&g, 0, &cfg).unwrap() else { panic!("seed {seed}") };
            let want = oracle(&g, 0);
            assert_eq!(run.result.distances().unwrap(), want, "seed {seed} k {k}");
            assert_eq!(run.distances, want);
            assert_eq!(run.stats.witness_fallbacks, 0);
        }
    }
}

#[test]
fn hitting_graph_dominates() {
    let g = gen_random(25, 80, 9, WeightClass::Rational { max_num: 5, max_den: 4 }, NegativeMode::Priced).unwrap();
    let ctx = context(&g, 3);
    let m = sample_hitting_set(25, 0, 3, 2.0, 5);
    let runs: Vec<_> = m.iter().map(|&z| cut_dijkstra(&ctx, &g, z, 0).unwrap()).collect();
    let h = hitting_graph(&m, &runs);
    for (i, &u) in m.iter().enumerate() {
        let du = oracle(&g, u);
        let dh = oracle(&h, i);
        for (j, &v) in m.iter().enumerate() {
            if let Some(x) = &dh[j] {
                assert!(x >= du[v].as_ref().unwrap());
            }
        }
    }
}

#[test]
fn planted_cycles_are_reported() {
    for seed in 0..20u64 {
        let n = 5 + seed as usize % 30;
        let g = gen_planted_negative_cycle(n, 2 * n, seed, WeightClass::Rational { max_num: 6, max_den: 5 }, 3)
            .unwrap();
        match negative_sssp(&g, 0, &NegConfig { seed, ..Default::default() }).unwrap() {
            NegOutcome::NegativeCycle(c, _) => assert!(c.verify(&g)),
            NegOutcome::Tree(_) => panic!("seed {seed}: cycle missed"),
        }
    }
}

#[test]
fn zero_weight_cycles_are_spliced_out() {
    // 0 -> 1 -> 2 -> 1 forms a zero cycle between 1 and 2
    let g = WeightedDigraph::from_edges(
        4,
        [(0, 1, rat(1, 2)), (1, 2, rat(-1, 3)), (2, 1, rat(1, 3)), (2, 3, rat(1, 5)), (0, 3, rat(1, 1))],
    )
    .unwrap();
    for k in 1..=4 {
        let NegOutcome::Tree(run) = negative_sssp(&g, 0, &NegConfig { k: Some(k), ..Default::default() }).unwrap()
        else {
            panic!()
        };
        assert_eq!(run.result.distances().unwrap(), oracle(&g, 0));
    }
}
