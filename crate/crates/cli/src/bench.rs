use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

use ratpath::graph::{bf_exact, gen_random, gen_small_diff_chain, BfOutcome, NegativeMode, WeightClass, WeightedDigraph};
use ratpath::ratnum::BigRational;
use ratpath::sssp::{dijkstra_nonneg_with, negative_sssp, NegConfig, NegOutcome, NonnegConfig, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Suite {
    /// Chained smalldiff instances: the comparison-structure solver against heap Dijkstra on exact distances.
    NonnegVsNaive,
    /// Priced random graphs: the negative pipeline against exact Bellman-Ford.
    NegVsBf,
    /// Operation counters of the negative pipeline on priced random graphs.
    Counters,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Vertex counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [64usize, 128])]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0u64])]
    pub seeds: Vec<u64>,
    /// Smalldiff gadgets draw on the primes below this bound.
    #[arg(long, default_value_t = 12)]
    pub prime_bound: u64,
    /// Write the rows as a JSON array here.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub suite: Suite,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// Wall time of the library solver in microseconds.
    pub solver_us: u128,
    /// Wall time of the exact baseline in microseconds, when one ran.
    pub baseline_us: Option<u128>,
    /// Solver and baseline agree exactly.
    pub agree: bool,
    pub counters: BTreeMap<String, u64>,
}

/// Textbook Dijkstra keyed by exact rational distances.
pub fn naive_dijkstra(g: &WeightedDigraph, s: usize) -> Vec<Option<BigRational>> {
    let mut dist: Vec<Option<BigRational>> = vec![None; g.n()];
    let mut done = vec![false; g.n()];
    let mut heap = BinaryHeap::new();
    dist[s] = Some(BigRational::zero());
    heap.push(Reverse((BigRational::zero(), s)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for e in g.out_edges(u) {
            let nd = &d + &e.weight;
            if dist[e.head].as_ref().is_none_or(|x| nd < *x) {
                dist[e.head] = Some(nd.clone());
                heap.push(Reverse((nd, e.head)));
            }
        }
    }
    dist
}

fn micros(t: Instant) -> u128 {
    t.elapsed().as_micros()
}

/// `copies` fresh-prime gadgets in series, sized to roughly `n` vertices.
fn chained_instance(n: usize, prime_bound: u64) -> Result<(WeightedDigraph, usize)> {
    let one = gen_small_diff_chain(prime_bound, false, 1, false)?;
    let per = one.graph.n().saturating_sub(1).max(1);
    let copies = (n.saturating_sub(1) / per).max(1);
    let sd = gen_small_diff_chain(prime_bound, false, copies, true)?;
    Ok((sd.graph, sd.source))
}

fn priced(n: usize, seed: u64) -> Result<WeightedDigraph> {
    let m = (4 * n).min(n * n.saturating_sub(1));
    Ok(gen_random(n, m, seed, WeightClass::Rational { max_num: 9, max_den: 6 }, NegativeMode::Priced)?)
}

pub fn run_suite(suite: Suite, sizes: &[usize], seeds: &[u64], prime_bound: u64) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &n in sizes {
        for &seed in seeds {
            rows.push(match suite {
                Suite::NonnegVsNaive => nonneg_vs_naive(n, seed, prime_bound)?,
                Suite::NegVsBf => neg_vs_bf(n, seed, true)?,
                Suite::Counters => neg_vs_bf(n, seed, false)?,
            });
        }
    }
    Ok(rows)
}

fn nonneg_vs_naive(n: usize, seed: u64, prime_bound: u64) -> Result<Row> {
    let (g, s) = chained_instance(n, prime_bound)?;
    let cfg = NonnegConfig { strategy: Strategy::DistCmp, seed, ..Default::default() };
    let t = Instant::now();
    let run = dijkstra_nonneg_with(&g, s, &cfg)?;
    let solver_us = micros(t);
    let t = Instant::now();
    let naive = naive_dijkstra(&g, s);
    let baseline_us = Some(micros(t));
    let ours = run.result.distances()?;
    let agree = (0..g.n()).all(|v| !run.result.is_reachable(v) || ours[v] == naive[v]);
    let mut counters: BTreeMap<String, u64> = run.stats.comparator.into_iter().collect();
    counters.insert("heap_inserts".into(), run.stats.heap_inserts);
    counters.insert("comparisons".into(), run.stats.comparisons);
    counters.insert("budget_bits".into(), run.stats.budget_bits as u64);
    Ok(Row { suite: Suite::NonnegVsNaive, n: g.n(), m: g.m(), seed, solver_us, baseline_us, agree, counters })
}

fn neg_vs_bf(n: usize, seed: u64, baseline: bool) -> Result<Row> {
    let g = priced(n, seed)?;
    let cfg = NegConfig { seed, ..Default::default() };
    let t = Instant::now();
    let out = negative_sssp(&g, 0, &cfg)?;
    let solver_us = micros(t);
    let NegOutcome::Tree(run) = out else { bail!("priced instance n={n} seed={seed} reported a negative cycle") };
    let (baseline_us, agree) = if baseline {
        let t = Instant::now();
        let bf = bf_exact(&g, 0, None);
        let us = micros(t);
        let agree = matches!(&bf, BfOutcome::Distances { dist, .. } if *dist == run.distances);
        (Some(us), agree)
    } else {
        let bound = n as f64 + 2.0 * n as f64 * (n as f64).sqrt();
        (None, run.stats.heap_inserts_max as f64 <= bound && run.stats.forced_inserts == 0)
    };
    let st = &run.stats;
    let mut counters: BTreeMap<String, u64> = st.comparator.iter().cloned().collect();
    for (k, v) in [
        ("k", st.k as u64),
        ("hitting_set", st.hitting_set as u64),
        ("scaling_iterations", st.scaling_iterations),
        ("scaling_pruned", st.scaling_pruned),
        ("heap_inserts_total", st.heap_inserts_total),
        ("heap_inserts_max", st.heap_inserts_max),
        ("heap_insert_bound", n as u64 + (2.0 * n as f64 * (n as f64).sqrt()).floor() as u64),
        ("forced_inserts", st.forced_inserts),
        ("relaxations", st.relaxations),
        ("witness_fallbacks", st.witness_fallbacks),
    ] {
        counters.insert(k.into(), v);
    }
    let suite = if baseline { Suite::NegVsBf } else { Suite::Counters };
    Ok(Row { suite, n, m: g.m(), seed, solver_us, baseline_us, agree, counters })
}

pub fn render(rows: &[Row]) -> String {
    let mut out = String::from("suite n m seed solver_us baseline_us agree counters\n");
    for r in rows {
        let base = r.baseline_us.map_or("-".to_string(), |x| x.to_string());
        let ctr: Vec<String> = r.counters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let suite = serde_json::to_value(r.suite).unwrap();
        out.push_str(&format!(
            "{} {} {} {} {} {} {} {}\n",
            suite.as_str().unwrap(),
            r.n,
            r.m,
            r.seed,
            r.solver_us,
            base,
            r.agree,
            ctr.join(",")
        ));
    }
    out
}

pub fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let rows = run_suite(a.suite, &a.sizes, &a.seeds, a.prime_bound)?;
    print!("{}", render(&rows));
    if let Some(p) = &a.json {
        let text = serde_json::to_string_pretty(&rows)?;
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    if rows.iter().any(|r| !r.agree) {
        bail!("some runs disagreed with their baseline or broke a counter bound");
    }
    Ok(())
}
