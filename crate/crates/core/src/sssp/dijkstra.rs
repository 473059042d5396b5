use std::cmp::Ordering;

use super::heap::CmpHeap;
use super::SolveError;
use crate::distcmp::{
    DistCmp, DistCmpConfig, DistCmpConstants, DistanceComparator, ExactComparator, NodeId, PairwiseDelta,
};
use crate::graph::{augment_source, SsspResult, TreeEdge, WeightedDigraph};
use crate::ratnum::{BigRational, WordBudget};

/// How heap keys `δ(z) + w` are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Exact tree distances.
    ExactOracle,
    /// The hierarchical comparison structure.
    #[default]
    DistCmp,
    /// Hitting-set baseline.
    PairwiseDelta,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" | "exact_oracle" => Ok(Strategy::ExactOracle),
            "distcmp" => Ok(Strategy::DistCmp),
            "pairwise" | "pairwise_delta" => Ok(Strategy::PairwiseDelta),
            _ => Err(format!("unknown strategy `{s}` (exact, distcmp, pairwise)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonnegConfig {
    pub strategy: Strategy,
    pub seed: u64,
    pub consts: DistCmpConstants,
    /// Word size; fitted to the weights when absent.
    pub budget: Option<WordBudget>,
}

impl Default for NonnegConfig {
    fn default() -> Self {
        NonnegConfig { strategy: Strategy::DistCmp, seed: 0, consts: DistCmpConstants::default(), budget: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NonnegStats {
    pub heap_inserts: u64,
    pub relaxations: u64,
    pub comparisons: u64,
    pub budget_bits: u32,
    /// Counters reported by the comparison structure.
    pub comparator: Vec<(String, u64)>,
}

#[derive(Debug, Clone)]
pub struct NonnegRun {
    pub result: SsspResult,
    pub stats: NonnegStats,
}

struct Entry {
    v: usize,
    z: usize,
    zn: NodeId,
    w: BigRational,
    aux: bool,
}

/// Shortest-path tree from `s` on the augmented graph. Vertices that `s`
/// cannot reach hang off auxiliary edges.
pub fn dijkstra_nonneg(g: &WeightedDigraph, s: usize, strategy: Strategy) -> Result<SsspResult, SolveError> {
    let cfg = NonnegConfig { strategy, ..Default::default() };
    dijkstra_nonneg_with(g, s, &cfg).map(|r| r.result)
}

pub fn dijkstra_nonneg_with(g: &WeightedDigraph, s: usize, cfg: &NonnegConfig) -> Result<NonnegRun, SolveError> {
    if let Some(e) = g.edges().iter().find(|e| e.weight.is_negative()) {
        return Err(SolveError::NegativeWeight { tail: e.tail, head: e.head });
    }
    let h = augment_source(g, s)?;
    let budget = cfg.budget.unwrap_or_else(|| WordBudget::fitting(h.weights()));
    let n = h.n();
    match cfg.strategy {
        Strategy::ExactOracle => run(&h, s, ExactComparator::new(), budget),
        Strategy::DistCmp => {
            let dc_cfg = DistCmpConfig::new(n.max(1), 2, budget).with_constants(cfg.consts);
            run(&h, s, DistCmp::new(dc_cfg, cfg.seed)?, budget)
        }
        Strategy::PairwiseDelta => {
            let m = h.m().max(1);
            let hop = n.div_ceil((m as f64).cbrt().ceil().max(1.0) as usize).max(1);
            run(&h, s, PairwiseDelta::new(n, hop, 2, budget, cfg.consts.gamma, cfg.seed), budget)
        }
    }
}

fn run<C: DistanceComparator>(
    g: &WeightedDigraph,
    s: usize,
    mut dc: C,
    budget: WordBudget,
) -> Result<NonnegRun, SolveError> {
    let n = g.n();
    let mut stats = NonnegStats { budget_bits: budget.bits(), ..Default::default() };
    let mut visited = vec![false; n];
    let mut parent: Vec<Option<TreeEdge>> = vec![None; n];
    let mut heap: CmpHeap<Entry> = CmpHeap::new();
    let mut failure = None;
    let mut comparisons = 0u64;
    visited[s] = true;
    let root = dc.root();
    {
        let mut cmp = |a: &Entry, b: &Entry| key_cmp(&mut dc, a, b, &mut failure, &mut comparisons);
        for e in g.out_edges(s) {
            stats.relaxations += 1;
            heap.push(Entry { v: e.head, z: s, zn: root, w: e.weight.clone(), aux: e.aux }, &mut cmp);
        }
    }
    loop {
        let next = {
            let mut cmp = |a: &Entry, b: &Entry| key_cmp(&mut dc, a, b, &mut failure, &mut comparisons);
            heap.pop(&mut cmp)
        };
        if let Some(err) = failure.take() {
            return Err(err);
        }
        let Some(top) = next else { break };
        if visited[top.v] {
            continue;
        }
        visited[top.v] = true;
        let node = dc.insert_leaf(top.zn, &top.w)?;
        let v = top.v;
        parent[v] = Some(TreeEdge { parent: top.z, weight: top.w, aux: top.aux });
        let mut cmp = |a: &Entry, b: &Entry| key_cmp(&mut dc, a, b, &mut failure, &mut comparisons);
        for e in g.out_edges(v) {
            if !visited[e.head] {
                stats.relaxations += 1;
                heap.push(Entry { v: e.head, z: v, zn: node, w: e.weight.clone(), aux: e.aux }, &mut cmp);
            }
        }
    }
    stats.heap_inserts = heap.pushes();
    stats.comparisons = comparisons;
    stats.comparator = dc.counters();
    Ok(NonnegRun { result: SsspResult { source: s, parent }, stats })
}

/// `δ(z_a) + w_a` against `δ(z_b) + w_b`, asked as `δ(z_a) - δ(z_b)` vs
/// `w_b - w_a`; ties go to the smaller vertex, then the smaller parent.
fn key_cmp<C: DistanceComparator>(
    dc: &mut C,
    a: &Entry,
    b: &Entry,
    failure: &mut Option<SolveError>,
    comparisons: &mut u64,
) -> Ordering {
    let ord = if a.zn == b.zn {
        a.w.cmp(&b.w)
    } else {
        *comparisons += 1;
        match dc.compare(a.zn, b.zn, &(&b.w - &a.w)) {
            Ok(o) => o,
            Err(e) => {
                failure.get_or_insert(e.into());
                Ordering::Equal
            }
        }
    };
    ord.then(a.v.cmp(&b.v)).then(a.z.cmp(&b.z))
}
