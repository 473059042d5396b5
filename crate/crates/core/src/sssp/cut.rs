use std::cmp::Ordering;

use super::heap::IndexedHeap;
use super::SolveError;
use crate::cfrac::{best_approx, compare_via_approx, ApproxPair};
use crate::cover::log2_ceil;
use crate::distcmp::{DistCmp, DistCmpConfig, DistCmpConstants, DistanceComparator, NodeId};
use crate::graph::{CycleWitness, PriceFunction, WeightedDigraph};
use crate::ratnum::{is_k_short, BigRational, WordBudget};
use crate::scaling::{eps_feasible_price_with, BellmanFord, ScalingOutcome, ScalingStats};

/// Shared, read-only state for cut Dijkstra runs on one graph.
#[derive(Debug, Clone)]
pub struct CutContext {
    pub k: usize,
    pub budget: WordBudget,
    /// `p` is `2^-precision`-feasible.
    pub precision: u32,
    pub price: PriceFunction,
    /// `ra(p(u) - p(v), 2B)` at `u * n + v`.
    ra: Vec<ApproxPair>,
    n: usize,
    pub consts: DistCmpConstants,
    pub scaling: ScalingStats,
}

impl CutContext {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn approx(&self, u: usize, v: usize) -> &ApproxPair {
        &self.ra[u * self.n + v]
    }
}

#[derive(Debug, Clone)]
pub enum Preprocessed {
    Context(Box<CutContext>),
    NegativeCycle(CycleWitness),
}

/// Scaling at precision `(2k+1)B + ⌈log₂ n⌉`, then the pairwise table.
pub fn cut_preprocess(g: &WeightedDigraph, k: usize, budget: WordBudget) -> Result<Preprocessed, SolveError> {
    cut_preprocess_with(g, k, budget, DistCmpConstants::default())
}

pub fn cut_preprocess_with(
    g: &WeightedDigraph,
    k: usize,
    budget: WordBudget,
    consts: DistCmpConstants,
) -> Result<Preprocessed, SolveError> {
    let n = g.n();
    let k = k.max(1);
    let b = budget.bits();
    let precision = (2 * k as u32 + 1) * b + log2_ceil(n.max(1));
    let mut scaling = ScalingStats::default();
    let price = match eps_feasible_price_with(g, precision, &BellmanFord, &mut scaling)? {
        ScalingOutcome::NegativeCycle(c) => return Ok(Preprocessed::NegativeCycle(c)),
        ScalingOutcome::Price(p) => p,
    };
    let mut ra = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in 0..n {
            let d = price.get(u) - price.get(v);
            ra.push(best_approx(&d, 2 * b).expect("positive bit count"));
        }
    }
    Ok(Preprocessed::Context(Box::new(CutContext { k, budget, precision, price, ra, n, consts, scaling })))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CutStats {
    /// Initial `n` insertions plus every reinsertion after a countdown.
    pub heap_inserts: u64,
    /// Insertions made because the heap ran dry while countdowns were
    /// pending; zero when the countdown invariant holds.
    pub forced_inserts: u64,
    pub relaxations: u64,
    pub processed: u64,
    /// Counters of the comparison structure.
    pub comparator: Vec<(String, u64)>,
}

/// Output of one cut Dijkstra run from `source`.
#[derive(Debug, Clone)]
pub struct CutResult {
    pub source: usize,
    /// `d̃(v)`, `None` for `∞`.
    pub dist: Vec<Option<BigRational>>,
    /// Last vertex whose processing lowered `d̃(v)`.
    pub parent: Vec<Option<usize>>,
    /// Extraction order.
    pub order: Vec<usize>,
    pub processed: Vec<bool>,
    pub stats: CutStats,
}

impl CutResult {
    /// Witness path `source -> v` of weight `d̃(v)`.
    pub fn path_to(&self, v: usize) -> Option<Vec<usize>> {
        self.dist[v].as_ref()?;
        let mut p = vec![v];
        let mut x = v;
        while x != self.source {
            x = self.parent[x]?;
            p.push(x);
        }
        p.reverse();
        Some(p)
    }
}

/// `d̃ - p` with `∞` above every finite key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Finite(BigRational),
    Infinite,
}

pub fn cut_dijkstra(ctx: &CutContext, g: &WeightedDigraph, s: usize, seed: u64) -> Result<CutResult, SolveError> {
    let n = g.n();
    let budget = ctx.budget;
    let k = ctx.k as u32;
    let dc_cfg = DistCmpConfig::new(n.max(1), 2, budget).with_constants(ctx.consts);
    let mut dc = DistCmp::new(dc_cfg, seed)?;
    let mut stats = CutStats::default();
    let mut dist: Vec<Option<BigRational>> = vec![None; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut node: Vec<Option<NodeId>> = vec![None; n];
    let mut extracted = vec![false; n];
    let mut processed = vec![false; n];
    let mut countdown: Vec<Option<usize>> = vec![None; n];
    let mut pending = 0usize;
    let mut order = Vec::with_capacity(n);
    let mut heap = IndexedHeap::new(n);
    for v in 0..n {
        let key = if v == s { Key::Finite(-ctx.price.get(s).clone()) } else { Key::Infinite };
        heap.push(v, key);
        stats.heap_inserts += 1;
    }
    let tentative = |dist: &[Option<BigRational>], parent: &[Option<usize>], u: usize| -> BigRational {
        let p = parent[u].expect("countdown only for relaxed vertices");
        let w = &g.edge(p, u).expect("parent edge").weight;
        dist[p].as_ref().expect("parent was processed") + w
    };
    for _ in 0..n {
        if pending > 0 {
            for u in 0..n {
                let Some(t) = countdown[u] else { continue };
                if t <= 1 {
                    countdown[u] = None;
                    pending -= 1;
                    let key = tentative(&dist, &parent, u) - ctx.price.get(u);
                    heap.push(u, Key::Finite(key));
                    stats.heap_inserts += 1;
                } else {
                    countdown[u] = Some(t - 1);
                }
            }
        }
        if heap.is_empty() {
            let t = countdown.iter().flatten().min().copied().expect("some vertex is left");
            for u in 0..n {
                if countdown[u] == Some(t) {
                    countdown[u] = None;
                    pending -= 1;
                    let key = tentative(&dist, &parent, u) - ctx.price.get(u);
                    heap.push(u, Key::Finite(key));
                    stats.forced_inserts += 1;
                }
            }
        }
        let (v, _) = heap.pop().expect("heap holds a vertex");
        extracted[v] = true;
        order.push(v);
        let dv = if v == s {
            node[v] = Some(dc.root());
            Some(BigRational::zero())
        } else if let Some(p) = parent[v] {
            let w = &g.edge(p, v).unwrap().weight;
            node[v] = Some(dc.insert_leaf(node[p].unwrap(), w)?);
            Some(dist[p].as_ref().unwrap() + w)
        } else {
            None
        };
        dist[v] = dv;
        let Some(dv) = &dist[v] else { continue };
        if !is_k_short(dv, k, budget) {
            continue;
        }
        processed[v] = true;
        stats.processed += 1;
        let nv = node[v].unwrap();
        let mut dropped = Vec::new();
        for e in g.out_edges(v) {
            let u = e.head;
            if extracted[u] {
                continue;
            }
            stats.relaxations += 1;
            let better = match parent[u] {
                None => true,
                Some(pu) => {
                    let wpu = &g.edge(pu, u).unwrap().weight;
                    dc.compare(nv, node[pu].unwrap(), &(wpu - &e.weight))? == Ordering::Less
                }
            };
            if better {
                parent[u] = Some(v);
                dropped.push((u, e.weight.clone()));
            }
        }
        // w(vu') - p(u') vs w(vu'') - p(u'') through ra(p(u') - p(u''), 2B)
        dropped.sort_by(|(a, wa), (b, wb)| {
            if a == b {
                return Ordering::Equal;
            }
            let r = wa - wb;
            let ord = match compare_via_approx(ctx.approx(*a, *b), &r) {
                Ok(o) => o.reverse(),
                Err(_) => (wa - ctx.price.get(*a)).cmp(&(wb - ctx.price.get(*b))),
            };
            ord.then(a.cmp(b))
        });
        for (i, (u, _)) in dropped.iter().enumerate() {
            heap.remove(*u);
            let h = i + 1;
            match countdown[*u] {
                None => {
                    countdown[*u] = Some(h);
                    pending += 1;
                }
                Some(t) if h < t => countdown[*u] = Some(h),
                _ => {}
            }
        }
    }
    stats.comparator = dc.counters();
    Ok(CutResult { source: s, dist, parent, order, processed, stats })
}

/// The generic Dijkstra loop driven by a fixed enhanced order: vertices
/// are taken in `order` and relax their unextracted out-neighbours when
/// `processed` holds. Exact arithmetic throughout.
pub fn replay_enhanced_order(
    g: &WeightedDigraph,
    s: usize,
    order: &[usize],
    processed: &[bool],
) -> Vec<Option<BigRational>> {
    let n = g.n();
    let mut d: Vec<Option<BigRational>> = vec![None; n];
    d[s] = Some(BigRational::zero());
    let mut done = vec![false; n];
    for &v in order {
        done[v] = true;
        if !processed[v] {
            continue;
        }
        let Some(dv) = d[v].clone() else { continue };
        for e in g.out_edges(v) {
            if done[e.head] {
                continue;
            }
            let cand = &dv + &e.weight;
            if d[e.head].as_ref().is_none_or(|x| cand < *x) {
                d[e.head] = Some(cand);
            }
        }
    }
    d
}
