use std::collections::{HashMap, HashSet, VecDeque};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cut::{cut_dijkstra, cut_preprocess_with, CutContext, CutResult, Preprocessed};
use super::SolveError;
use crate::distcmp::DistCmpConstants;
use crate::graph::{
    bf_exact, find_negative_cycle, verify_sssp, BfOutcome, CycleWitness, SsspResult, TreeEdge, VerifyMode,
    WeightedDigraph,
};
use crate::ratnum::{BigRational, WordBudget};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegConfig {
    /// Hop parameter; `⌈√n⌉` when absent.
    pub k: Option<usize>,
    /// Hitting-set oversampling factor `γ`.
    pub gamma: f64,
    pub seed: u64,
    pub verify: VerifyMode,
    pub consts: DistCmpConstants,
    /// Word size; fitted to the weights when absent.
    pub budget: Option<WordBudget>,
}

impl Default for NegConfig {
    fn default() -> Self {
        NegConfig {
            k: None,
            gamma: 2.0,
            seed: 0,
            verify: VerifyMode::Fast,
            consts: DistCmpConstants::default(),
            budget: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NegStats {
    pub k: usize,
    pub budget_bits: u32,
    pub hitting_set: usize,
    pub scaling_iterations: u64,
    pub scaling_pruned: u64,
    pub heap_inserts_total: u64,
    /// Largest heap-insertion count of a single cut Dijkstra run.
    pub heap_inserts_max: u64,
    pub forced_inserts: u64,
    pub relaxations: u64,
    /// Cycle witnesses found by exact Bellman-Ford after a failed check.
    pub witness_fallbacks: u64,
    pub comparator: Vec<(String, u64)>,
}

impl NegStats {
    fn absorb(&mut self, r: &CutResult) {
        self.heap_inserts_total += r.stats.heap_inserts;
        self.heap_inserts_max = self.heap_inserts_max.max(r.stats.heap_inserts);
        self.forced_inserts += r.stats.forced_inserts;
        self.relaxations += r.stats.relaxations;
        for (name, x) in &r.stats.comparator {
            match self.comparator.iter_mut().find(|(m, _)| m == name) {
                Some((_, y)) => *y += x,
                None => self.comparator.push((name.clone(), *x)),
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct NegRun {
    pub result: SsspResult,
    /// `d̂(v)`, the recombined distances.
    pub distances: Vec<Option<BigRational>>,
    pub stats: NegStats,
}

#[derive(Debug, Clone)]
pub enum NegOutcome {
    Tree(NegRun),
    NegativeCycle(CycleWitness, NegStats),
}

pub fn default_k(n: usize) -> usize {
    ((n as f64).sqrt().ceil() as usize).max(1)
}

/// `M ∪ {s}` with `|M| = min(n - 1, ⌈γ n ln n / k⌉)`, sorted, `s` first.
pub fn sample_hitting_set(n: usize, s: usize, k: usize, gamma: f64, seed: u64) -> Vec<usize> {
    let want = (gamma * n as f64 * (n as f64).ln() / k.max(1) as f64).ceil().max(0.0) as usize;
    let want = want.min(n.saturating_sub(1));
    let others: Vec<usize> = (0..n).filter(|&v| v != s).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6869_7474);
    let mut m: Vec<usize> = sample(&mut rng, others.len(), want).into_iter().map(|i| others[i]).collect();
    m.sort_unstable();
    m.insert(0, s);
    m
}

/// Seed of the cut Dijkstra run from `z`.
pub fn run_seed(seed: u64, z: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (z as u64).wrapping_add(1).wrapping_mul(0xbf58_476d_1ce4_e5b9)
}

/// The whole pipeline, running the cut Dijkstra queries one after another.
pub fn negative_sssp(g: &WeightedDigraph, s: usize, cfg: &NegConfig) -> Result<NegOutcome, SolveError> {
    negative_sssp_with(g, s, cfg, |ctx, zs| {
        zs.iter().map(|&z| cut_dijkstra(ctx, g, z, run_seed(cfg.seed, z))).collect()
    })
}

/// As [`negative_sssp`], with the independent cut Dijkstra queries handed
/// to `runner`, which must return one result per vertex in input order.
pub fn negative_sssp_with<F>(
    g: &WeightedDigraph,
    s: usize,
    cfg: &NegConfig,
    runner: F,
) -> Result<NegOutcome, SolveError>
where
    F: FnOnce(&CutContext, &[usize]) -> Result<Vec<CutResult>, SolveError>,
{
    let n = g.n();
    if s >= n {
        return Err(SolveError::Graph(crate::graph::GraphError::VertexOutOfRange { vertex: s, n }));
    }
    let k = cfg.k.unwrap_or_else(|| default_k(n)).max(1);
    let budget = cfg.budget.unwrap_or_else(|| WordBudget::fitting(g.weights()));
    let mut stats = NegStats { k, budget_bits: budget.bits(), ..Default::default() };
    let ctx = match cut_preprocess_with(g, k, budget, cfg.consts)? {
        Preprocessed::NegativeCycle(c) => return Ok(NegOutcome::NegativeCycle(c, stats)),
        Preprocessed::Context(ctx) => ctx,
    };
    stats.scaling_iterations = ctx.scaling.iterations;
    stats.scaling_pruned = ctx.scaling.pruned_edges;
    let m = sample_hitting_set(n, s, k, cfg.gamma, cfg.seed);
    stats.hitting_set = m.len();
    let runs = runner(&ctx, &m)?;
    if runs.len() != m.len() {
        return Err(SolveError::Internal(format!("{} cut runs for {} sources", runs.len(), m.len())));
    }
    for r in &runs {
        stats.absorb(r);
    }
    recombine(g, s, &m, &runs, cfg.verify, stats)
}

/// Complete digraph on the hitting set with `w(uv) = d̃_u(v)`.
pub fn hitting_graph(m: &[usize], runs: &[CutResult]) -> WeightedDigraph {
    let mut h = WeightedDigraph::new(m.len());
    for (i, r) in runs.iter().enumerate() {
        for (j, &t) in m.iter().enumerate() {
            if i != j {
                if let Some(d) = &r.dist[t] {
                    h.add_edge(i, j, d.clone()).expect("indices in range");
                }
            }
        }
    }
    h
}

/// Concatenated witness walk `s -> v` through the hitting-set hops.
fn splice(m: &[usize], runs: &[CutResult], hops: &[usize], v: usize) -> Vec<usize> {
    let mut walk = vec![m[hops[0]]];
    let mut legs: Vec<(usize, usize)> = hops.windows(2).map(|w| (w[0], m[w[1]])).collect();
    legs.push((*hops.last().unwrap(), v));
    for (from, to) in legs {
        let p = runs[from].path_to(to).expect("finite leg has a witness");
        walk.extend_from_slice(&p[1..]);
    }
    walk
}

/// Cuts the walk back at every repeated vertex, in one pass.
pub fn erase_loops(walk: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(walk.len());
    let mut at: HashMap<usize, usize> = HashMap::new();
    for &x in walk {
        if let Some(&i) = at.get(&x) {
            for y in out.drain(i + 1..) {
                at.remove(&y);
            }
        } else {
            at.insert(x, out.len());
            out.push(x);
        }
    }
    out
}

/// A simple negative cycle inside a closed walk of negative weight.
pub fn negative_cycle_in_walk(g: &WeightedDigraph, walk: &[usize]) -> Option<CycleWitness> {
    let mut stack: Vec<usize> = Vec::new();
    let mut at: HashMap<usize, usize> = HashMap::new();
    let closed: Vec<usize> = walk.iter().copied().chain(walk.first().copied()).collect();
    for &x in &closed {
        if let Some(&i) = at.get(&x) {
            let cyc: Vec<usize> = stack[i..].to_vec();
            if let Some(w) = g.walk_weight(&cyc, true) {
                if w.is_negative() {
                    return Some(CycleWitness { vertices: cyc, weight: w });
                }
            }
            for y in stack.drain(i + 1..) {
                at.remove(&y);
            }
        } else {
            at.insert(x, stack.len());
            stack.push(x);
        }
    }
    None
}

pub fn recombine(
    g: &WeightedDigraph,
    s: usize,
    m: &[usize],
    runs: &[CutResult],
    verify: VerifyMode,
    mut stats: NegStats,
) -> Result<NegOutcome, SolveError> {
    let n = g.n();
    let h = hitting_graph(m, runs);
    let (dh, ph) = match bf_exact(&h, 0, None) {
        BfOutcome::NegativeCycle(c) => {
            let mut walk = Vec::new();
            for i in 0..c.vertices.len() {
                let (a, b) = (c.vertices[i], c.vertices[(i + 1) % c.vertices.len()]);
                let p = runs[a].path_to(m[b]).expect("H edge has a witness");
                walk.extend_from_slice(&p[..p.len() - 1]);
            }
            return match negative_cycle_in_walk(g, &walk) {
                Some(w) => Ok(NegOutcome::NegativeCycle(w, stats)),
                None => Err(SolveError::Internal("negative cycle in H has no negative cycle in G".into())),
            };
        }
        BfOutcome::Distances { dist, parent } => (dist, parent),
    };
    let mut best: Vec<Option<(BigRational, usize)>> = vec![None; n];
    for (t, dt) in dh.iter().enumerate() {
        let Some(dt) = dt else { continue };
        for (v, dv) in runs[t].dist.iter().enumerate() {
            let Some(dv) = dv else { continue };
            let cand = dt + dv;
            if best[v].as_ref().is_none_or(|(b, _)| cand < *b) {
                best[v] = Some((cand, t));
            }
        }
    }
    let mut union: HashSet<(usize, usize)> = HashSet::new();
    for v in 0..n {
        let Some((_, t)) = &best[v] else { continue };
        let mut hops = vec![*t];
        while *hops.last().unwrap() != 0 {
            let x = *hops.last().unwrap();
            hops.push(ph[x].expect("finite H distance has a parent"));
            if hops.len() > m.len() {
                return Err(SolveError::Internal("H parent links do not reach the source".into()));
            }
        }
        hops.reverse();
        let path = erase_loops(&splice(m, runs, &hops, v));
        for w in path.windows(2) {
            union.insert((w[0], w[1]));
        }
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &union {
        out[a].push(b);
    }
    for o in &mut out {
        o.sort_unstable();
    }
    let mut parent: Vec<Option<TreeEdge>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        for &y in &out[x] {
            if !seen[y] {
                seen[y] = true;
                let e = g.edge(x, y).expect("witness paths use graph edges");
                parent[y] = Some(TreeEdge { parent: x, weight: e.weight.clone(), aux: e.aux });
                queue.push_back(y);
            }
        }
    }
    let result = SsspResult { source: s, parent };
    if verify_sssp(g, &result, verify)?.is_valid() {
        let distances = best.into_iter().map(|b| b.map(|(d, _)| d)).collect();
        return Ok(NegOutcome::Tree(NegRun { result, distances, stats }));
    }
    stats.witness_fallbacks += 1;
    match find_negative_cycle(g) {
        Some(c) => Ok(NegOutcome::NegativeCycle(c, stats)),
        None => Err(SolveError::Internal("the assembled tree failed verification".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_erasure() {
        assert_eq!(erase_loops(&[0, 1, 2, 1, 3]), vec![0, 1, 3]);
        assert_eq!(erase_loops(&[0, 1, 2, 0, 4, 5, 4, 6]), vec![0, 4, 6]);
        assert_eq!(erase_loops(&[3]), vec![3]);
    }

    #[test]
    fn hitting_set_shape() {
        let m = sample_hitting_set(100, 7, 10, 2.0, 1);
        assert_eq!(m[0], 7);
        assert_eq!(m.len(), 1 + 93);
        let m = sample_hitting_set(100, 7, 2, 2.0, 1);
        assert_eq!(m.len(), 100);
    }
}
