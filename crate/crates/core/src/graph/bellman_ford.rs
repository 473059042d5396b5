use std::cmp::Ordering;

use super::{CycleWitness, SsspResult, TreeEdge, WeightedDigraph};
use crate::ratnum::BigRational;

/// Weights the relaxation loop can run over.
pub trait PathWeight: Clone + Ord {
    fn zero() -> Self;
    fn plus(&self, other: &Self) -> Self;
}

impl PathWeight for BigRational {
    fn zero() -> Self {
        BigRational::zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
}

impl PathWeight for i128 {
    fn zero() -> Self {
        0
    }
    fn plus(&self, other: &Self) -> Self {
        self.checked_add(*other).expect("i128 path weight overflow")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelaxOutcome<W> {
    Settled { dist: Vec<Option<W>>, parent: Vec<Option<usize>>, rounds: usize },
    /// Closed walk in forward edge order with its total weight.
    Cycle { vertices: Vec<usize>, weight: W },
}

/// Relaxes until nothing changes. Vertices with `init[v] = Some(_)` start
/// active. Once `n` rounds have passed with changes, the predecessor graph
/// is searched for a cycle after every round; such a cycle is negative.
pub fn relax_to_fixpoint<W: PathWeight>(adj: &[Vec<(usize, W)>], init: Vec<Option<W>>) -> RelaxOutcome<W> {
    let n = adj.len();
    let mut dist = init;
    let mut parent: Vec<Option<(usize, W)>> = vec![None; n];
    let mut active: Vec<bool> = dist.iter().map(Option::is_some).collect();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut changed = false;
        for u in 0..n {
            if !active[u] {
                continue;
            }
            active[u] = false;
            let du = dist[u].clone().expect("active vertex has a distance");
            for (v, w) in &adj[u] {
                let cand = du.plus(w);
                let better = match &dist[*v] {
                    None => true,
                    Some(dv) => cand.cmp(dv) == Ordering::Less,
                };
                if better {
                    dist[*v] = Some(cand);
                    parent[*v] = Some((u, w.clone()));
                    active[*v] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            let parent = parent.into_iter().map(|p| p.map(|(u, _)| u)).collect();
            return RelaxOutcome::Settled { dist, parent, rounds };
        }
        if rounds >= n {
            if let Some((vertices, weight)) = parent_cycle(&parent) {
                return RelaxOutcome::Cycle { vertices, weight };
            }
        }
    }
}

/// `k` synchronous rounds: afterwards `dist[v]` is the least weight of a
/// walk with at most `k` edges.
pub fn relax_rounds<W: PathWeight>(
    adj: &[Vec<(usize, W)>],
    init: Vec<Option<W>>,
    k: usize,
) -> (Vec<Option<W>>, Vec<Option<usize>>) {
    let n = adj.len();
    let mut dist = init;
    let mut parent = vec![None; n];
    let mut frontier: Vec<usize> = (0..n).filter(|&v| dist[v].is_some()).collect();
    for _ in 0..k {
        if frontier.is_empty() {
            break;
        }
        let prev = dist.clone();
        let mut touched = vec![false; n];
        for &u in &frontier {
            let du = prev[u].as_ref().unwrap();
            for (v, w) in &adj[u] {
                let cand = du.plus(w);
                if dist[*v].as_ref().is_none_or(|dv| cand < *dv) {
                    dist[*v] = Some(cand);
                    parent[*v] = Some(u);
                    touched[*v] = true;
                }
            }
        }
        frontier = (0..n).filter(|&v| touched[v]).collect();
    }
    (dist, parent)
}

fn parent_cycle<W: PathWeight>(parent: &[Option<(usize, W)>]) -> Option<(Vec<usize>, W)> {
    let n = parent.len();
    let mut stamp = vec![usize::MAX; n];
    for start in 0..n {
        let mut x = start;
        while stamp[x] == usize::MAX {
            stamp[x] = start;
            match &parent[x] {
                Some((p, _)) => x = *p,
                None => break,
            }
        }
        if stamp[x] == start && parent[x].is_some() {
            // x lies on a cycle of the predecessor graph
            let mut back = vec![x];
            let mut weight = W::zero();
            let mut y = x;
            loop {
                let (p, w) = parent[y].as_ref().unwrap();
                weight = weight.plus(w);
                if *p == x {
                    break;
                }
                back.push(*p);
                y = *p;
            }
            back.reverse();
            return Some((back, weight));
        }
    }
    None
}

fn adjacency(g: &WeightedDigraph) -> Vec<Vec<(usize, BigRational)>> {
    let mut adj = vec![Vec::new(); g.n()];
    for e in g.edges() {
        adj[e.tail].push((e.head, e.weight.clone()));
    }
    adj
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BfOutcome {
    Distances { dist: Vec<Option<BigRational>>, parent: Vec<Option<usize>> },
    NegativeCycle(CycleWitness),
}

impl BfOutcome {
    pub fn distances(&self) -> Option<&[Option<BigRational>]> {
        match self {
            BfOutcome::Distances { dist, .. } => Some(dist),
            BfOutcome::NegativeCycle(_) => None,
        }
    }

    /// Shortest-path tree from the predecessor links.
    pub fn tree(&self, g: &WeightedDigraph, s: usize) -> Option<SsspResult> {
        let BfOutcome::Distances { parent, .. } = self else { return None };
        let parent = parent
            .iter()
            .enumerate()
            .map(|(v, p)| {
                p.filter(|_| v != s).map(|u| {
                    let e = g.edge(u, v).expect("predecessor edge");
                    TreeEdge { parent: u, weight: e.weight.clone(), aux: e.aux }
                })
            })
            .collect();
        Some(SsspResult { source: s, parent })
    }
}

/// Exact distances from `s`, or `δ^k` with a hop bound. Without a hop bound
/// a negative cycle reachable from `s` is reported instead.
pub fn bf_exact(g: &WeightedDigraph, s: usize, hop_bound: Option<usize>) -> BfOutcome {
    let adj = adjacency(g);
    let mut init = vec![None; g.n()];
    init[s] = Some(BigRational::zero());
    match hop_bound {
        Some(k) => {
            let (dist, parent) = relax_rounds(&adj, init, k);
            BfOutcome::Distances { dist, parent }
        }
        None => match relax_to_fixpoint(&adj, init) {
            RelaxOutcome::Settled { dist, mut parent, .. } => {
                parent[s] = None;
                BfOutcome::Distances { dist, parent }
            }
            RelaxOutcome::Cycle { vertices, weight } => BfOutcome::NegativeCycle(CycleWitness { vertices, weight }),
        },
    }
}

/// Any negative cycle of `g`, reachable or not.
pub fn find_negative_cycle(g: &WeightedDigraph) -> Option<CycleWitness> {
    let adj = adjacency(g);
    match relax_to_fixpoint(&adj, vec![Some(BigRational::zero()); g.n()]) {
        RelaxOutcome::Settled { .. } => None,
        RelaxOutcome::Cycle { vertices, weight } => Some(CycleWitness { vertices, weight }),
    }
}
