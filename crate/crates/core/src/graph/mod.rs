//! Weighted digraphs with exact rational weights, text formats, exact
//! Bellman-Ford, generators and shortest-path-tree verification.

mod bellman_ford;
mod gen;
mod io;
mod verify;

use std::collections::HashMap;

use thiserror::Error;

use crate::ratnum::{BigRational, Integer};

pub use bellman_ford::{bf_exact, find_negative_cycle, relax_rounds, relax_to_fixpoint, BfOutcome, PathWeight, RelaxOutcome};
pub use gen::{
    gen_planted_negative_cycle, gen_random, gen_small_diff, gen_small_diff_chain, NegativeMode, SmallDiff,
    WeightClass,
};
pub use io::{parse_graph, parse_tree, serialize_graph, serialize_tree, serialize_tree_annotated};
pub use verify::{verify_sssp, Verdict, VerifyMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid generator parameters: {0}")]
    BadParameters(String),
    #[error("dangling parent reference at vertex {0}")]
    DanglingParent(usize),
    #[error("parent links of vertex {0} do not lead to the source")]
    DetachedTree(usize),
    #[error("result has {got} vertices, graph has {want}")]
    SizeMismatch { got: usize, want: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub weight: BigRational,
    /// Added by [`augment_source`], not part of the input.
    pub aux: bool,
}

/// Directed graph on `0..n`. Parallel edges collapse to the lightest one.
#[derive(Debug, Clone, Default)]
pub struct WeightedDigraph {
    n: usize,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    index: HashMap<(usize, usize), usize>,
    source: Option<usize>,
}

impl WeightedDigraph {
    pub fn new(n: usize) -> Self {
        WeightedDigraph { n, edges: Vec::new(), out: vec![Vec::new(); n], index: HashMap::new(), source: None }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, BigRational)>,
    {
        let mut g = Self::new(n);
        for (u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: BigRational) -> Result<(), GraphError> {
        self.insert(u, v, w, false)
    }

    fn insert(&mut self, u: usize, v: usize, w: BigRational, aux: bool) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        match self.index.get(&(u, v)) {
            Some(&i) => {
                if w < self.edges[i].weight {
                    self.edges[i].weight = w;
                    self.edges[i].aux = aux;
                }
            }
            None => {
                self.index.insert((u, v), self.edges.len());
                self.out[u].push(self.edges.len());
                self.edges.push(Edge { tail: u, head: v, weight: w, aux });
            }
        }
        Ok(())
    }

    pub fn set_source(&mut self, s: usize) -> Result<(), GraphError> {
        self.check(s)?;
        self.source = Some(s);
        Ok(())
    }

    pub fn source(&self) -> Option<usize> {
        self.source
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_at(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn out_edge_ids(&self, u: usize) -> &[usize] {
        &self.out[u]
    }

    pub fn out_edges(&self, u: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.out[u].iter().map(move |&i| &self.edges[i])
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<&Edge> {
        self.index.get(&(u, v)).map(|&i| &self.edges[i])
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.index.get(&(u, v)).copied()
    }

    pub fn has_negative_edge(&self) -> bool {
        self.edges.iter().any(|e| e.weight.is_negative())
    }

    pub fn max_weight(&self) -> Option<&BigRational> {
        self.edges.iter().map(|e| &e.weight).max()
    }

    pub fn weights(&self) -> impl Iterator<Item = &BigRational> + '_ {
        self.edges.iter().map(|e| &e.weight)
    }

    /// Sum of the weights along a closed or open vertex walk, `None` when a
    /// step is not an edge.
    pub fn walk_weight(&self, walk: &[usize], closed: bool) -> Option<BigRational> {
        let mut parts = Vec::with_capacity(walk.len());
        for w in walk.windows(2) {
            parts.push(self.edge(w[0], w[1])?.weight.clone());
        }
        if closed && !walk.is_empty() {
            parts.push(self.edge(*walk.last().unwrap(), walk[0])?.weight.clone());
        }
        Some(crate::ratnum::sum_balanced(parts))
    }
}

/// Weight of the edges [`augment_source`] adds: `n * max(1, max w)`.
pub fn aux_weight(g: &WeightedDigraph) -> BigRational {
    let one = BigRational::one();
    let top = g.edges.iter().filter(|e| !e.aux).map(|e| &e.weight).max().filter(|w| **w > one).unwrap_or(&one);
    top * BigRational::from_integer(Integer::from(g.n))
}

/// Adds `s -> v` with the sentinel weight for every `v != s` lacking a
/// direct edge from `s`, so every vertex is reachable. Distances of
/// vertices already reachable do not change when there is no negative cycle.
pub fn augment_source(g: &WeightedDigraph, s: usize) -> Result<WeightedDigraph, GraphError> {
    g.check(s)?;
    let w = aux_weight(g);
    let mut h = g.clone();
    for v in 0..g.n {
        if v != s && g.edge(s, v).is_none() {
            h.insert(s, v, w.clone(), true)?;
        }
    }
    h.source = Some(s);
    Ok(h)
}

/// Vertex potentials `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceFunction(pub Vec<BigRational>);

impl PriceFunction {
    pub fn zero(n: usize) -> Self {
        PriceFunction(vec![BigRational::zero(); n])
    }

    pub fn get(&self, v: usize) -> &BigRational {
        &self.0[v]
    }
}

/// `w(uv) + p(u) - p(v)`.
pub fn reduced_weight(p: &PriceFunction, e: &Edge) -> BigRational {
    &e.weight + &p.0[e.tail] - &p.0[e.head]
}

/// True when every edge has reduced weight at least `-eps`.
pub fn check_eps_feasible(g: &WeightedDigraph, p: &PriceFunction, eps: &BigRational) -> bool {
    first_infeasible_edge(g, p, eps).is_none()
}

pub fn first_infeasible_edge(g: &WeightedDigraph, p: &PriceFunction, eps: &BigRational) -> Option<usize> {
    let floor = -eps;
    g.edges.iter().position(|e| reduced_weight(p, e) < floor)
}

/// Parent edge of a vertex in a shortest-path tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeEdge {
    pub parent: usize,
    pub weight: BigRational,
    pub aux: bool,
}

/// Out-tree rooted at `source`; vertices without a parent are unreachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsspResult {
    pub source: usize,
    pub parent: Vec<Option<TreeEdge>>,
}

impl SsspResult {
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn is_reached(&self, v: usize) -> bool {
        v == self.source || self.parent[v].is_some()
    }

    /// Reached through real edges only.
    pub fn is_reachable(&self, v: usize) -> bool {
        let mut x = v;
        while x != self.source {
            match &self.parent[x] {
                Some(te) if !te.aux => x = te.parent,
                _ => return false,
            }
        }
        true
    }

    /// Vertices in an order where parents precede children, starting at the
    /// source. Fails when some parent link does not lead back to the source.
    pub fn topological_order(&self) -> Result<Vec<usize>, GraphError> {
        let n = self.parent.len();
        if self.source >= n {
            return Err(GraphError::VertexOutOfRange { vertex: self.source, n });
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(te) = p {
                if te.parent >= n {
                    return Err(GraphError::DanglingParent(v));
                }
                if v == self.source {
                    return Err(GraphError::DetachedTree(v));
                }
                children[te.parent].push(v);
            }
        }
        let mut order = vec![self.source];
        let mut i = 0;
        while i < order.len() {
            order.extend_from_slice(&children[order[i]]);
            i += 1;
        }
        let reached = self.parent.iter().filter(|p| p.is_some()).count() + 1;
        if order.len() != reached {
            let mut seen = vec![false; n];
            for &v in &order {
                seen[v] = true;
            }
            let bad = (0..n).find(|&v| self.parent[v].is_some() && !seen[v]).unwrap();
            return Err(GraphError::DetachedTree(bad));
        }
        Ok(order)
    }

    /// Exact tree distances, `None` for vertices outside the tree.
    pub fn distances(&self) -> Result<Vec<Option<BigRational>>, GraphError> {
        let order = self.topological_order()?;
        let mut d: Vec<Option<BigRational>> = vec![None; self.parent.len()];
        d[self.source] = Some(BigRational::zero());
        for &v in &order[1..] {
            let te = self.parent[v].as_ref().unwrap();
            d[v] = Some(d[te.parent].as_ref().unwrap() + &te.weight);
        }
        Ok(d)
    }

    /// Vertex path from the source to `v`.
    pub fn path_to(&self, v: usize) -> Option<Vec<usize>> {
        let mut p = vec![v];
        let mut x = v;
        while x != self.source {
            x = self.parent[x].as_ref()?.parent;
            p.push(x);
            if p.len() > self.parent.len() {
                return None;
            }
        }
        p.reverse();
        Some(p)
    }
}

/// A closed walk `vertices[0] -> ... -> vertices[last] -> vertices[0]` of
/// negative total weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleWitness {
    pub vertices: Vec<usize>,
    pub weight: BigRational,
}

impl CycleWitness {
    /// Recomputes the weight from `g` and checks it is negative and matches.
    pub fn verify(&self, g: &WeightedDigraph) -> bool {
        match g.walk_weight(&self.vertices, true) {
            Some(w) => w.is_negative() && w == self.weight,
            None => false,
        }
    }
}
