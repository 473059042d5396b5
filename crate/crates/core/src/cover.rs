//! Exponential-shift clusterings maintained under edge insertions, and
//! sparse covers built from independent copies of them.

use std::collections::HashSet;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("BFS depth {depth} exceeds the cap {cap}")]
    DepthCapExceeded { depth: u32, cap: u32 },
}

const INF: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

/// Undirected simple graph on `0..n` given by adjacency lists.
#[derive(Debug, Clone, Default)]
pub struct SimpleGraph {
    adj: Vec<Vec<u32>>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph { adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Adds `{u, v}` unless present or a loop. Returns whether it was added.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || self.adj[u].contains(&(v as u32)) {
            return false;
        }
        self.adj[u].push(v as u32);
        self.adj[v].push(u as u32);
        true
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&x| x as usize)
    }

    /// Hop distances from `s`, `None` when unreachable.
    pub fn bfs(&self, s: usize) -> Vec<Option<u32>> {
        let mut d = vec![None; self.n()];
        d[s] = Some(0);
        let mut q = std::collections::VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            let dx = d[x].unwrap();
            for y in self.neighbors(x) {
                if d[y].is_none() {
                    d[y] = Some(dx + 1);
                    q.push_back(y);
                }
            }
        }
        d
    }
}

/// Draw from `Geo(1 - e^-alpha)` on `{0, 1, ...}`: `Pr[X >= k] = e^(-alpha k)`.
pub fn sample_shift<R: Rng>(alpha: f64, rng: &mut R) -> u32 {
    let u: f64 = 1.0 - rng.gen::<f64>();
    let x = (-u.ln() / alpha).floor();
    if x >= u32::MAX as f64 {
        u32::MAX - 1
    } else {
        x as u32
    }
}

/// Center of every vertex: the `w` minimizing `δ(v, w) - b_w`, lowest id
/// on ties. Vertices in other components never compete.
pub fn estc_static(h: &SimpleGraph, shifts: &[u32]) -> Vec<usize> {
    let n = h.n();
    let b_max = shifts.iter().copied().max().unwrap_or(0);
    // vertex w starts spreading at time b_max - b_w
    let mut by_start: Vec<Vec<usize>> = vec![Vec::new(); b_max as usize + 1];
    for (w, &b) in shifts.iter().enumerate() {
        by_start[(b_max - b) as usize].push(w);
    }
    let mut center = vec![usize::MAX; n];
    let mut frontier: Vec<usize> = Vec::new();
    let mut cand = vec![usize::MAX; n];
    let mut assigned = 0;
    let mut t = 0usize;
    while assigned < n {
        let mut touched = Vec::new();
        for &u in &frontier {
            for z in h.neighbors(u) {
                if center[z] == usize::MAX {
                    if cand[z] == usize::MAX {
                        touched.push(z);
                    }
                    cand[z] = cand[z].min(center[u]);
                }
            }
        }
        if let Some(starts) = by_start.get(t) {
            for &w in starts {
                if center[w] == usize::MAX {
                    if cand[w] == usize::MAX {
                        touched.push(w);
                    }
                    cand[w] = cand[w].min(w);
                }
            }
        }
        for &z in &touched {
            center[z] = cand[z];
            cand[z] = usize::MAX;
        }
        assigned += touched.len();
        frontier = touched;
        t += 1;
    }
    center
}

/// Samples shifts with parameter `alpha` and clusters.
pub fn estc_sampled<R: Rng>(h: &SimpleGraph, alpha: f64, rng: &mut R) -> (Vec<u32>, Vec<usize>) {
    let shifts: Vec<u32> = (0..h.n()).map(|_| sample_shift(alpha, rng)).collect();
    let centers = estc_static(h, &shifts);
    (shifts, centers)
}

/// Single-source BFS under edge insertions. For each vertex it keeps the
/// distance and `β`, the neighbor of the source on some shortest path.
#[derive(Debug, Clone)]
pub struct IncBfs {
    adj: Vec<Vec<u32>>,
    dist: Vec<u32>,
    beta: Vec<u32>,
    source: u32,
    cap: u32,
    queue: Vec<u32>,
}

impl IncBfs {
    pub fn new(g: &SimpleGraph, source: usize, cap: u32) -> Result<Self, CoverError> {
        let n = g.n();
        if source >= n {
            return Err(CoverError::VertexOutOfRange { vertex: source, n });
        }
        let mut b = IncBfs {
            adj: g.adj.clone(),
            dist: vec![INF; n],
            beta: vec![NONE; n],
            source: source as u32,
            cap,
            queue: Vec::new(),
        };
        b.dist[source] = 0;
        b.beta[source] = source as u32;
        b.spread(vec![source as u32], &mut Vec::new())?;
        Ok(b)
    }

    pub fn distance(&self, v: usize) -> Option<u32> {
        (self.dist[v] != INF).then_some(self.dist[v])
    }

    pub fn beta(&self, v: usize) -> Option<usize> {
        (self.beta[v] != NONE && v as u32 != self.source).then_some(self.beta[v] as usize)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    fn spread(&mut self, seeds: Vec<u32>, changes: &mut Vec<(usize, usize)>) -> Result<(), CoverError> {
        let mut q = std::mem::take(&mut self.queue);
        q.clear();
        q.extend(seeds);
        let mut head = 0;
        while head < q.len() {
            let y = q[head];
            head += 1;
            let nd = self.dist[y as usize] + 1;
            for k in 0..self.adj[y as usize].len() {
                let z = self.adj[y as usize][k];
                if nd < self.dist[z as usize] {
                    if nd > self.cap {
                        self.queue = q;
                        return Err(CoverError::DepthCapExceeded { depth: nd, cap: self.cap });
                    }
                    self.dist[z as usize] = nd;
                    let nb = if y == self.source { z } else { self.beta[y as usize] };
                    if nb != self.beta[z as usize] {
                        self.beta[z as usize] = nb;
                        changes.push((z as usize, nb as usize));
                    }
                    q.push(z);
                }
            }
        }
        self.queue = q;
        Ok(())
    }

    /// Inserts `{u, v}` and returns the vertices whose `β` changed.
    pub fn insert_edge(&mut self, u: usize, v: usize) -> Result<Vec<(usize, usize)>, CoverError> {
        let n = self.n();
        for x in [u, v] {
            if x >= n {
                return Err(CoverError::VertexOutOfRange { vertex: x, n });
            }
        }
        let mut changes = Vec::new();
        if u == v {
            return Ok(changes);
        }
        self.adj[u].push(v as u32);
        self.adj[v].push(u as u32);
        let (du, dv) = (self.dist[u], self.dist[v]);
        let seed = if du != INF && du + 1 < dv {
            Some((u, v))
        } else if dv != INF && dv + 1 < du {
            Some((v, u))
        } else {
            None
        };
        if let Some((a, b)) = seed {
            let nd = self.dist[a] + 1;
            if nd > self.cap {
                return Err(CoverError::DepthCapExceeded { depth: nd, cap: self.cap });
            }
            self.dist[b] = nd;
            let nb = if a as u32 == self.source { b as u32 } else { self.beta[a] };
            if nb != self.beta[b] {
                self.beta[b] = nb;
                changes.push((b, nb as usize));
            }
            self.spread(vec![b as u32], &mut changes)?;
        }
        Ok(changes)
    }
}

/// One clustering of `0..n` kept current as edges arrive, realized as BFS
/// from an extra source joined to each `v` by a path of `b_max + 1 - b_v`
/// edges.
#[derive(Debug, Clone)]
pub struct Clustering {
    n: usize,
    shifts: Vec<u32>,
    bfs: IncBfs,
    /// For a vertex of the shifted graph adjacent to the source: the
    /// original vertex whose path starts there.
    owner: Vec<u32>,
    center: Vec<u32>,
}

/// A change of cluster for one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub vertex: usize,
    pub from: usize,
    pub to: usize,
}

impl Clustering {
    pub fn with_shifts(shifts: Vec<u32>, extra_depth: u32) -> Result<Self, CoverError> {
        let n = shifts.len();
        let b_max = shifts.iter().copied().max().unwrap_or(0);
        let s = n;
        let mut g = SimpleGraph::new(n + 1);
        let mut owner = vec![NONE; n + 1];
        for (v, &b) in shifts.iter().enumerate() {
            let len = b_max + 1 - b;
            let mut prev = s;
            for step in 1..len {
                let x = g.n();
                g.adj.push(Vec::new());
                owner.push(NONE);
                g.add_edge(prev, x);
                if step == 1 {
                    owner[x] = v as u32;
                }
                prev = x;
            }
            g.add_edge(prev, v);
            if len == 1 {
                owner[v] = v as u32;
            }
        }
        let bfs = IncBfs::new(&g, s, b_max + 1 + extra_depth)?;
        let center = (0..n as u32).collect();
        Ok(Clustering { n, shifts, bfs, owner, center })
    }

    pub fn sample<R: Rng>(n: usize, alpha: f64, extra_depth: u32, rng: &mut R) -> Result<Self, CoverError> {
        let shifts = (0..n).map(|_| sample_shift(alpha, rng)).collect();
        Self::with_shifts(shifts, extra_depth)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shifts(&self) -> &[u32] {
        &self.shifts
    }

    pub fn center(&self, v: usize) -> usize {
        self.center[v] as usize
    }

    pub fn centers(&self) -> Vec<usize> {
        self.center.iter().map(|&c| c as usize).collect()
    }

    /// `min_w δ(v, w) - b_w + b_max + 1`, the BFS distance in the shifted graph.
    pub fn shifted_distance(&self, v: usize) -> u32 {
        self.bfs.distance(v).expect("every vertex hangs off the source")
    }

    pub fn insert_edge(&mut self, u: usize, v: usize) -> Result<Vec<Move>, CoverError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(CoverError::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        let changes = self.bfs.insert_edge(u, v)?;
        let mut moves = Vec::new();
        for (x, b) in changes {
            if x < self.n {
                let to = self.owner[b];
                debug_assert!(to != NONE);
                let from = self.center[x];
                if from != to {
                    self.center[x] = to;
                    moves.push(Move { vertex: x, from: from as usize, to: to as usize });
                }
            }
        }
        Ok(moves)
    }
}

/// A cover set: the cluster of `center` in clustering `instance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetId {
    pub instance: u32,
    pub center: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetUpdate {
    Add { set: SetId, vertex: usize },
    Remove { set: SetId, vertex: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CoverStats {
    pub edges_inserted: u64,
    pub set_updates: u64,
}

/// `T` independent clusterings; two vertices close in the inserted graph
/// share a cluster in at least one of them with high probability.
#[derive(Debug, Clone)]
pub struct SparseCover {
    n: usize,
    instances: Vec<Clustering>,
    edges: HashSet<(u32, u32)>,
    stats: CoverStats,
}

/// `⌈log2 n⌉`, at least 1.
pub fn log2_ceil(n: usize) -> u32 {
    (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1)
}

impl SparseCover {
    /// `λ ⌈log2 n⌉` clusterings with unit shift rate and BFS depth capped
    /// at `b_max + 1 + λ ⌈log2 n⌉`.
    pub fn new<R: Rng>(n: usize, lambda: u32, rng: &mut R) -> Result<Self, CoverError> {
        let log_n = log2_ceil(n);
        let t = (lambda * log_n).max(1);
        let instances =
            (0..t).map(|_| Clustering::sample(n, 1.0, lambda * log_n, rng)).collect::<Result<Vec<_>, _>>()?;
        Ok(SparseCover { n, instances, edges: HashSet::new(), stats: CoverStats::default() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn instances(&self) -> &[Clustering] {
        &self.instances
    }

    pub fn stats(&self) -> CoverStats {
        self.stats
    }

    /// Inserts `{u, v}` in every clustering; repeated edges and loops are
    /// no-ops.
    pub fn insert_edge(&mut self, u: usize, v: usize) -> Result<Vec<SetUpdate>, CoverError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(CoverError::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        let key = (u.min(v) as u32, u.max(v) as u32);
        if u == v || !self.edges.insert(key) {
            return Ok(Vec::new());
        }
        self.stats.edges_inserted += 1;
        let mut out = Vec::new();
        for (i, c) in self.instances.iter_mut().enumerate() {
            for mv in c.insert_edge(u, v)? {
                let inst = i as u32;
                out.push(SetUpdate::Remove { set: SetId { instance: inst, center: mv.from as u32 }, vertex: mv.vertex });
                out.push(SetUpdate::Add { set: SetId { instance: inst, center: mv.to as u32 }, vertex: mv.vertex });
            }
        }
        self.stats.set_updates += out.len() as u64;
        Ok(out)
    }

    /// First clustering placing `u` and `v` together.
    pub fn common_set(&self, u: usize, v: usize) -> Option<SetId> {
        self.instances.iter().enumerate().find_map(|(i, c)| {
            (c.center(u) == c.center(v)).then_some(SetId { instance: i as u32, center: c.center(u) as u32 })
        })
    }

    pub fn sets_of(&self, v: usize) -> Vec<SetId> {
        self.instances
            .iter()
            .enumerate()
            .map(|(i, c)| SetId { instance: i as u32, center: c.center(v) as u32 })
            .collect()
    }

    pub fn members(&self, set: SetId) -> Vec<usize> {
        let c = &self.instances[set.instance as usize];
        (0..self.n).filter(|&v| c.center(v) == set.center as usize).collect()
    }
}
