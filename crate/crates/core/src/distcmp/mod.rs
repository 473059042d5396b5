//! Comparisons `δ(u) - δ(v)` against short fractions on an incrementally
//! built tree, answered from fixed-precision approximations and, when those
//! are inconclusive, from orders maintained inside sparse-cover clusters one
//! level up.

mod baseline;
mod order;

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::seq::index::sample;
use rug::ops::DivRounding;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cfrac::similarity_fraction_ratio;
use crate::cover::{log2_ceil, CoverError, SetId, SetUpdate, SparseCover};
use crate::inctree::{IncTree, TreeError};
use crate::ratnum::{BigRational, Integer, WordBudget};

pub use baseline::{ExactComparator, PairwiseDelta};
pub use order::ClusterOrder;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistCmpError {
    #[error("weight {0} is not short enough for this structure")]
    WeightNotShort(String),
    #[error("node {node} is not in level {level}")]
    NotInLevel { node: NodeId, level: usize },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("configuration rejected: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// A structure answering `sign(δ(u) - δ(v) - β)` over a growing tree rooted
/// at node 0.
pub trait DistanceComparator {
    fn root(&self) -> NodeId {
        0
    }
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        false
    }
    fn insert_leaf(&mut self, parent: NodeId, weight: &BigRational) -> Result<NodeId, DistCmpError>;
    /// Ordering of `δ(u) - δ(v)` against `beta`.
    fn compare(&mut self, u: NodeId, v: NodeId, beta: &BigRational) -> Result<Ordering, DistCmpError>;
    /// Named event counters.
    fn counters(&self) -> Vec<(String, u64)>;
}

/// Tunable constants: `K = ⌈C log n⌉`, `λ log n` cover copies and BFS
/// slack, `γ` for hitting sets, `κ` for the fan-out bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistCmpConstants {
    pub c_factor: u32,
    pub lambda: u32,
    pub gamma: u32,
    pub kappa: u32,
}

impl Default for DistCmpConstants {
    fn default() -> Self {
        DistCmpConstants { c_factor: 2, lambda: 4, gamma: 2, kappa: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistCmpConfig {
    /// Planned number of insertions; the tree holds `capacity + 1` nodes
    /// before the structure rebuilds itself at twice the size.
    pub capacity: usize,
    /// Tree weights are `c`-short; comparands are expected `c`-short too.
    pub c: u32,
    pub budget: WordBudget,
    pub consts: DistCmpConstants,
}

impl DistCmpConfig {
    pub fn new(capacity: usize, c: u32, budget: WordBudget) -> Self {
        DistCmpConfig { capacity, c, budget, consts: DistCmpConstants::default() }
    }

    pub fn with_constants(mut self, consts: DistCmpConstants) -> Self {
        self.consts = consts;
        self
    }
}

/// Precision parameters of one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelParams {
    /// `n_i`, the number of nodes in the level.
    pub size: usize,
    /// Bits of the comparands the level accepts, `b_i`.
    pub bits: u64,
    /// Approximation precision `ℓ_i`.
    pub ell: u64,
    /// Similarity bits `b'_i = (1 + b_i) λ log n`.
    pub sim_bits: u64,
    /// Similarity precision `ℓ'_i = ℓ_i - λ log n`.
    pub sim_ell: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub log_n: u32,
    pub k: u64,
    /// Top level; it holds only the root.
    pub t: usize,
    pub levels: Vec<LevelParams>,
}

impl Schedule {
    pub fn new(cfg: &DistCmpConfig) -> Result<Self, DistCmpError> {
        let bad = |m: String| DistCmpError::BadConfig(m);
        if cfg.c == 0 || cfg.consts.c_factor == 0 || cfg.consts.lambda == 0 {
            return Err(bad("c, C and λ must be positive".into()));
        }
        let nodes = cfg.capacity as u64 + 1;
        let log_n = log2_ceil(nodes as usize);
        let k = ((cfg.consts.c_factor * log_n) as u64).max(2);
        let mut t = 1usize;
        let mut kt = k;
        while kt < nodes {
            kt = kt.saturating_mul(k);
            t += 1;
        }
        let cb = cfg.c as u64 * cfg.budget.bits() as u64;
        let slack = (cfg.consts.lambda * log_n) as u64;
        let mut levels = Vec::with_capacity(t + 1);
        let mut kpow = 1u64;
        for _ in 0..=t {
            let size = nodes.div_ceil(kpow) as usize;
            kpow = kpow.saturating_mul(k);
            let bits = cb.saturating_mul(kpow);
            let sim_bits = (1 + bits).saturating_mul(slack);
            let ell = bits
                .saturating_mul(10)
                .saturating_mul(k)
                .max(sim_bits.saturating_mul(4).saturating_add(5).saturating_add(slack));
            let sim_ell = ell.saturating_sub(slack);
            levels.push(LevelParams { size, bits, ell, sim_bits, sim_ell });
        }
        for (i, p) in levels.iter().enumerate().take(t) {
            if p.ell + 8 > u32::MAX as u64 {
                return Err(bad(format!("level {i} precision {} exceeds the supported range", p.ell)));
            }
            if p.sim_ell < 4 * p.sim_bits + 5 {
                return Err(bad(format!("level {i}: ℓ' = {} is below 4b' + 5 = {}", p.sim_ell, 4 * p.sim_bits + 5)));
            }
        }
        Ok(Schedule { log_n, k, t, levels })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DistCmpStats {
    /// Queries answered at each level.
    pub queries: Vec<u64>,
    /// Queries at each level that needed the cluster orders.
    pub difficult: Vec<u64>,
    /// Cover set updates at each level.
    pub cover_updates: Vec<u64>,
    /// Cover edges inserted at each level.
    pub cover_edges: Vec<u64>,
    pub fallback_no_common_set: u64,
    pub fallback_degraded: u64,
    pub fallback_oversize: u64,
    pub reinitializations: u64,
}

impl DistCmpStats {
    fn sized(levels: usize) -> Self {
        DistCmpStats {
            queries: vec![0; levels],
            difficult: vec![0; levels],
            cover_updates: vec![0; levels],
            cover_edges: vec![0; levels],
            ..Default::default()
        }
    }

    pub fn exact_fallbacks(&self) -> u64 {
        self.fallback_no_common_set + self.fallback_degraded + self.fallback_oversize
    }

    fn absorb(&mut self, o: &DistCmpStats) {
        let grow = |a: &mut Vec<u64>, b: &Vec<u64>| {
            if a.len() < b.len() {
                a.resize(b.len(), 0);
            }
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        };
        grow(&mut self.queries, &o.queries);
        grow(&mut self.difficult, &o.difficult);
        grow(&mut self.cover_updates, &o.cover_updates);
        grow(&mut self.cover_edges, &o.cover_edges);
        self.fallback_no_common_set += o.fallback_no_common_set;
        self.fallback_degraded += o.fallback_degraded;
        self.fallback_oversize += o.fallback_oversize;
        self.reinitializations += o.reinitializations;
    }
}

const NOT_MEMBER: u32 = u32::MAX;

/// Extra bits of the coarse filter beyond twice the comparand bits.
const COARSE_SLACK: u64 = 64;

struct Coarse {
    approx: Vec<Option<Integer>>,
    denom: Integer,
}

struct Level {
    /// Local index of each insertion slot, or `NOT_MEMBER`.
    local: Vec<u32>,
    /// Slot of each local index.
    members: Vec<usize>,
    /// Numerator of `a_v` over `D_i = 2^(ℓ_i + 2) n`.
    approx: Vec<Option<Integer>>,
    /// The same sums at a low precision, tried before `approx`.
    coarse: Option<Coarse>,
    /// `d_{v,i+1}`: weight of the path from the nearest level-`(i+1)` ancestor.
    up: Vec<Option<BigRational>>,
    cover: Option<SparseCover>,
    orders: HashMap<SetId, ClusterOrder>,
    rng: ChaCha8Rng,
    /// `D_i`.
    denom: Integer,
}

/// The hierarchical comparison structure.
pub struct DistCmp {
    cfg: DistCmpConfig,
    sched: Schedule,
    seed: u64,
    generation: u64,
    tree: IncTree,
    slot_level: Vec<u8>,
    levels: Vec<Level>,
    log: Vec<(NodeId, BigRational)>,
    exact: Vec<Option<BigRational>>,
    stats: DistCmpStats,
    /// Totals from instances replaced by rebuilds.
    retired: DistCmpStats,
}

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    let mut x = seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    x ^= x >> 31;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^ (x >> 29)
}

impl DistCmp {
    pub fn new(cfg: DistCmpConfig, seed: u64) -> Result<Self, DistCmpError> {
        Self::build(cfg, seed, 0)
    }

    fn build(cfg: DistCmpConfig, seed: u64, generation: u64) -> Result<Self, DistCmpError> {
        let sched = Schedule::new(&cfg)?;
        let nodes = cfg.capacity + 1;
        let t = sched.t;
        // L_0 = all slots, L_i a random subset of L_{i-1} holding slot 0
        let mut slot_level = vec![0u8; nodes];
        let mut members: Vec<usize> = (0..nodes).collect();
        let mut level_members = vec![members.clone()];
        for i in 1..=t {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, generation, 1000 + i as u64));
            let want = sched.levels[i].size.min(members.len());
            let rest: Vec<usize> = members.iter().copied().filter(|&x| x != 0).collect();
            let picked = sample(&mut rng, rest.len(), want.saturating_sub(1));
            let mut next: Vec<usize> = picked.into_iter().map(|j| rest[j]).collect();
            next.push(0);
            next.sort_unstable();
            for &x in &next {
                slot_level[x] = i as u8;
            }
            members = next;
            level_members.push(members.clone());
        }
        let levels = (0..t)
            .map(|i| {
                let mut local = vec![NOT_MEMBER; nodes];
                for (j, &x) in level_members[i].iter().enumerate() {
                    local[x] = j as u32;
                }
                let size = level_members[i].len();
                let shift = sched.levels[i].ell as u32 + 2;
                let coarse_ell = 2 * sched.levels[i].bits + COARSE_SLACK;
                let coarse = (4 * coarse_ell < sched.levels[i].ell).then(|| Coarse {
                    approx: vec![None; size],
                    denom: Integer::from(cfg.capacity.max(1)) << (coarse_ell as u32 + 2),
                });
                Level {
                    coarse,
                    local,
                    members: level_members[i].clone(),
                    approx: vec![None; size],
                    up: vec![None; size],
                    cover: None,
                    orders: HashMap::new(),
                    rng: ChaCha8Rng::seed_from_u64(mix(seed, generation, i as u64)),
                    denom: Integer::from(cfg.capacity.max(1)) << shift,
                }
            })
            .collect();
        let mut exact = Vec::with_capacity(nodes);
        exact.push(Some(BigRational::zero()));
        Ok(DistCmp {
            cfg,
            seed,
            generation,
            tree: IncTree::new(t),
            slot_level,
            levels,
            log: Vec::new(),
            exact,
            stats: DistCmpStats::sized(t + 1),
            retired: DistCmpStats::default(),
            sched,
        })
    }

    pub fn config(&self) -> &DistCmpConfig {
        &self.cfg
    }

    pub fn schedule(&self) -> &Schedule {
        &self.sched
    }

    pub fn tree(&self) -> &IncTree {
        &self.tree
    }

    /// Counters summed over rebuilds.
    pub fn stats(&self) -> DistCmpStats {
        let mut s = self.retired.clone();
        s.absorb(&self.stats);
        s
    }

    pub fn in_level(&self, v: NodeId, i: usize) -> bool {
        v < self.tree.len() && self.slot_level[v] as usize >= i
    }

    fn local(&self, v: NodeId, i: usize) -> Result<usize, DistCmpError> {
        if !self.in_level(v, i) {
            return Err(DistCmpError::NotInLevel { node: v, level: i });
        }
        Ok(self.levels[i].local[v] as usize)
    }

    fn rebuild(&mut self) -> Result<(), DistCmpError> {
        let mut cfg = self.cfg;
        cfg.capacity = (cfg.capacity * 2).max(1);
        let mut next = Self::build(cfg, self.seed, self.generation + 1)?;
        for (p, w) in &self.log {
            next.insert_leaf_inner(*p, w)?;
        }
        let mut retired = std::mem::take(&mut self.retired);
        retired.absorb(&self.stats);
        retired.reinitializations += 1;
        next.retired = retired;
        *self = next;
        Ok(())
    }

    fn insert_leaf_inner(&mut self, parent: NodeId, weight: &BigRational) -> Result<NodeId, DistCmpError> {
        if self.tree.len() == self.cfg.capacity + 1 {
            self.rebuild()?;
        }
        let slot = self.tree.len();
        let v = self.tree.insert_leaf(parent, weight.clone(), self.slot_level[slot] as usize)?;
        self.log.push((parent, weight.clone()));
        self.exact.push(None);
        Ok(v)
    }

    /// `a_v` numerator at level `i`, computed on first use together with
    /// any missing ones on the chain of level-`i` ancestors. With `coarse`,
    /// the low-precision table is used instead.
    fn approx_in(&mut self, v: NodeId, i: usize, coarse: bool) -> Result<Integer, DistCmpError> {
        fn table(lev: &mut Level, coarse: bool) -> (&mut Vec<Option<Integer>>, &Integer) {
            match (coarse, lev.coarse.as_mut()) {
                (true, Some(c)) => (&mut c.approx, &c.denom),
                _ => (&mut lev.approx, &lev.denom),
            }
        }
        let mut chain = Vec::new();
        let mut x = v;
        loop {
            let lx = self.local(x, i)?;
            let (tab, _) = table(&mut self.levels[i], coarse);
            if tab[lx].is_some() {
                break;
            }
            if x == 0 {
                tab[lx] = Some(Integer::new());
                break;
            }
            chain.push(x);
            x = self.tree.strict_nearest(x, i).expect("root is in every level");
        }
        while let Some(y) = chain.pop() {
            let z = self.tree.strict_nearest(y, i).unwrap();
            let d = self.tree.path_weight(z, y)?;
            let lev = &mut self.levels[i];
            let (lz, ly) = (lev.local[z] as usize, lev.local[y] as usize);
            let (tab, denom) = table(lev, coarse);
            let step = Integer::from(d.numer() * denom).div_floor(d.denom().clone());
            let a = Integer::from(tab[lz].as_ref().unwrap() + &step);
            tab[ly] = Some(a);
        }
        let lv = self.levels[i].local[v] as usize;
        let (tab, _) = table(&mut self.levels[i], coarse);
        Ok(tab[lv].clone().unwrap())
    }

    fn approx(&mut self, v: NodeId, i: usize) -> Result<Integer, DistCmpError> {
        self.approx_in(v, i, false)
    }

    /// Sign of `a_u - a_v - β` when it is clear at the coarse precision.
    fn coarse_compare(&mut self, u: NodeId, v: NodeId, i: usize, beta: &BigRational) -> Result<Option<Ordering>, DistCmpError> {
        if self.levels[i].coarse.is_none() {
            return Ok(None);
        }
        let num = self.approx_in(u, i, true)? - self.approx_in(v, i, true)?;
        let denom = &self.levels[i].coarse.as_ref().unwrap().denom;
        let q = beta.denom();
        let x = Integer::from(&num * q) - Integer::from(beta.numer() * denom);
        let tol = Integer::from(q * (2 * self.cfg.capacity.max(1) as u64));
        Ok(if x > tol {
            Some(Ordering::Greater)
        } else if x < Integer::from(-&tol) {
            Some(Ordering::Less)
        } else {
            None
        })
    }

    /// `a_v` as a rational, for inspection.
    pub fn approximation(&mut self, v: NodeId, i: usize) -> Result<BigRational, DistCmpError> {
        let a = self.approx(v, i)?;
        Ok(BigRational::new(a, self.levels[i].denom.clone()).unwrap())
    }

    /// `(α_{v,i+1}, d_{v,i+1})`.
    fn lift(&mut self, v: NodeId, i: usize) -> Result<(NodeId, BigRational), DistCmpError> {
        let alpha = self.tree.nearest_marked_ancestor(v, i + 1);
        let lv = self.local(v, i)?;
        if self.levels[i].up[lv].is_none() {
            let d = self.tree.path_weight(alpha, v)?;
            self.levels[i].up[lv] = Some(d);
        }
        Ok((alpha, self.levels[i].up[lv].clone().unwrap()))
    }

    fn exact_distance(&mut self, v: NodeId) -> BigRational {
        if let Some(d) = &self.exact[v] {
            return d.clone();
        }
        let mut chain = vec![v];
        let mut x = self.tree.parent(v).unwrap();
        while self.exact[x].is_none() {
            chain.push(x);
            x = self.tree.parent(x).unwrap();
        }
        let mut d = self.exact[x].clone().unwrap();
        while let Some(y) = chain.pop() {
            d += self.tree.weight(y);
            self.exact[y] = Some(d.clone());
        }
        d
    }

    /// Exact-arithmetic answer from the tree.
    pub fn exact_compare(&mut self, u: NodeId, v: NodeId, beta: &BigRational) -> Ordering {
        let du = self.exact_distance(u);
        let dv = self.exact_distance(v);
        (du - dv).cmp(beta)
    }

    fn check_node(&self, v: NodeId) -> Result<(), DistCmpError> {
        if v < self.tree.len() {
            Ok(())
        } else {
            Err(DistCmpError::UnknownNode(v))
        }
    }

    /// The level-`i` comparison for `u, v` in `L_i`.
    pub fn compare_at_level(
        &mut self,
        i: usize,
        u: NodeId,
        v: NodeId,
        beta: &BigRational,
    ) -> Result<Ordering, DistCmpError> {
        self.check_node(u)?;
        self.check_node(v)?;
        for x in [u, v] {
            if !self.in_level(x, i) {
                return Err(DistCmpError::NotInLevel { node: x, level: i });
            }
        }
        self.stats.queries[i] += 1;
        if u == v {
            return Ok(BigRational::zero().cmp(beta));
        }
        let lu = self.local(u, i)?;
        let lv = self.local(v, i)?;
        let params = self.sched.levels[i];
        if beta.denom().significant_bits() as u64 > params.bits {
            self.stats.fallback_oversize += 1;
            return Ok(self.exact_compare(u, v, beta));
        }
        if let Some(o) = self.coarse_compare(u, v, i, beta)? {
            return Ok(o);
        }
        // a_u - a_v against beta ± 2^-(ℓ+1), all scaled by D q
        let n_au = self.approx(u, i)?;
        let n_av = self.approx(v, i)?;
        let num = n_au - n_av;
        let lev = &self.levels[i];
        let q = beta.denom();
        let x = Integer::from(&num * q) - Integer::from(beta.numer() * &lev.denom);
        let tol = Integer::from(q * (2 * self.cfg.capacity.max(1) as u64));
        if x > tol {
            return Ok(Ordering::Greater);
        }
        if x < Integer::from(-&tol) {
            return Ok(Ordering::Less);
        }
        self.stats.difficult[i] += 1;
        if self.levels[i].cover.is_none() {
            let lev = &mut self.levels[i];
            let size = lev.members.len();
            lev.cover = Some(SparseCover::new(size, self.cfg.consts.lambda, &mut lev.rng)?);
        }
        let ups = self.levels[i].cover.as_mut().unwrap().insert_edge(lu, lv)?;
        self.stats.cover_edges[i] += 1;
        self.stats.cover_updates[i] += ups.len() as u64;
        for up in ups {
            self.apply_update(i, up)?;
        }
        let set = self.levels[i].cover.as_ref().unwrap().common_set(lu, lv);
        let Some(set) = set else {
            self.stats.fallback_no_common_set += 1;
            return Ok(self.exact_compare(u, v, beta));
        };
        let rank = self.levels[i].orders.get(&set).and_then(|o| o.rank_cmp(lu as u32, lv as u32));
        match rank {
            Some(o) => Ok(o),
            None => {
                self.stats.fallback_degraded += 1;
                Ok(self.exact_compare(u, v, beta))
            }
        }
    }

    fn node_of_local(&self, i: usize, l: u32) -> NodeId {
        self.levels[i].members[l as usize]
    }

    fn apply_update(&mut self, i: usize, up: SetUpdate) -> Result<(), DistCmpError> {
        match up {
            SetUpdate::Remove { set, vertex } => {
                let lev = &mut self.levels[i];
                let o = lev.orders.entry(set).or_insert_with(|| ClusterOrder::singleton(set.center));
                o.remove(vertex as u32);
            }
            SetUpdate::Add { set, vertex } => {
                let mut o = self.levels[i].orders.remove(&set).unwrap_or_else(|| ClusterOrder::singleton(set.center));
                let x = vertex as u32;
                let res = o.insert_with(x, |rep| self.cluster_cmp(i, x, rep));
                self.levels[i].orders.insert(set, o);
                res?;
            }
        }
        Ok(())
    }

    /// Orders `x` against `y`, two members of one cluster at level `i`, by
    /// `δ(x) - δ(y)` against their similarity fraction. `None` when the pair
    /// is not similar at the level's precision.
    fn cluster_cmp(&mut self, i: usize, x: u32, y: u32) -> Result<Option<Ordering>, DistCmpError> {
        let (nx, ny) = (self.node_of_local(i, x), self.node_of_local(i, y));
        let ax = self.approx(nx, i)?;
        let ay = self.approx(ny, i)?;
        let p = self.sched.levels[i];
        let diff = ax - ay;
        let f = similarity_fraction_ratio(&diff, &self.levels[i].denom, p.sim_bits as u32, p.sim_ell as u32)
            .expect("schedule guarantees ℓ' >= 2b' + 2");
        let Some(f) = f else { return Ok(None) };
        let (alx, dx) = self.lift(nx, i)?;
        let (aly, dy) = self.lift(ny, i)?;
        // δ(x) - δ(y) vs f  <=>  δ(α_x) - δ(α_y) vs f + d_y - d_x
        let rhs = f + dy - dx;
        self.compare_at_level(i + 1, alx, aly, &rhs).map(Some)
    }
}

impl DistanceComparator for DistCmp {
    fn len(&self) -> usize {
        self.tree.len()
    }

    fn insert_leaf(&mut self, parent: NodeId, weight: &BigRational) -> Result<NodeId, DistCmpError> {
        self.check_node(parent)?;
        if !self.cfg.budget.is_short(weight, self.cfg.c) {
            return Err(DistCmpError::WeightNotShort(weight.to_string()));
        }
        self.insert_leaf_inner(parent, weight)
    }

    fn compare(&mut self, u: NodeId, v: NodeId, beta: &BigRational) -> Result<Ordering, DistCmpError> {
        self.compare_at_level(0, u, v, beta)
    }

    fn counters(&self) -> Vec<(String, u64)> {
        let s = self.stats();
        let mut out = Vec::new();
        for (i, q) in s.queries.iter().enumerate() {
            out.push((format!("dc_queries_l{i}"), *q));
        }
        for (i, q) in s.difficult.iter().enumerate() {
            out.push((format!("dc_difficult_l{i}"), *q));
        }
        for (i, q) in s.cover_updates.iter().enumerate() {
            out.push((format!("dc_cover_updates_l{i}"), *q));
        }
        out.push(("dc_fallback_no_common_set".into(), s.fallback_no_common_set));
        out.push(("dc_fallback_degraded".into(), s.fallback_degraded));
        out.push(("dc_fallback_oversize".into(), s.fallback_oversize));
        out.push(("dc_reinitializations".into(), s.reinitializations));
        out
    }
}
