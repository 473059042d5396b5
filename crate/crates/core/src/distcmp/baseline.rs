use std::cmp::Ordering;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DistCmpError, DistanceComparator, NodeId};
use crate::cfrac::{best_approx, compare_via_approx, ApproxPair};
use crate::cover::log2_ceil;
use crate::inctree::IncTree;
use crate::ratnum::{BigRational, WordBudget};

/// Stores every distance exactly. The reference answer and the naive
/// baseline.
#[derive(Debug, Clone)]
pub struct ExactComparator {
    dist: Vec<BigRational>,
    queries: u64,
}

impl Default for ExactComparator {
    fn default() -> Self {
        ExactComparator { dist: vec![BigRational::zero()], queries: 0 }
    }
}

impl ExactComparator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn distance(&self, v: NodeId) -> &BigRational {
        &self.dist[v]
    }
}

impl DistanceComparator for ExactComparator {
    fn len(&self) -> usize {
        self.dist.len()
    }

    fn insert_leaf(&mut self, parent: NodeId, weight: &BigRational) -> Result<NodeId, DistCmpError> {
        if parent >= self.dist.len() {
            return Err(DistCmpError::UnknownNode(parent));
        }
        let d = &self.dist[parent] + weight;
        self.dist.push(d);
        Ok(self.dist.len() - 1)
    }

    fn compare(&mut self, u: NodeId, v: NodeId, beta: &BigRational) -> Result<Ordering, DistCmpError> {
        for x in [u, v] {
            if x >= self.dist.len() {
                return Err(DistCmpError::UnknownNode(x));
            }
        }
        self.queries += 1;
        Ok((&self.dist[u] - &self.dist[v]).cmp(beta))
    }

    fn counters(&self) -> Vec<(String, u64)> {
        vec![("exact_queries".into(), self.queries)]
    }
}

/// Hitting-set comparator: nodes in a random sample `H` know their exact
/// distance, every pair of `H` keeps a short-fraction bracket of its
/// difference, and other nodes climb to their nearest ancestor in `H`.
#[derive(Debug, Clone)]
pub struct PairwiseDelta {
    tree: IncTree,
    rng: ChaCha8Rng,
    hit_prob: f64,
    bits: u32,
    root_dist: HashMap<NodeId, BigRational>,
    brackets: HashMap<(NodeId, NodeId), ApproxPair>,
    down: Vec<Option<BigRational>>,
    queries: u64,
    fallbacks: u64,
    c: u32,
    budget: WordBudget,
}

impl PairwiseDelta {
    /// `h` is the target hop gap between sampled ancestors; comparands are
    /// expected `c`-short under `budget`.
    pub fn new(capacity: usize, h: usize, c: u32, budget: WordBudget, gamma: u32, seed: u64) -> Self {
        let h = h.max(1);
        let log_n = log2_ceil(capacity + 1) as f64;
        let hit_prob = (gamma as f64 * log_n / h as f64).min(1.0);
        let cb = c as u64 * budget.bits() as u64;
        let bits = ((2 * h as u64 + 1) * cb + 1).min(u32::MAX as u64 / 2) as u32;
        let mut root_dist = HashMap::new();
        root_dist.insert(0, BigRational::zero());
        PairwiseDelta {
            tree: IncTree::new(1),
            rng: ChaCha8Rng::seed_from_u64(seed),
            hit_prob,
            bits,
            root_dist,
            brackets: HashMap::new(),
            down: vec![Some(BigRational::zero())],
            queries: 0,
            fallbacks: 0,
            c,
            budget,
        }
    }

    fn anchor(&mut self, u: NodeId) -> (NodeId, BigRational) {
        let a = self.tree.nearest_marked_ancestor(u, 1);
        if self.down[u].is_none() {
            self.down[u] = Some(self.tree.path_weight(a, u).expect("anchor is an ancestor"));
        }
        (a, self.down[u].clone().unwrap())
    }

    fn exact(&mut self, u: NodeId) -> BigRational {
        let (a, d) = self.anchor(u);
        let da = self.root_dist[&a].clone();
        da + d
    }
}

impl DistanceComparator for PairwiseDelta {
    fn len(&self) -> usize {
        self.tree.len()
    }

    fn insert_leaf(&mut self, parent: NodeId, weight: &BigRational) -> Result<NodeId, DistCmpError> {
        if parent >= self.tree.len() {
            return Err(DistCmpError::UnknownNode(parent));
        }
        if !self.budget.is_short(weight, self.c) {
            return Err(DistCmpError::WeightNotShort(weight.to_string()));
        }
        let marked = self.rng.gen_bool(self.hit_prob);
        let v = self.tree.insert_leaf(parent, weight.clone(), marked as usize)?;
        self.down.push(None);
        if marked {
            let (a, d) = self.anchor(parent);
            let dv = &self.root_dist[&a] + &d + weight;
            self.root_dist.insert(v, dv);
        }
        Ok(v)
    }

    fn compare(&mut self, u: NodeId, v: NodeId, beta: &BigRational) -> Result<Ordering, DistCmpError> {
        for x in [u, v] {
            if x >= self.tree.len() {
                return Err(DistCmpError::UnknownNode(x));
            }
        }
        self.queries += 1;
        let (au, du) = self.anchor(u);
        let (av, dv) = self.anchor(v);
        // δu - δv - β = (δ(a_u) - δ(a_v)) - (β + d_v - d_u)
        let r = beta + &dv - &du;
        if au == av {
            return Ok(BigRational::zero().cmp(&r));
        }
        if r.denom().significant_bits() > self.bits {
            self.fallbacks += 1;
            let d = self.exact(u) - self.exact(v);
            return Ok(d.cmp(beta));
        }
        if !self.brackets.contains_key(&(au, av)) {
            let delta = &self.root_dist[&au] - &self.root_dist[&av];
            let ap = best_approx(&delta, self.bits).expect("positive bit budget");
            self.brackets.insert((au, av), ap);
        }
        let ap = &self.brackets[&(au, av)];
        Ok(compare_via_approx(ap, &r).expect("comparand fits the bracket"))
    }

    fn counters(&self) -> Vec<(String, u64)> {
        vec![
            ("pairwise_queries".into(), self.queries),
            ("pairwise_fallbacks".into(), self.fallbacks),
            ("pairwise_brackets".into(), self.brackets.len() as u64),
            ("pairwise_hitting_set".into(), self.root_dist.len() as u64),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratnum::rat;

    #[test]
    fn pairwise_matches_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let budget = WordBudget::new(8).unwrap();
        let mut pd = PairwiseDelta::new(60, 3, 2, budget, 2, 7);
        let mut ex = ExactComparator::new();
        for _ in 0..60 {
            let p = rng.gen_range(0..pd.len());
            let w = rat(rng.gen_range(0..20), rng.gen_range(1..6));
            pd.insert_leaf(p, &w).unwrap();
            ex.insert_leaf(p, &w).unwrap();
        }
        for _ in 0..2000 {
            let u = rng.gen_range(0..pd.len());
            let v = rng.gen_range(0..pd.len());
            let beta = rat(rng.gen_range(-40..40), rng.gen_range(1..30));
            let beta = if rng.gen_bool(0.3) { ex.distance(u) - ex.distance(v) } else { beta };
            if !budget.is_short(&beta, 2) {
                continue;
            }
            assert_eq!(pd.compare(u, v, &beta).unwrap(), ex.compare(u, v, &beta).unwrap());
        }
    }
}
