//! Incremental rooted out-tree with exact descending-path weights and,
//! per level, the nearest ancestor at or above that level.

use thiserror::Error;

use crate::ratnum::{sum_balanced, BigRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("level {level} exceeds the maximum {max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("node {anc} is not an ancestor of {desc}")]
    NotAncestor { anc: usize, desc: usize },
}

#[derive(Debug, Clone)]
pub struct IncTree {
    parent: Vec<usize>,
    weight: Vec<BigRational>,
    depth: Vec<u32>,
    level: Vec<u8>,
    levels: usize,
    /// `nearest[v * levels + i]`: nearest ancestor-or-self with level >= i.
    nearest: Vec<u32>,
}

const NO_PARENT: usize = usize::MAX;

impl IncTree {
    /// A tree holding only the root, node 0, at level `max_level`.
    pub fn new(max_level: usize) -> Self {
        let levels = max_level + 1;
        IncTree {
            parent: vec![NO_PARENT],
            weight: vec![BigRational::zero()],
            depth: vec![0],
            level: vec![max_level as u8],
            levels,
            nearest: vec![0; levels],
        }
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_level(&self) -> usize {
        self.levels - 1
    }

    fn check(&self, v: usize) -> Result<(), TreeError> {
        if v < self.parent.len() {
            Ok(())
        } else {
            Err(TreeError::UnknownNode(v))
        }
    }

    pub fn insert_leaf(&mut self, parent: usize, weight: BigRational, level: usize) -> Result<usize, TreeError> {
        self.check(parent)?;
        if level > self.max_level() {
            return Err(TreeError::LevelOutOfRange { level, max: self.max_level() });
        }
        let v = self.parent.len();
        self.parent.push(parent);
        self.weight.push(weight);
        self.depth.push(self.depth[parent] + 1);
        self.level.push(level as u8);
        for i in 0..self.levels {
            let a = if level >= i { v as u32 } else { self.nearest[parent * self.levels + i] };
            self.nearest.push(a);
        }
        Ok(v)
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        let p = self.parent[v];
        (p != NO_PARENT).then_some(p)
    }

    /// Weight of the edge into `v`; zero at the root.
    pub fn weight(&self, v: usize) -> &BigRational {
        &self.weight[v]
    }

    pub fn depth(&self, v: usize) -> u32 {
        self.depth[v]
    }

    pub fn level(&self, v: usize) -> usize {
        self.level[v] as usize
    }

    /// Nearest ancestor of `v`, possibly `v`, whose level is at least `i`.
    pub fn nearest_marked_ancestor(&self, v: usize, i: usize) -> usize {
        self.nearest[v * self.levels + i] as usize
    }

    /// Nearest proper ancestor with level at least `i`.
    pub fn strict_nearest(&self, v: usize, i: usize) -> Option<usize> {
        self.parent(v).map(|p| self.nearest_marked_ancestor(p, i))
    }

    pub fn is_ancestor(&self, anc: usize, desc: usize) -> bool {
        if anc >= self.len() || desc >= self.len() || self.depth[anc] > self.depth[desc] {
            return false;
        }
        let mut x = desc;
        while self.depth[x] > self.depth[anc] {
            x = self.parent[x];
        }
        x == anc
    }

    /// Weight of the tree path `anc -> desc`.
    pub fn path_weight(&self, anc: usize, desc: usize) -> Result<BigRational, TreeError> {
        self.check(anc)?;
        self.check(desc)?;
        let not_anc = TreeError::NotAncestor { anc, desc };
        if self.depth[anc] > self.depth[desc] {
            return Err(not_anc);
        }
        let mut parts = Vec::with_capacity((self.depth[desc] - self.depth[anc]) as usize);
        let mut x = desc;
        while self.depth[x] > self.depth[anc] {
            parts.push(self.weight[x].clone());
            x = self.parent[x];
        }
        if x != anc {
            return Err(not_anc);
        }
        Ok(sum_balanced(parts))
    }

    /// Distance from the root.
    pub fn distance(&self, v: usize) -> Result<BigRational, TreeError> {
        self.path_weight(0, v)
    }
}
