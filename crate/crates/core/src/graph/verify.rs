use std::cmp::Ordering;

use super::{aux_weight, GraphError, SsspResult, WeightedDigraph};
use crate::distcmp::{DistCmp, DistCmpConfig, DistanceComparator, NodeId};
use crate::ratnum::{BigRational, WordBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Tree distances in exact rational arithmetic.
    Exact,
    /// Inequalities answered by a distance-comparison structure over the tree.
    Fast,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// The edge `tail -> head` is a bad tree edge or can still be relaxed.
    Invalid { tail: usize, head: usize },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Checks that `r` is a shortest-path tree of `g`. Tree edges must be
/// edges of `g` carrying their weight; auxiliary tree edges must be the
/// source edges [`super::augment_source`] would add. When any auxiliary
/// edge is used, `g` is judged in its augmented form.
pub fn verify_sssp(g: &WeightedDigraph, r: &SsspResult, mode: VerifyMode) -> Result<Verdict, GraphError> {
    if r.n() != g.n() {
        return Err(GraphError::SizeMismatch { got: r.n(), want: g.n() });
    }
    let order = r.topological_order()?;
    let s = r.source;
    let aux_w = aux_weight(g);
    let augmented = r.parent.iter().flatten().any(|te| te.aux);
    for (v, p) in r.parent.iter().enumerate() {
        let Some(te) = p else {
            if augmented && v != s {
                return Ok(Verdict::Invalid { tail: s, head: v });
            }
            continue;
        };
        let ok = if te.aux {
            te.parent == s && te.weight == aux_w && g.edge(s, v).is_none_or(|e| e.aux)
        } else {
            g.edge(te.parent, v).is_some_and(|e| !e.aux && e.weight == te.weight)
        };
        if !ok {
            return Ok(Verdict::Invalid { tail: te.parent, head: v });
        }
    }
    let real = || g.edges().iter().filter(|e| !e.aux);
    let aux_targets = || (0..g.n()).filter(move |&v| augmented && v != s && g.edge(s, v).is_none_or(|e| e.aux));
    match mode {
        VerifyMode::Exact => {
            let d = r.distances()?;
            for e in real() {
                if let Some(du) = &d[e.tail] {
                    match &d[e.head] {
                        Some(dv) if du + &e.weight >= *dv => {}
                        _ => return Ok(Verdict::Invalid { tail: e.tail, head: e.head }),
                    }
                }
            }
            for v in aux_targets() {
                if d[v].as_ref().is_some_and(|dv| *dv > aux_w) {
                    return Ok(Verdict::Invalid { tail: s, head: v });
                }
            }
        }
        VerifyMode::Fast => {
            let tree_w = r.parent.iter().flatten().map(|te| &te.weight);
            let budget = WordBudget::fitting(tree_w.chain(real().map(|e| &e.weight)).chain([&aux_w]));
            let cfg = DistCmpConfig::new(g.n(), 1, budget);
            let mut dc = DistCmp::new(cfg, 0x5eed).expect("valid configuration");
            let mut node: Vec<Option<NodeId>> = vec![None; g.n()];
            node[s] = Some(dc.root());
            for &v in &order[1..] {
                let te = r.parent[v].as_ref().unwrap();
                let id = dc.insert_leaf(node[te.parent].unwrap(), &te.weight).expect("1-short tree weight");
                node[v] = Some(id);
            }
            // d(u) + w >= d(v)  <=>  d(u) - d(v) >= -w
            let violated = |dc: &mut DistCmp, u: NodeId, v: NodeId, w: &BigRational| {
                dc.compare(u, v, &-w).expect("1-short comparand") == Ordering::Less
            };
            for e in real() {
                if let Some(u) = node[e.tail] {
                    match node[e.head] {
                        Some(v) if !violated(&mut dc, u, v, &e.weight) => {}
                        _ => return Ok(Verdict::Invalid { tail: e.tail, head: e.head }),
                    }
                }
            }
            for v in aux_targets() {
                if let Some(x) = node[v] {
                    if violated(&mut dc, node[s].unwrap(), x, &aux_w) {
                        return Ok(Verdict::Invalid { tail: s, head: v });
                    }
                }
            }
        }
    }
    Ok(Verdict::Valid)
}
