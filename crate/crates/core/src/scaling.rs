//! Bit-by-bit scaling to an `ε`-feasible price function for rational
//! weights, driven by an integer negative-weight SSSP routine.

use thiserror::Error;

use crate::graph::{relax_to_fixpoint, CycleWitness, PriceFunction, RelaxOutcome, WeightedDigraph};
use crate::ratnum::{truncated_numerator, BigRational, Integer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalingError {
    #[error("level-0 weight {0} does not fit the integer solver")]
    WeightRange(String),
    #[error("level {level}: edge {tail}->{head} has reduced weight {weight} below -2")]
    ReducedWeightBelowRange { level: u32, tail: usize, head: usize, weight: String },
    #[error("level {level}: vertex {vertex} lost reachability from the super-source")]
    LostVertex { level: u32, vertex: usize },
    #[error("integer solver reported a cycle that is not negative in the input")]
    BogusCycle,
    #[error("assembled prices violate the {0} feasibility target")]
    NotFeasible(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntOutcome {
    Distances(Vec<Option<i128>>),
    /// Vertex sequence of a closed walk with negative weight.
    NegativeCycle(Vec<usize>),
}

/// Single-source distances over integer weights.
pub trait IntegerSssp {
    fn solve(&self, adj: &[Vec<(usize, i128)>], s: usize) -> IntOutcome;
}

/// Bellman-Ford with early termination.
#[derive(Debug, Clone, Copy, Default)]
pub struct BellmanFord;

impl IntegerSssp for BellmanFord {
    fn solve(&self, adj: &[Vec<(usize, i128)>], s: usize) -> IntOutcome {
        let mut init = vec![None; adj.len()];
        init[s] = Some(0);
        match relax_to_fixpoint(adj, init) {
            RelaxOutcome::Settled { dist, .. } => IntOutcome::Distances(dist),
            RelaxOutcome::Cycle { vertices, .. } => IntOutcome::NegativeCycle(vertices),
        }
    }
}

pub fn integer_sssp(adj: &[Vec<(usize, i128)>], s: usize) -> IntOutcome {
    BellmanFord.solve(adj, s)
}

/// `w^(j) = 2^j · w^(j-truncated) + 1`.
pub fn scaled_weight(w: &BigRational, j: u32) -> Integer {
    truncated_numerator(w, j) + 1u32
}

/// `Σ p_i / 2^i`, summed by halving so each level works on numbers of
/// proportional size.
pub fn assemble_price(ps: &[Vec<i128>]) -> PriceFunction {
    let n = ps.first().map_or(0, Vec::len);
    if ps.is_empty() {
        return PriceFunction::zero(n);
    }
    let len = ps.len() as u32;
    let col = |v: usize| ps.iter().map(|p| p[v]).collect::<Vec<_>>();
    PriceFunction((0..n).map(|v| BigRational::dyadic(halving(&col(v)), len - 1)).collect())
}

/// `N` with `Σ_i xs[i] / 2^i = N / 2^(len-1)`.
fn halving(xs: &[i128]) -> Integer {
    match xs.len() {
        0 => Integer::new(),
        1 => Integer::from(xs[0]),
        len => {
            let mid = len.div_ceil(2);
            let right = (len - mid) as u32;
            (halving(&xs[..mid]) << right) + halving(&xs[mid..])
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScalingStats {
    /// Calls to the integer solver.
    pub iterations: u64,
    /// Edges dropped because their reduced weight exceeded `4n`.
    pub pruned_edges: u64,
    /// Largest `|p_i(v)|` seen.
    pub max_abs_price: i128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScalingOutcome {
    Price(PriceFunction),
    NegativeCycle(CycleWitness),
}

/// A `2^-k`-feasible price function of `g`, or a negative cycle.
pub fn eps_feasible_price(g: &WeightedDigraph, k: u32) -> Result<ScalingOutcome, ScalingError> {
    eps_feasible_price_with(g, k, &BellmanFord, &mut ScalingStats::default())
}

pub fn eps_feasible_price_with<S: IntegerSssp>(
    g: &WeightedDigraph,
    k: u32,
    solver: &S,
    stats: &mut ScalingStats,
) -> Result<ScalingOutcome, ScalingError> {
    let n = g.n();
    let star = n;
    let cap = 4 * n as i128;
    // Surviving edges of H^(j) as indices into g's edge list; the edges
    // out of the super-source are kept separately.
    let mut alive: Vec<usize> = (0..g.m()).collect();
    let mut star_alive: Vec<usize> = (0..n).collect();
    let mut pstar: Vec<Integer> = vec![Integer::new(); n];
    let mut ps: Vec<Vec<i128>> = Vec::with_capacity(k as usize + 2);
    for j in 0..=k + 1 {
        let mut adj: Vec<Vec<(usize, i128)>> = vec![Vec::new(); n + 1];
        let mut keep = Vec::with_capacity(alive.len());
        for &id in &alive {
            let e = g.edge_at(id);
            let mut x = scaled_weight(&e.weight, j);
            if j > 0 {
                x += Integer::from(&pstar[e.tail] - &pstar[e.head]) << 1;
            }
            if j > 0 && x > cap {
                stats.pruned_edges += 1;
                continue;
            }
            if j > 0 && x < -2 {
                return Err(ScalingError::ReducedWeightBelowRange {
                    level: j,
                    tail: e.tail,
                    head: e.head,
                    weight: x.to_string(),
                });
            }
            let x = x.to_i128().ok_or_else(|| ScalingError::WeightRange(e.weight.to_string()))?;
            adj[e.tail].push((e.head, x));
            keep.push(id);
        }
        alive = keep;
        let mut star_keep = Vec::with_capacity(star_alive.len());
        for &v in &star_alive {
            // w = 0, so w^(j) = 1 and p*_j(s*) = 0
            let x = Integer::from(1) - Integer::from(&pstar[v] << 1u32);
            if j > 0 && x > cap {
                stats.pruned_edges += 1;
                continue;
            }
            if j > 0 && x < -2 {
                return Err(ScalingError::ReducedWeightBelowRange {
                    level: j,
                    tail: star,
                    head: v,
                    weight: x.to_string(),
                });
            }
            adj[star].push((v, x.to_i128().expect("bounded by 4n")));
            star_keep.push(v);
        }
        star_alive = star_keep;
        stats.iterations += 1;
        let dist = match solver.solve(&adj, star) {
            IntOutcome::NegativeCycle(cycle) => {
                let weight = g.walk_weight(&cycle, true).ok_or(ScalingError::BogusCycle)?;
                let witness = CycleWitness { vertices: cycle, weight };
                if !witness.verify(g) {
                    return Err(ScalingError::BogusCycle);
                }
                return Ok(ScalingOutcome::NegativeCycle(witness));
            }
            IntOutcome::Distances(d) => d,
        };
        let mut p = Vec::with_capacity(n);
        for (v, d) in dist.iter().enumerate().take(n) {
            let d = d.ok_or(ScalingError::LostVertex { level: j, vertex: v })?;
            stats.max_abs_price = stats.max_abs_price.max(d.abs());
            p.push(d);
        }
        for (ps_v, &pv) in pstar.iter_mut().zip(&p) {
            *ps_v = Integer::from(&*ps_v << 1) + pv;
        }
        ps.push(p);
    }
    let price = assemble_price(&ps);
    debug_assert!(price.0.iter().zip(&pstar).all(|(a, b)| *a == BigRational::dyadic(b.clone(), k + 1)));
    let target = BigRational::dyadic(1, k);
    if !crate::graph::check_eps_feasible(g, &price, &target) {
        return Err(ScalingError::NotFeasible(target.to_string()));
    }
    Ok(ScalingOutcome::Price(price))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::check_eps_feasible;
    use crate::ratnum::rat;

    #[test]
    fn assemble_small() {
        let p = assemble_price(&[vec![3], vec![1]]);
        assert_eq!(p.0[0], rat(7, 2));
        let p = assemble_price(&[vec![0, 0], vec![0, 0], vec![0, 0]]);
        assert_eq!(p.0, vec![rat(0, 1), rat(0, 1)]);
        let p = assemble_price(&[vec![1], vec![-3], vec![5], vec![2], vec![-7]]);
        assert_eq!(p.0[0], rat(16 - 24 + 20 + 4 - 7, 16));
    }

    #[test]
    fn single_negative_edge() {
        let g = WeightedDigraph::from_edges(2, [(0, 1, rat(-1, 1))]).unwrap();
        let ScalingOutcome::Price(p) = eps_feasible_price(&g, 1).unwrap() else { panic!() };
        assert!(check_eps_feasible(&g, &p, &rat(1, 2)));
    }

    #[test]
    fn negative_triangle() {
        let g = WeightedDigraph::from_edges(3, [(0, 1, rat(1, 2)), (1, 2, rat(-1, 3)), (2, 0, rat(-1, 3))]).unwrap();
        match eps_feasible_price(&g, 4).unwrap() {
            ScalingOutcome::NegativeCycle(c) => {
                assert!(c.verify(&g));
                assert_eq!(c.weight, rat(-1, 6));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn integer_solver() {
        let adj = vec![vec![(1, -3)], vec![]];
        assert_eq!(integer_sssp(&adj, 0), IntOutcome::Distances(vec![Some(0), Some(-3)]));
        let adj = vec![vec![(1, -1)], vec![(0, 0)]];
        let IntOutcome::NegativeCycle(c) = integer_sssp(&adj, 0) else { panic!() };
        assert_eq!(c.len(), 2);
    }
}
