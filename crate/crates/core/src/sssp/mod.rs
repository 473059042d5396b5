//! Shortest-path solvers: Dijkstra over a distance-comparison structure,
//! cut Dijkstra with a lazily updated heap, and the negative-weight
//! pipeline that recombines cut Dijkstra runs from a hitting set.

mod cut;
mod dijkstra;
mod game;
mod heap;
mod negative;

use thiserror::Error;

use crate::distcmp::DistCmpError;
use crate::graph::GraphError;
use crate::scaling::ScalingError;

pub use cut::{cut_dijkstra, cut_preprocess, cut_preprocess_with, replay_enhanced_order, CutContext, CutResult, CutStats, Preprocessed};
pub use dijkstra::{dijkstra_nonneg, dijkstra_nonneg_with, NonnegConfig, NonnegRun, NonnegStats, Strategy};
pub use game::{game_play, game_simulate, BobStrategy, GameError};
pub use heap::{CmpHeap, IndexedHeap};
pub use negative::{
    default_k, erase_loops, hitting_graph, negative_cycle_in_walk, negative_sssp, negative_sssp_with, recombine,
    run_seed, sample_hitting_set, NegConfig, NegOutcome, NegRun, NegStats,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("edge {tail}->{head} has negative weight; use the negative-weight solver")]
    NegativeWeight { tail: usize, head: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    DistCmp(#[from] DistCmpError),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
    #[error("internal error: {0}")]
    Internal(String),
}
