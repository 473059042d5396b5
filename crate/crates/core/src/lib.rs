pub mod cfrac;
pub mod cover;
pub mod distcmp;
pub mod graph;
pub mod inctree;
pub mod ratnum;
pub mod scaling;
pub mod sssp;
pub mod stats;
