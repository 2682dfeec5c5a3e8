//! Single-source replacement paths (SSRP) for unweighted directed graphs.
//!
//! Given a graph, a source `s` and the BFS tree rooted at `s`, the solver
//! estimates `d(s, x, G - e)` for every tree edge `e` and vertex `x`. The
//! estimates never undershoot the true distance and match it with high
//! probability. An exact per-edge oracle, a replacement-paths subroutine,
//! and a min-plus / APSP reduction over the weighted variant round out the
//! crate.

pub mod graph;
pub mod metrics;
pub mod minplus;
pub mod oracle;
mod par;
pub mod random;
pub mod rp;
pub mod ssrp;
pub mod tree;

pub use graph::{EdgeSet, ExtDist, Graph, WeightFunction};
pub use metrics::CallMetrics;
pub use oracle::WeightedGraph;
pub use rp::RpBackend;
pub use ssrp::{
    generalized_ssrp, GeneralizedReport,
    partition_path, sample_pivot_band, sample_pivots, solve_ssrp, EstimateTable, SolveConfig,
    SolveReport,
};
pub use tree::{BfsTree, LcaIndex, Separation};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex id {id} out of range (n = {n})")]
    VertexOutOfRange { id: u64, n: usize },
    #[error("vertex {0} is unreachable from the source")]
    Unreachable(u32),
    #[error("induced subgraph over an empty vertex set")]
    EmptyVertexSet,
    #[error("separator requires at least 3 vertices, tree has {0}")]
    TreeTooSmall(usize),
    #[error("({0}, {1}) is not a tree edge")]
    NotATreeEdge(u32, u32),
    #[error("vertex sequence is not a path of the graph")]
    NotAPath,
    #[error("pivot resampling budget exhausted")]
    SamplingBudget,
    #[error("weight function violates the weight requirement at vertex {0}")]
    WeightRequirement(u32),
    #[error("sampling constant must be at least 3, got {0}")]
    BadConstant(u32),
    #[error("infeasible generator request: n = {n}, m = {m}")]
    InfeasibleGen { n: usize, m: usize },
    #[error("min-plus input has no finite entry")]
    AllInfinite,
    #[error("matrix entry is not representable at binary scale {0}")]
    NotRepresentable(u32),
    #[error("negative length out of scope for the reduction")]
    NegativeLength,
    #[error("matrix dimensions do not match: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
