//! Per-recursion-node instrumentation. One record per call; budgets from
//! the running-time analysis are asserted over these in the tests.

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CallMetrics {
    pub depth: u32,
    pub n_h: u64,
    pub m_h: u64,
    /// |W| on entry.
    pub n_w: u64,
    /// |Q| on entry, counted as (e, x, w) triples.
    pub n_q: u64,
    /// Queries added for the children beyond those inherited from Q.
    pub new_queries: u64,
    pub w_t: u64,
    pub w_s: u64,
    /// |B|, pivots sampled (union over scales).
    pub b_total: u64,
    /// max over scales of |E(P_k)| * |B_k|.
    pub band_product_max: u64,
    pub path_len: u64,
    pub traversals: u64,
    /// Edges scanned across all traversals of this call (children excluded).
    pub work: u64,
    pub wall_ms: f64,
    pub base_case: bool,
}

/// Sums grouped by recursion depth, for the per-level budget checks.
pub fn level_totals(nodes: &[CallMetrics]) -> Vec<(u64, u64, u64)> {
    let max_depth = nodes.iter().map(|n| n.depth).max().unwrap_or(0) as usize;
    let mut totals = vec![(0u64, 0u64, 0u64); max_depth + 1];
    for n in nodes {
        let t = &mut totals[n.depth as usize];
        t.0 += n.n_h;
        t.1 += n.m_h;
        t.2 += n.n_q;
    }
    totals
}
