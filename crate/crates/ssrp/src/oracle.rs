//! Ground-truth solvers: exact SSRP by per-edge shortest-path recomputation,
//! for unweighted weighted-view graphs and for the reduction's weighted
//! gadget graphs. Deliberately simple; shares only graph primitives with the
//! fast solver so it stays an independent check.

use crate::graph::{dijkstra_weighted_view, EdgeSet, ExtDist, Graph, WeightFunction};
use crate::minplus::FixedRational;
use crate::par;

/// Exact `d(s, x, H_w - e)` for every listed tree edge and every vertex,
/// one Dijkstra per failed edge.
pub fn ssrp_oracle(g: &Graph, w: &WeightFunction, tree_edges: &[(u32, u32)]) -> Vec<Vec<ExtDist>> {
    par::map_slice(tree_edges, |&(u, v)| {
        dijkstra_weighted_view(g, w, &EdgeSet::single(u, v)).dist
    })
}

/// Positive-length graph for the reduction; undirected graphs store each
/// edge once and traverse it both ways.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    n: usize,
    undirected: bool,
    adj_start: Vec<u32>,
    adj: Vec<(u32, FixedRational)>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: &[(u32, u32, FixedRational)], undirected: bool) -> WeightedGraph {
        assert!(edges
            .iter()
            .all(|e| e.2.is_finite() && e.2 > FixedRational::ZERO));
        let mut deg = vec![0u32; n + 1];
        for &(u, v, _) in edges {
            deg[u as usize + 1] += 1;
            if undirected {
                deg[v as usize + 1] += 1;
            }
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let mut adj = vec![(0u32, FixedRational::ZERO); deg[n] as usize];
        let mut cursor = deg.clone();
        for &(u, v, len) in edges {
            adj[cursor[u as usize] as usize] = (v, len);
            cursor[u as usize] += 1;
            if undirected {
                adj[cursor[v as usize] as usize] = (u, len);
                cursor[v as usize] += 1;
            }
        }
        WeightedGraph {
            n,
            undirected,
            adj_start: deg,
            adj,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn neighbors(&self, u: u32) -> &[(u32, FixedRational)] {
        &self.adj[self.adj_start[u as usize] as usize..self.adj_start[u as usize + 1] as usize]
    }

    fn blocked(&self, u: u32, v: u32, failed: Option<(u32, u32)>) -> bool {
        match failed {
            None => false,
            Some((a, b)) => (a == u && b == v) || (self.undirected && a == v && b == u),
        }
    }

    /// Dijkstra from `src` avoiding one optional failed edge.
    pub fn distances(&self, src: u32, failed: Option<(u32, u32)>) -> Vec<FixedRational> {
        let mut dist = vec![FixedRational::INFINITY; self.n];
        let mut heap = std::collections::BinaryHeap::new();
        dist[src as usize] = FixedRational::ZERO;
        heap.push(std::cmp::Reverse((FixedRational::ZERO, src)));
        while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
            if d > dist[u as usize] {
                continue;
            }
            for &(v, len) in self.neighbors(u) {
                if self.blocked(u, v, failed) {
                    continue;
                }
                let nd = d + len;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    heap.push(std::cmp::Reverse((nd, v)));
                }
            }
        }
        dist
    }
}

/// Exact per-failure distance vectors from `s`, one Dijkstra per failure.
pub fn weighted_ssrp_oracle(
    g: &WeightedGraph,
    s: u32,
    failed_edges: &[(u32, u32)],
) -> Vec<Vec<FixedRational>> {
    par::map_slice(failed_edges, |&e| g.distances(s, Some(e)))
}
