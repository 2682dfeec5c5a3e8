//! Random instance generation shared by the CLI, benches and tests.

use crate::{Error, Graph, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform random simple directed graph with `m` edges, repaired to make
/// every vertex reachable from vertex 0 by laying down a random spanning
/// arborescence first. Requires `n - 1 <= m <= n(n-1)`.
pub fn gnm_reachable(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let max = n.saturating_mul(n.saturating_sub(1));
    if m > max || (n > 1 && m < n - 1) {
        return Err(Error::InfeasibleGen { n, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m * 2);

    // Attach each vertex (in random order) below an already-attached one.
    let mut order: Vec<u32> = (1..n as u32).collect();
    order.shuffle(&mut rng);
    let mut attached = vec![0u32];
    for &v in &order {
        let p = attached[rng.gen_range(0..attached.len())];
        edges.push((p, v));
        seen.insert((p, v));
        attached.push(v);
    }

    let remaining = m - edges.len();
    if remaining > max / 2 {
        // Dense request: shuffle the full complement instead of rejection.
        let mut pool: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|u| (0..n as u32).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && !seen.contains(&(u, v)))
            .collect();
        pool.shuffle(&mut rng);
        edges.extend(pool.into_iter().take(remaining));
    } else {
        while edges.len() < m {
            let u = rng.gen_range(0..n as u32);
            let v = rng.gen_range(0..n as u32);
            if u != v && seen.insert((u, v)) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::new_unchecked(n, edges))
}

/// Long shortest path from 0 plus leveled chords and dangling pockets;
/// makes the multi-scale pivot machinery engage, unlike G(n, 4n) whose
/// diameter is tiny. Every vertex carries a level (spine vertex i has level
/// i) and extra edges may raise the level by at most one, so no edge set
/// can shortcut the spine: d(0, spine_i) = i always. `spine` is the number
/// of path vertices including the source.
pub fn path_with_chords(n: usize, spine: usize, extra: usize, seed: u64) -> Result<Graph> {
    assert!(spine >= 2 && spine <= n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut level = vec![0u32; n];
    for v in 1..spine as u32 {
        edges.push((v - 1, v));
        seen.insert((v - 1, v));
        level[v as usize] = v;
    }
    // Pocket vertices hang one level below a random earlier vertex.
    for v in spine as u32..n as u32 {
        let p = rng.gen_range(0..v);
        edges.push((p, v));
        seen.insert((p, v));
        level[v as usize] = level[p as usize] + 1;
    }
    let mut added = 0;
    let mut attempts = 0;
    while added < extra && attempts < extra * 30 {
        attempts += 1;
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u == v || seen.contains(&(u, v)) {
            continue;
        }
        if level[v as usize] > level[u as usize] + 1 {
            continue;
        }
        seen.insert((u, v));
        edges.push((u, v));
        added += 1;
    }
    Ok(Graph::new_unchecked(n, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bfs, EdgeSet};

    #[test]
    fn gnm_minimum_is_arborescence() {
        let g = gnm_reachable(5, 4, 1).unwrap();
        assert_eq!(g.m(), 4);
        let b = bfs(&g, 0, &EdgeSet::empty());
        assert!(b.dist.iter().all(|d| d.is_finite()));
    }

    #[test]
    fn gnm_deterministic() {
        let a = gnm_reachable(20, 60, 7).unwrap();
        let b = gnm_reachable(20, 60, 7).unwrap();
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn gnm_infeasible() {
        assert!(gnm_reachable(3, 7, 0).is_err());
        assert!(gnm_reachable(5, 2, 0).is_err());
    }

    #[test]
    fn gnm_all_reachable() {
        for seed in 0..5 {
            let g = gnm_reachable(40, 160, seed).unwrap();
            let b = bfs(&g, 0, &EdgeSet::empty());
            assert!(b.dist.iter().all(|d| d.is_finite()));
        }
    }

    #[test]
    fn chords_keep_long_spine() {
        for seed in 0..5 {
            let g = path_with_chords(120, 80, 60, seed).unwrap();
            let b = bfs(&g, 0, &EdgeSet::empty());
            for i in 0..80 {
                assert_eq!(b.dist[i].value(), Some(i as u32), "spine shortcut at {i}");
            }
            assert!(b.dist.iter().all(|d| d.is_finite()));
        }
    }
}
