//! Replacement paths from `s` to `t` along a given shortest path `P`:
//! for every edge `e` of `P`, an estimate of `d(s, t, H - e)`.
//!
//! Two backends sit behind the same contract. `Exact` runs one BFS per
//! failed edge. `Sampled` splits every replacement path into a `P`-prefix, a
//! hop whose interior avoids `V(P)`, and a `P`-suffix, then covers hops by
//! length and position: hops crossing a block boundary of `P` fall to one
//! Dijkstra pair per block of `sqrt(n)` edges, short hops inside a block to
//! depth-truncated sweeps, and long hops to randomly sampled vertices hit
//! with high probability. Every candidate is the length of a real path in
//! `H - e`, so estimates never undershoot; with high probability the optimal
//! hop is covered and the estimate is exact.

use crate::graph::{bfs, EdgeSet, ExtDist, Graph, NO_VERTEX};
use crate::par;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum RpBackend {
    Exact,
    Sampled,
}

impl std::str::FromStr for RpBackend {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(RpBackend::Exact),
            "sampled" => Ok(RpBackend::Sampled),
            other => Err(format!("unknown rp backend '{other}'")),
        }
    }
}

/// Per-edge estimates for the failures along `P`; `values[i]` answers the
/// failure of edge `(path[i], path[i+1])`.
#[derive(Clone, Debug)]
pub struct RpEstimates {
    pub values: Vec<ExtDist>,
    pub work: u64,
}

fn validate_path(g: &Graph, path: &[u32]) -> Result<()> {
    for w in path.windows(2) {
        if !g.has_edge(w[0], w[1]) {
            return Err(Error::NotAPath);
        }
    }
    #[cfg(debug_assertions)]
    if !path.is_empty() {
        let d = bfs(g, path[0], &EdgeSet::empty()).dist;
        for (i, &v) in path.iter().enumerate() {
            debug_assert_eq!(
                d[v as usize],
                ExtDist::finite(i as u32),
                "P is not shortest"
            );
        }
    }
    Ok(())
}

/// Exact `d(s, t, H - e)` for every edge of `P`, one BFS per failure.
pub fn replacement_paths_exact(g: &Graph, path: &[u32]) -> Result<RpEstimates> {
    validate_path(g, path)?;
    if path.len() < 2 {
        return Ok(RpEstimates {
            values: Vec::new(),
            work: 0,
        });
    }
    let s = path[0];
    let t = *path.last().unwrap();
    let l = path.len() - 1;
    let per_edge = par::map_indices(l, |i| {
        let b = bfs(g, s, &EdgeSet::single(path[i], path[i + 1]));
        (b.dist[t as usize], b.work)
    });
    let mut values = Vec::with_capacity(l);
    let mut work = 0;
    for (d, w) in per_edge {
        values.push(d);
        work += w;
    }
    Ok(RpEstimates { values, work })
}

/// One-sided randomized estimates: never below `d(s, t, H - e)`, equal with
/// high probability. Falls back to the exact backend when `|P| <= sqrt(n)`.
pub fn replacement_paths_rz(g: &Graph, path: &[u32], seed: u64, c: u32) -> Result<RpEstimates> {
    validate_path(g, path)?;
    if path.len() < 2 {
        return Ok(RpEstimates {
            values: Vec::new(),
            work: 0,
        });
    }
    let n = g.n();
    let l = path.len() - 1;
    let h = isqrt(n).max(1);
    if l <= h {
        return replacement_paths_exact(g, path);
    }

    let mut pos = vec![NO_VERTEX; n];
    for (i, &v) in path.iter().enumerate() {
        pos[v as usize] = i as u32;
    }
    let grev = g.reverse();
    let no_p = EdgeSet::path(n, path);
    let rev_path: Vec<u32> = path.iter().rev().copied().collect();
    let no_p_rev = EdgeSet::path(n, &rev_path);
    let mut work = 0u64;

    let mut best = vec![ExtDist::INFINITY; l];

    // Long hops: a sampled vertex lands on the hop interior w.h.p.; combine
    // prefix "reach the sample" and suffix "leave the sample" minima along P.
    let p = (c as f64 * (n.max(2) as f64).ln() / h as f64).min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(p)).collect();
    let sample_results = par::map_slice(&samples, |&r| {
        let fwd = bfs(g, r, &no_p);
        let rev = bfs(&grev, r, &no_p_rev);
        let mut contrib = vec![ExtDist::INFINITY; l];
        let mut g_suf = vec![ExtDist::INFINITY; l + 2];
        for b in (1..=l).rev() {
            let via = fwd.dist[path[b] as usize] + (l - b) as u32;
            g_suf[b] = g_suf[b + 1].min(via);
        }
        // f = min over depart points a <= i of: a + d(p_a, r, H-P)
        let mut f = ExtDist::INFINITY;
        for (i, slot) in contrib.iter_mut().enumerate() {
            f = f.min(rev.dist[path[i] as usize] + i as u32);
            *slot = f + g_suf[i + 1];
        }
        (contrib, fwd.work + rev.work)
    });
    for (contrib, w) in sample_results {
        work += w;
        for i in 0..l {
            best[i] = best[i].min(contrib[i]);
        }
    }

    // Blocks of h consecutive failed edges.
    let blocks: Vec<(usize, usize)> = (0..l).step_by(h).map(|lo| (lo, (lo + h).min(l))).collect();
    let block_results = par::map_slice(&blocks, |&(lo, hi)| {
        block_candidates(g, &grev, path, &pos, lo, hi, h)
    });
    for (contrib, w) in block_results {
        work += w;
        for (i, v) in contrib {
            best[i] = best[i].min(v);
        }
    }

    Ok(RpEstimates { values: best, work })
}

/// Candidates for failures in the edge-index block `[lo, hi)`.
///
/// Hops are classified by depart index `a` and rejoin index `b`
/// (`a <= i < b` per failure `i`):
///   * `a < lo`, `b <= hi`: forward Dijkstra from all earlier path vertices;
///   * `a >= lo`, `b >= hi`: reverse Dijkstra from all later path vertices;
///   * `a < lo`, `b > hi`: jumps the whole block, one value per block;
///   * both inside: depth-limited sweep per start (short hops only; long
///     ones are the samples' job).
fn block_candidates(
    g: &Graph,
    grev: &Graph,
    path: &[u32],
    pos: &[u32],
    lo: usize,
    hi: usize,
    h: usize,
) -> (Vec<(usize, ExtDist)>, u64) {
    let n = g.n();
    let l = path.len() - 1;
    let width = hi - lo;
    let mut work = 0u64;

    // Forward run: sources a < lo with weight a; sinks b in (lo, hi] feed
    // alpha, sinks b > hi feed the whole-block jump value.
    let mut alpha = vec![ExtDist::INFINITY; width + 1]; // slot b - lo for b in (lo, hi]
    let mut far = ExtDist::INFINITY;
    if lo > 0 {
        let mut dist = vec![u32::MAX; n];
        let mut heap: BinaryHeap<Reverse<(u32, u32)>> = BinaryHeap::new();
        for (a, &v) in path.iter().enumerate().take(lo) {
            dist[v as usize] = a as u32;
            heap.push(Reverse((a as u32, v)));
        }
        while let Some(Reverse((d, x))) = heap.pop() {
            if d > dist[x as usize] {
                continue;
            }
            for &z in g.out_neighbors(x) {
                work += 1;
                let b = pos[z as usize];
                if b == NO_VERTEX {
                    if d + 1 < dist[z as usize] {
                        dist[z as usize] = d + 1;
                        heap.push(Reverse((d + 1, z)));
                    }
                } else {
                    let b = b as usize;
                    if b > lo && b <= hi {
                        alpha[b - lo] = alpha[b - lo].min(ExtDist::finite(d + 1));
                    } else if b > hi {
                        far = far.min(ExtDist::finite(d + 1 + (l - b) as u32));
                    }
                }
            }
        }
    }
    // Suffix minima of alpha[b] + (l - b), so failure i reads rejoins b > i.
    let mut alpha_suffix = vec![ExtDist::INFINITY; width + 2];
    for b in (lo + 1..=hi).rev() {
        alpha_suffix[b - lo] = alpha_suffix[b - lo + 1].min(alpha[b - lo] + (l - b) as u32);
    }

    // Reverse run: sources b >= hi weighted by their suffix length; sinks
    // a in [lo, hi). Stepping backward over a path edge is skipped: that
    // would model the failed edge bypassing itself.
    let mut beta = vec![ExtDist::INFINITY; width];
    {
        let mut dist = vec![u32::MAX; n];
        let mut heap: BinaryHeap<Reverse<(u32, u32)>> = BinaryHeap::new();
        for b in hi..=l {
            let v = path[b];
            let d = (l - b) as u32;
            if d < dist[v as usize] {
                dist[v as usize] = d;
                heap.push(Reverse((d, v)));
            }
        }
        while let Some(Reverse((d, x))) = heap.pop() {
            if d > dist[x as usize] {
                continue;
            }
            for &y in grev.out_neighbors(x) {
                work += 1;
                let a = pos[y as usize];
                if a == NO_VERTEX {
                    if d + 1 < dist[y as usize] {
                        dist[y as usize] = d + 1;
                        heap.push(Reverse((d + 1, y)));
                    }
                } else {
                    let a = a as usize;
                    let is_path_edge =
                        pos[x as usize] != NO_VERTEX && pos[x as usize] == a as u32 + 1;
                    if a >= lo && a < hi && !is_path_edge {
                        beta[a - lo] = beta[a - lo].min(ExtDist::finite(d + 1));
                    }
                }
            }
        }
    }

    // Short hops with both endpoints inside the block: depth-limited BFS
    // from each start vertex over the interior (no path vertices).
    let mut short = vec![ExtDist::INFINITY; width * (width + 1)];
    {
        let mut dist = vec![u32::MAX; n];
        let mut touched: Vec<u32> = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        for a in lo..hi {
            let row = (a - lo) * (width + 1);
            queue.clear();
            let src = path[a];
            queue.push_back((src, 0u32));
            while let Some((x, d)) = queue.pop_front() {
                for &z in g.out_neighbors(x) {
                    work += 1;
                    let b = pos[z as usize];
                    if b == NO_VERTEX {
                        if d + 1 < h as u32 && dist[z as usize] == u32::MAX {
                            dist[z as usize] = d + 1;
                            touched.push(z);
                            queue.push_back((z, d + 1));
                        }
                    } else {
                        let b = b as usize;
                        let is_path_edge = x == src && b == a + 1;
                        if b > a && b <= hi && !is_path_edge {
                            let slot = &mut short[row + (b - lo)];
                            *slot = (*slot).min(ExtDist::finite(d + 1));
                        }
                    }
                }
            }
            for &z in &touched {
                dist[z as usize] = u32::MAX;
            }
            touched.clear();
        }
    }

    let mut out: Vec<(usize, ExtDist)> = Vec::with_capacity(width);
    let mut beta_prefix = ExtDist::INFINITY;
    for i in lo..hi {
        beta_prefix = beta_prefix.min(beta[i - lo] + i as u32);
        let mut cand = far.min(alpha_suffix[i + 1 - lo]).min(beta_prefix);
        for a in lo..=i {
            let row = (a - lo) * (width + 1);
            for b in i + 1..=hi {
                let d = short[row + (b - lo)];
                if d.is_finite() {
                    cand = cand.min(d + a as u32 + (l - b) as u32);
                }
            }
        }
        out.push((i, cand));
    }
    (out, work)
}

pub fn replacement_paths(
    g: &Graph,
    path: &[u32],
    backend: RpBackend,
    seed: u64,
    c: u32,
) -> Result<RpEstimates> {
    match backend {
        RpBackend::Exact => replacement_paths_exact(g, path),
        RpBackend::Sampled => replacement_paths_rz(g, path, seed, c),
    }
}

pub fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    while r * r > n {
        r -= 1;
    }
    r
}
