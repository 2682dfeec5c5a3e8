//! The recursive generalized SSRP solver.
//!
//! Each call receives a subgraph `H`, a BFS tree `K` rooted at the local
//! source, a list of weight functions `W`, and per-weight-function sets of
//! queried tree edges (a query asks about every vertex, so a query set is a
//! union of `edges x all-vertices x w` products and stays that shape down
//! the recursion). Tiny graphs are answered exactly by one Dijkstra per
//! (edge, weight function). Otherwise the tree splits at a balanced
//! separator into `S` (keeping the root) and `T` (rooted at the separator
//! `t`), with `P` the root-to-t path, and the answer for each query is the
//! minimum over the candidate terms of the case its (edge, vertex) pair
//! falls into: the dynamic program plus replacement-path bound at `t`,
//! depart/pivot compositions through sampled detour hitters, and translated
//! answers from the two recursive calls. Estimates never undershoot the
//! true distance and match it with high probability.

use crate::graph::{bfs, dijkstra_view, EdgeSet, ExtDist, Graph, WeightFunction, NO_VERTEX};
use crate::metrics::CallMetrics;
use crate::par;
use crate::rp::{self, isqrt, RpBackend};
use crate::tree::{balanced_separator, build_bfs_tree, build_lca, BfsTree};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct SolveConfig {
    /// Sampling constant, at least 3.
    pub c: u32,
    /// Seed for all randomness; identical seeds give identical output.
    pub seed: u64,
    pub rp_backend: RpBackend,
    /// Validate the weight requirement of every derived weight function.
    pub debug_checks: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            c: 3,
            seed: 0,
            rp_backend: RpBackend::Sampled,
            debug_checks: false,
        }
    }
}

/// Top-level result: one row per tree edge, `n` estimates per row.
/// Rows are sorted by (eu, ev).
pub struct EstimateTable {
    pub n: usize,
    pub edges: Vec<(u32, u32)>,
    dist: Vec<ExtDist>,
}

impl EstimateTable {
    #[inline]
    pub fn get(&self, row: usize, x: usize) -> ExtDist {
        self.dist[row * self.n + x]
    }

    pub fn rows(&self) -> impl Iterator<Item = ((u32, u32), &[ExtDist])> {
        self.edges
            .iter()
            .copied()
            .zip(self.dist.chunks_exact(self.n))
    }

    /// `eu ev x dist` rows sorted by (eu, ev, x); `inf` for infinity.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("eu\tev\tx\tdist\n");
        for ((eu, ev), row) in self.rows() {
            for (x, d) in row.iter().enumerate() {
                out.push_str(&format!("{eu}\t{ev}\t{x}\t{d}\n"));
            }
        }
        out
    }
}

pub struct SolveReport {
    pub table: EstimateTable,
    pub metrics: Vec<CallMetrics>,
}

/// Solves SSRP for the whole graph: estimates of `d(s, x, G - e)` for every
/// BFS-tree edge `e` and vertex `x`. Estimates are exact with high
/// probability and never too small.
pub fn solve_ssrp(g: &Graph, source: u32, cfg: &SolveConfig) -> Result<SolveReport> {
    if cfg.c < 3 {
        return Err(Error::BadConstant(cfg.c));
    }
    if source as usize >= g.n() {
        return Err(Error::VertexOutOfRange {
            id: source as u64,
            n: g.n(),
        });
    }
    let tree = build_bfs_tree(g, source)?;
    let n = g.n();
    let query_edges: Vec<u32> = (0..n as u32).filter(|&v| v != source).collect();
    let input = CallInput {
        graph: g.clone(),
        tree,
        weights: vec![vec![ExtDist::INFINITY; n]],
        query_edges: vec![query_edges.clone()],
    };
    let ctx = Ctx {
        global_n: n,
        c: cfg.c,
        backend: cfg.rp_backend,
        debug_checks: cfg.debug_checks,
    };
    let pairs: Vec<(u32, u32)> = query_edges
        .iter()
        .map(|&v| (input.tree.parent[v as usize], v))
        .collect();
    let mut out = generalized(input, &ctx, 0, splitmix(cfg.seed))?;

    let mut order: Vec<usize> = (0..query_edges.len()).collect();
    order.sort_by_key(|&i| pairs[i]);
    let mut edges = Vec::with_capacity(pairs.len());
    let mut dist = Vec::with_capacity(pairs.len() * n);
    let answers = std::mem::take(&mut out.answers);
    let rows = &answers[0];
    for &i in &order {
        edges.push(pairs[i]);
        dist.extend_from_slice(&rows[i * n..(i + 1) * n]);
    }
    Ok(SolveReport {
        table: EstimateTable { n, edges, dist },
        metrics: out.metrics,
    })
}

/// Answers to an explicit generalized query set: `answers[w]` holds one row
/// of `n` estimates per queried edge, aligned with the input edge lists.
pub struct GeneralizedReport {
    pub answers: Vec<Vec<ExtDist>>,
    pub metrics: Vec<CallMetrics>,
}

/// The generalized problem: per weight function `w`, estimates of
/// `d(s, x, H_w - e)` for every queried tree edge `e` and every vertex `x`.
/// All weight functions must share `source` and satisfy the weight
/// requirement (validated when `cfg.debug_checks` is set).
pub fn generalized_ssrp(
    g: &Graph,
    source: u32,
    weights: &[WeightFunction],
    query_edges: &[Vec<(u32, u32)>],
    cfg: &SolveConfig,
) -> Result<GeneralizedReport> {
    if cfg.c < 3 {
        return Err(Error::BadConstant(cfg.c));
    }
    if weights.len() != query_edges.len() {
        return Err(Error::Internal(
            "one query edge list per weight function".into(),
        ));
    }
    let tree = build_bfs_tree(g, source)?;
    let mut edge_lists = Vec::with_capacity(query_edges.len());
    for es in query_edges {
        let mut list = Vec::with_capacity(es.len());
        for &(u, v) in es {
            if v == source || v as usize >= g.n() || tree.parent[v as usize] != u {
                return Err(Error::NotATreeEdge(u, v));
            }
            list.push(v);
        }
        edge_lists.push(list);
    }
    for w in weights {
        if w.source != source {
            return Err(Error::Internal("weight function source mismatch".into()));
        }
        if cfg.debug_checks {
            w.check_requirement(g)?;
        }
    }
    let input = CallInput {
        graph: g.clone(),
        tree,
        weights: weights.iter().map(|w| w.weights.clone()).collect(),
        query_edges: edge_lists,
    };
    let ctx = Ctx {
        global_n: g.n(),
        c: cfg.c,
        backend: cfg.rp_backend,
        debug_checks: cfg.debug_checks,
    };
    let out = generalized(input, &ctx, 0, splitmix(cfg.seed))?;
    Ok(GeneralizedReport {
        answers: out.answers,
        metrics: out.metrics,
    })
}

struct Ctx {
    global_n: usize,
    c: u32,
    backend: RpBackend,
    debug_checks: bool,
}

struct CallInput {
    graph: Graph,
    tree: BfsTree,
    /// Per weight function, per vertex. The source is the tree root.
    weights: Vec<Vec<ExtDist>>,
    /// Per weight function, queried tree edges by child endpoint, in a
    /// deterministic order; every query covers all vertices.
    query_edges: Vec<Vec<u32>>,
}

struct CallOutput {
    /// answers[w][row * n + x] for query_edges[w][row].
    answers: Vec<Vec<ExtDist>>,
    metrics: Vec<CallMetrics>,
}

/// Splitmix64 step, for deriving child seeds deterministically.
fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Edge-disjoint partition of the path's edge indexes into the near-t
/// interval `P_0` and doubling bands `P_k`. Band `k` holds edge `j` exactly
/// when both endpoints sit in the distance band `[2^k h, 2^{k+1} h]` from
/// `t`; `P_0` takes everything within `2h` of `t` (h = floor(sqrt(n_h))).
/// Every edge of `P` lands in exactly one interval, and all edges of band
/// `k` come before (farther from `t` than) all edges of band `k - 1`.
pub fn partition_path(path_len: usize, n_h: usize) -> Vec<std::ops::Range<usize>> {
    let h = isqrt(n_h).max(1);
    let kmax = if n_h <= 1 { 0 } else { n_h.ilog2() as usize };
    let mut bands = Vec::with_capacity(kmax + 1);
    // Edge j has head distance-to-t equal to path_len - j - 1, so band k
    // (head dist in [2^k h, 2^{k+1} h - 1]) is a contiguous index range.
    let lo0 = path_len.saturating_sub(2 * h);
    bands.push(lo0..path_len);
    for k in 1..=kmax {
        let lo_dist = (1usize << k) * h;
        let hi_dist = (1usize << (k + 1)) * h;
        if path_len > lo_dist {
            let hi_j = path_len - lo_dist; // exclusive: head dist >= lo_dist
            let lo_j = path_len.saturating_sub(hi_dist);
            bands.push(lo_j..hi_j);
        } else {
            bands.push(0..0);
        }
    }
    bands
}

/// Samples one pivot scale: every vertex independently with probability
/// `C ln(n) / (2^k floor(sqrt(n_h)))` (clamped to one), resampling while the
/// draw exceeds `3 C ln(n) sqrt(n_h) / 2^k`, at most 64 retries.
pub fn sample_pivot_band(
    n_h: usize,
    global_n: usize,
    c: u32,
    k: u32,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<u32>> {
    let h = isqrt(n_h).max(1) as f64;
    let scale = (1u64 << k) as f64;
    let ln_n = (global_n.max(2) as f64).ln();
    let p = (c as f64 * ln_n / (scale * h)).min(1.0);
    let cap = 3.0 * c as f64 * ln_n * h / scale;
    for _ in 0..64 {
        let draw: Vec<u32> = (0..n_h as u32).filter(|_| rng.gen_bool(p)).collect();
        if p >= 1.0 || (draw.len() as f64) <= cap {
            return Ok(draw);
        }
    }
    Err(Error::SamplingBudget)
}

/// All scales `k` in `1..=floor(log2 n_h)`.
pub fn sample_pivots(
    n_h: usize,
    global_n: usize,
    c: u32,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<u32>>> {
    let kmax = if n_h <= 1 { 0 } else { n_h.ilog2() };
    (1..=kmax)
        .map(|k| sample_pivot_band(n_h, global_n, c, k, rng))
        .collect()
}

const BASE_CASE_MAX: usize = 6;

fn generalized(input: CallInput, ctx: &Ctx, depth: u32, node_seed: u64) -> Result<CallOutput> {
    let start = std::time::Instant::now();
    let CallInput {
        graph,
        tree,
        weights,
        query_edges,
    } = input;
    let n_h = graph.n();
    let m_h = graph.m();
    let n_w = weights.len();
    let n_q: u64 = query_edges
        .iter()
        .map(|es| es.len() as u64 * n_h as u64)
        .sum();
    let root = tree.root;

    let mut metrics = CallMetrics {
        depth,
        n_h: n_h as u64,
        m_h: m_h as u64,
        n_w: n_w as u64,
        n_q,
        new_queries: 0,
        w_t: 0,
        w_s: 0,
        b_total: 0,
        band_product_max: 0,
        path_len: 0,
        traversals: 0,
        work: 0,
        wall_ms: 0.0,
        base_case: n_h <= BASE_CASE_MAX,
    };

    if ctx.debug_checks {
        for w in &weights {
            for v in 0..n_h {
                if w[v] < ExtDist::finite(tree.depth[v]) {
                    return Err(Error::WeightRequirement(v as u32));
                }
            }
        }
    }

    // Base case: one exact Dijkstra per queried (edge, weight function).
    if n_h <= BASE_CASE_MAX {
        let jobs: Vec<(usize, usize)> = query_edges
            .iter()
            .enumerate()
            .flat_map(|(w, es)| (0..es.len()).map(move |r| (w, r)))
            .collect();
        let rows = par::map_slice(&jobs, |&(w, r)| {
            let v = query_edges[w][r];
            let e = EdgeSet::single(tree.parent[v as usize], v);
            let d = dijkstra_view(&graph, root, &weights[w], &e);
            (d.dist, d.work)
        });
        let mut answers: Vec<Vec<ExtDist>> = query_edges
            .iter()
            .map(|es| Vec::with_capacity(es.len() * n_h))
            .collect();
        for (&(w, _), (dist, work)) in jobs.iter().zip(rows) {
            answers[w].extend_from_slice(&dist);
            metrics.work += work;
            metrics.traversals += 1;
        }
        metrics.wall_ms = start.elapsed().as_secs_f64() * 1e3;
        return Ok(CallOutput {
            answers,
            metrics: vec![metrics],
        });
    }

    // Step: separate the tree and measure distances around t.
    let sep = balanced_separator(&tree)?;
    let t = sep.t;
    let path = sep.path.clone();
    let path_len = path.len() - 1;
    metrics.path_len = path_len as u64;
    let grev = graph.reverse();
    let from_t = bfs(&graph, t, &EdgeSet::empty());
    let to_t = bfs(&grev, t, &EdgeSet::empty());
    metrics.work += from_t.work + to_t.work;
    metrics.traversals += 2;
    let dist_from_t = from_t.dist;
    let dist_to_t = to_t.dist;

    let no_p = EdgeSet::path(n_h, &path);
    let rev_path: Vec<u32> = path.iter().rev().copied().collect();
    let no_p_rev = EdgeSet::path(n_h, &rev_path);

    // Step: d(s, ., H_w - P) for every weight function.
    let step3: Vec<Vec<ExtDist>> = if path_len > 0 {
        let results = par::map_slice(&weights, |w| {
            let d = dijkstra_view(&graph, root, w, &no_p);
            (d.dist, d.work)
        });
        results
            .into_iter()
            .map(|(dist, work)| {
                metrics.work += work;
                metrics.traversals += 1;
                dist
            })
            .collect()
    } else {
        Vec::new()
    };

    // Step: path intervals and pivots. Bands whose interval is empty are
    // never consulted, so they are not sampled.
    let bands = partition_path(path_len, n_h);
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(node_seed ^ 0x42));
    let mut band_pivots: Vec<Vec<u32>> = vec![Vec::new(); bands.len()];
    for k in 1..bands.len() {
        if !bands[k].is_empty() {
            band_pivots[k] = sample_pivot_band(n_h, ctx.global_n, ctx.c, k as u32, &mut rng)?;
        }
    }
    let mut all_pivots: Vec<u32> = band_pivots.iter().flatten().copied().collect();
    all_pivots.sort_unstable();
    all_pivots.dedup();
    metrics.b_total = all_pivots.len() as u64;
    metrics.band_product_max = (1..bands.len())
        .map(|k| bands[k].len() as u64 * band_pivots[k].len() as u64)
        .max()
        .unwrap_or(0);

    struct PivotTables {
        fwd: Vec<ExtDist>,
        /// depart(e_j, b) = pref[j]: best prefix-plus-reach value over
        /// depart points at or before the tail of edge j.
        pref: Vec<ExtDist>,
    }
    let pivot_tables: Vec<PivotTables> = {
        let results = par::map_slice(&all_pivots, |&b| {
            let fwd = bfs(&graph, b, &no_p);
            let rev = bfs(&grev, b, &no_p_rev);
            let mut pref = Vec::with_capacity(path_len);
            let mut best = ExtDist::INFINITY;
            for (a, &v) in path.iter().enumerate().take(path_len) {
                best = best.min(rev.dist[v as usize] + a as u32);
                pref.push(best);
            }
            (fwd, rev.work, pref)
        });
        results
            .into_iter()
            .map(|(fwd, rev_work, pref)| {
                metrics.work += fwd.work + rev_work;
                metrics.traversals += 2;
                PivotTables {
                    fwd: fwd.dist,
                    pref,
                }
            })
            .collect()
    };
    let pivot_index = |b: u32| all_pivots.binary_search(&b).expect("pivot present");

    // Step: estimates for the failure in P, destination t. The replacement
    // path subroutine covers the unweighted case; the suffix-minimum dynamic
    // program covers paths whose first edge is virtual.
    let dste: Vec<Vec<ExtDist>> = if path_len > 0 {
        let rz = rp::replacement_paths(
            &graph,
            &path,
            ctx.backend,
            splitmix(node_seed ^ 0x5a),
            ctx.c,
        )?;
        metrics.work += rz.work;
        metrics.traversals += 1;
        weights
            .iter()
            .enumerate()
            .map(|(w, _)| {
                let s3 = &step3[w];
                let mut table = vec![ExtDist::INFINITY; path_len];
                let mut suffix = ExtDist::INFINITY;
                for j in (0..path_len).rev() {
                    // Head of edge j joins the candidates after edge j.
                    let head = path[j + 1];
                    suffix = suffix.min(s3[head as usize] + dist_to_t[head as usize]);
                    table[j] = suffix.min(rz.values[j]);
                }
                table
            })
            .collect()
    } else {
        Vec::new()
    };

    // Recursive inputs.
    let t_verts = sep.t_vertices();
    let s_verts = sep.s_vertices();
    let (graph_t, t_to_parent, t_to_local) = graph.induced_subgraph(&t_verts)?;
    let (graph_s, s_to_parent, s_to_local) = graph.induced_subgraph(&s_verts)?;
    let n_t = graph_t.n();
    let n_s = graph_s.n();

    let subtree_from = |verts: &[u32], to_local: &[u32], new_root: u32, root_depth: u32| {
        let mut parent = vec![NO_VERTEX; verts.len()];
        let mut depth = vec![0u32; verts.len()];
        for &v in verts {
            let lv = to_local[v as usize] as usize;
            depth[lv] = tree.depth[v as usize] - root_depth;
            if v != new_root {
                parent[lv] = to_local[tree.parent[v as usize] as usize];
            }
        }
        BfsTree::from_parents(to_local[new_root as usize], parent, depth)
    };
    let tree_t = subtree_from(&t_verts, &t_to_local, t, tree.depth[t as usize]);
    let tree_s = subtree_from(&s_verts, &s_to_local, root, 0);

    let path_u32 = path_len as u32;
    let mut on_path = vec![false; n_h];
    for &v in &path {
        on_path[v as usize] = true;
    }
    // T-side weight functions: each parent w shifted down by |P|, then the
    // help-from-above function built from S-side in-neighbors.
    let mut weights_t: Vec<Vec<ExtDist>> = weights
        .iter()
        .map(|w| {
            t_to_parent
                .iter()
                .map(|&v| w[v as usize].sub_finite(path_u32))
                .collect()
        })
        .collect();
    let c_t: Vec<ExtDist> = t_to_parent
        .iter()
        .map(|&v| {
            let mut best = ExtDist::INFINITY;
            for &u in graph.in_neighbors(v) {
                if !sep.in_t[u as usize] {
                    best = best.min(ExtDist::finite(tree.depth[u as usize] + 1));
                }
            }
            best.sub_finite(path_u32)
        })
        .collect();
    weights_t.push(c_t);

    // S-side weight functions: parent w with path vertices reweighted to
    // their P-avoiding distance, the help-from-below function, and one
    // function per pivot.
    let mut weights_s: Vec<Vec<ExtDist>> = weights
        .iter()
        .enumerate()
        .map(|(wi, w)| {
            s_to_parent
                .iter()
                .map(|&v| {
                    if path_len > 0 && on_path[v as usize] {
                        step3[wi][v as usize]
                    } else {
                        w[v as usize]
                    }
                })
                .collect()
        })
        .collect();
    let c_s: Vec<ExtDist> = s_to_parent
        .iter()
        .map(|&v| {
            let mut best = ExtDist::INFINITY;
            for &u in graph.in_neighbors(v) {
                if sep.in_t[u as usize] && u != t {
                    best = best.min(ExtDist::finite(tree.depth[u as usize] + 1));
                }
            }
            best
        })
        .collect();
    weights_s.push(c_s);
    for &b in &all_pivots {
        let fwd = &pivot_tables[pivot_index(b)].fwd;
        let db = tree.depth[b as usize];
        weights_s.push(s_to_parent.iter().map(|&v| fwd[v as usize] + db).collect());
    }
    metrics.w_t = weights_t.len() as u64;
    metrics.w_s = weights_s.len() as u64;

    // Query routing. Inherited queries keep their weight-function index;
    // each branch then gains its full help-function product, and the S side
    // the per-pivot band products.
    let mut qe_t: Vec<Vec<u32>> = vec![Vec::new(); weights_t.len()];
    let mut qe_s: Vec<Vec<u32>> = vec![Vec::new(); weights_s.len()];
    // For each parent (w, position): the row index in the child's answers.
    let mut child_row: Vec<Vec<u32>> = Vec::with_capacity(n_w);
    for (w, es) in query_edges.iter().enumerate() {
        let mut rows = Vec::with_capacity(es.len());
        for &v in es {
            if sep.edge_in_t(v) {
                rows.push(qe_t[w].len() as u32);
                qe_t[w].push(t_to_local[v as usize]);
            } else {
                rows.push(qe_s[w].len() as u32);
                qe_s[w].push(s_to_local[v as usize]);
            }
        }
        child_row.push(rows);
    }
    qe_t[n_w] = (0..n_t as u32).filter(|&v| v != tree_t.root).collect();
    qe_s[n_w] = (0..n_s as u32).filter(|&v| v != tree_s.root).collect();
    metrics.new_queries = (qe_t[n_w].len() * n_t + qe_s[n_w].len() * n_s) as u64;
    // Pivot products: per scale k, E(P_k) x V(S) x {w_b} for b in B_k.
    // Rows are laid out band by band in edge order, so the row of edge j in
    // band k is its offset from the band start.
    let mut band_offset: Vec<std::collections::HashMap<usize, u32>> =
        vec![std::collections::HashMap::new(); all_pivots.len()];
    for (k, band) in bands.iter().enumerate().skip(1) {
        for &b in &band_pivots[k] {
            let bi = pivot_index(b);
            let group = n_w + 1 + bi;
            band_offset[bi].insert(k, qe_s[group].len() as u32);
            for j in band.clone() {
                qe_s[group].push(s_to_local[path[j + 1] as usize]);
            }
            metrics.new_queries += band.len() as u64 * n_s as u64;
        }
    }

    if ctx.debug_checks {
        for w in &weights_t {
            for v in 0..n_t {
                if w[v] < ExtDist::finite(tree_t.depth[v]) {
                    return Err(Error::WeightRequirement(t_to_parent[v]));
                }
            }
        }
        for w in &weights_s {
            for v in 0..n_s {
                if w[v] < ExtDist::finite(tree_s.depth[v]) {
                    return Err(Error::WeightRequirement(s_to_parent[v]));
                }
            }
        }
    }

    let input_t = CallInput {
        graph: graph_t,
        tree: tree_t,
        weights: weights_t,
        query_edges: qe_t,
    };
    let input_s = CallInput {
        graph: graph_s,
        tree: tree_s,
        weights: weights_s,
        query_edges: qe_s,
    };
    let seed_s = splitmix(node_seed ^ 0x53);
    let seed_t = splitmix(node_seed ^ 0x54);
    let (out_s, out_t) = par::join(
        || generalized(input_s, ctx, depth + 1, seed_s),
        || generalized(input_t, ctx, depth + 1, seed_t),
    );
    let out_s = out_s?;
    let out_t = out_t?;

    // Combine phase. Work is grouped per parent tree edge so the depart and
    // pivot rows are built once and shared across weight functions; each
    // job owns the answer rows it fills.
    let idx = build_lca(&tree);
    let mut consumers_of: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_h];
    for (w, es) in query_edges.iter().enumerate() {
        for (pos, &v) in es.iter().enumerate() {
            consumers_of[v as usize].push((w, pos));
        }
    }
    let mut path_edge_of: Vec<Option<usize>> = vec![None; n_h];
    for j in 0..path_len {
        path_edge_of[path[j + 1] as usize] = Some(j);
    }
    let band_of_edge: Vec<u32> = {
        let mut v = vec![0u32; path_len];
        for (k, band) in bands.iter().enumerate() {
            for j in band.clone() {
                v[j] = k as u32;
            }
        }
        v
    };

    let mut answers: Vec<Vec<ExtDist>> = query_edges
        .iter()
        .map(|es| vec![ExtDist::INFINITY; es.len() * n_h])
        .collect();
    struct Job<'a> {
        v_e: u32,
        rows: Vec<(usize, &'a mut [ExtDist])>,
    }
    let jobs: Vec<Job> = {
        let mut slices: Vec<Vec<Option<&mut [ExtDist]>>> = answers
            .iter_mut()
            .map(|a| a.chunks_mut(n_h).map(Some).collect())
            .collect();
        consumers_of
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(v_e, cons)| Job {
                v_e: v_e as u32,
                rows: cons
                    .iter()
                    .map(|&(w, pos)| (w, slices[w][pos].take().expect("row claimed once")))
                    .collect(),
            })
            .collect()
    };

    let filled = par::map_owned(jobs, |job| {
        let Job { v_e, rows } = job;
        let consumers = &consumers_of[v_e as usize];
        let mut work = 0u64;
        let mut traversals = 0u64;

        let in_t_edge = sep.edge_in_t(v_e);
        let pe = if in_t_edge {
            None
        } else {
            path_edge_of[v_e as usize]
        };

        // depart and pivot rows for a failure on P.
        let (depart_row, pivot_row) = if let Some(j) = pe {
            let k = band_of_edge[j] as usize;
            if k == 0 {
                let b = bfs(&graph, root, &EdgeSet::single(path[j], path[j + 1]));
                work += b.work;
                traversals += 1;
                // pivot(e, x) = depart(e, x) = d(s, x, H - e) on P_0.
                let pr: Vec<ExtDist> = s_to_parent.iter().map(|&v| b.dist[v as usize]).collect();
                (b.dist, pr)
            } else {
                let mut dr = vec![ExtDist::INFINITY; n_h];
                for &b in &band_pivots[k] {
                    let tabs = &pivot_tables[pivot_index(b)];
                    let de_b = tabs.pref[j];
                    if !de_b.is_finite() {
                        continue;
                    }
                    for x in 0..n_h {
                        dr[x] = dr[x].min(de_b + tabs.fwd[x]);
                    }
                }
                let mut pr = vec![ExtDist::INFINITY; n_s];
                for &b in &band_pivots[k] {
                    let bi = pivot_index(b);
                    let de_b = pivot_tables[bi].pref[j];
                    if !de_b.is_finite() {
                        continue;
                    }
                    let group = n_w + 1 + bi;
                    let off = band_offset[bi][&k] as usize + (j - bands[k].start);
                    let row = &out_s.answers[group][off * n_s..(off + 1) * n_s];
                    let db = tree.depth[b as usize];
                    for x in 0..n_s {
                        pr[x] = pr[x].min((row[x] + de_b).sub_finite(db));
                    }
                }
                (dr, pr)
            }
        } else {
            (Vec::new(), Vec::new())
        };

        for ((w, pos), (_, row)) in consumers.iter().copied().zip(rows) {
            let crow = child_row[w][pos] as usize;
            if in_t_edge {
                let wt = &out_t.answers[w][crow * n_t..(crow + 1) * n_t];
                let ct_rank = local_edge_rank(&t_to_local, v_e, t_to_local[t as usize]);
                let ct = &out_t.answers[n_w][ct_rank * n_t..(ct_rank + 1) * n_t];
                for (x, slot) in row.iter_mut().enumerate() {
                    if idx.is_ancestor(v_e, x as u32) {
                        let lx = t_to_local[x] as usize;
                        *slot = (wt[lx].min(ct[lx])) + path_u32;
                    } else {
                        *slot = ExtDist::finite(tree.depth[x]);
                    }
                }
            } else if let Some(j) = pe {
                let ws = &out_s.answers[w][crow * n_s..(crow + 1) * n_s];
                let cs_rank = local_edge_rank(&s_to_local, v_e, s_to_local[root as usize]);
                let cs = &out_s.answers[n_w][cs_rank * n_s..(cs_rank + 1) * n_s];
                let dste_w = &dste[w];
                let s3 = &step3[w];
                for (x, slot) in row.iter_mut().enumerate() {
                    if !idx.is_ancestor(v_e, x as u32) {
                        *slot = ExtDist::finite(tree.depth[x]);
                    } else if x as u32 == t {
                        *slot = dste_w[j];
                    } else if sep.in_t[x] {
                        *slot = s3[x].min(dste_w[j] + dist_from_t[x]).min(depart_row[x]);
                    } else {
                        let lx = s_to_local[x] as usize;
                        *slot = ws[lx]
                            .min(s3[x])
                            .min(depart_row[x])
                            .min(pivot_row[lx])
                            .min((cs[lx] + dste_w[j]).sub_finite(path_u32));
                    }
                }
            } else {
                // e in E(S) - E(P).
                let ws = &out_s.answers[w][crow * n_s..(crow + 1) * n_s];
                let cs_rank = local_edge_rank(&s_to_local, v_e, s_to_local[root as usize]);
                let cs = &out_s.answers[n_w][cs_rank * n_s..(cs_rank + 1) * n_s];
                for (x, slot) in row.iter_mut().enumerate() {
                    if idx.is_ancestor(v_e, x as u32) {
                        let lx = s_to_local[x] as usize;
                        *slot = ws[lx].min(cs[lx]);
                    } else {
                        *slot = ExtDist::finite(tree.depth[x]);
                    }
                }
            }
        }
        (work, traversals)
    });

    for (work, traversals) in filled {
        metrics.work += work;
        metrics.traversals += traversals;
    }

    metrics.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut all_metrics = vec![metrics];
    all_metrics.extend(out_s.metrics);
    all_metrics.extend(out_t.metrics);
    Ok(CallOutput {
        answers,
        metrics: all_metrics,
    })
}

/// Rank of a tree edge (child endpoint `v`, parent ids) among all child
/// edges ordered by local id, skipping the root.
fn local_edge_rank(to_local: &[u32], v: u32, local_root: u32) -> usize {
    let lv = to_local[v as usize];
    if lv < local_root {
        lv as usize
    } else {
        lv as usize - 1
    }
}
