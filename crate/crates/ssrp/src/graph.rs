//! Graph representation and traversals: BFS, Dijkstra over virtual weighted
//! views, reversal, induced subgraphs.
//!
//! Graphs are immutable after construction and safe to share across
//! concurrent traversals; every traversal owns its scratch arrays.

use crate::{Error, Result};

pub const NO_VERTEX: u32 = u32::MAX;

/// Distance in edge units, or infinity. Addition saturates at infinity and
/// infinity compares greater than every finite value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtDist(u32);

impl ExtDist {
    pub const INFINITY: ExtDist = ExtDist(u32::MAX);
    pub const ZERO: ExtDist = ExtDist(0);

    #[inline]
    pub fn finite(v: u32) -> ExtDist {
        debug_assert!(v < u32::MAX);
        ExtDist(v)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0 != u32::MAX
    }

    #[inline]
    pub fn value(self) -> Option<u32> {
        if self.is_finite() {
            Some(self.0)
        } else {
            None
        }
    }

    /// Saturating subtraction; only meaningful when a finite result is
    /// guaranteed by the caller once `self` is finite.
    #[inline]
    pub fn sub_finite(self, rhs: u32) -> ExtDist {
        if self.is_finite() {
            debug_assert!(self.0 >= rhs);
            ExtDist(self.0.saturating_sub(rhs))
        } else {
            ExtDist::INFINITY
        }
    }
}

impl std::ops::Add for ExtDist {
    type Output = ExtDist;
    #[inline]
    fn add(self, rhs: ExtDist) -> ExtDist {
        if self.is_finite() && rhs.is_finite() {
            let v = self.0.checked_add(rhs.0).expect("distance overflow");
            debug_assert!(v < u32::MAX);
            ExtDist(v)
        } else {
            ExtDist::INFINITY
        }
    }
}

impl std::ops::Add<u32> for ExtDist {
    type Output = ExtDist;
    #[inline]
    fn add(self, rhs: u32) -> ExtDist {
        self + ExtDist(rhs)
    }
}

impl std::fmt::Debug for ExtDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{}", v),
            None => write!(f, "inf"),
        }
    }
}

impl std::fmt::Display for ExtDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// Immutable directed unweighted graph in adjacency-array form.
///
/// Vertex ids are `0..n-1`; self-loops and duplicate edges are rejected at
/// construction. Adjacency lists are sorted by target id, so traversal order
/// is deterministic regardless of input edge order.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    out_start: Vec<u32>,
    out_adj: Vec<u32>,
    in_start: Vec<u32>,
    in_adj: Vec<u32>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(u32, u32)>) -> Result<Graph> {
        for &(u, v) in &edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::VertexOutOfRange {
                    id: u.max(v) as u64,
                    n,
                });
            }
            if u == v {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("self-loop at vertex {u}"),
                });
            }
        }
        let mut sorted = edges.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse {
                line: 0,
                msg: "duplicate edge".to_string(),
            });
        }
        Ok(Self::new_unchecked(n, edges))
    }

    /// Caller guarantees simple edges in range.
    pub(crate) fn new_unchecked(n: usize, edges: Vec<(u32, u32)>) -> Graph {
        let (out_start, out_adj) = build_adjacency(n, edges.iter().copied());
        let (in_start, in_adj) = build_adjacency(n, edges.iter().map(|&(u, v)| (v, u)));
        Graph {
            n,
            edges,
            out_start,
            out_adj,
            in_start,
            in_adj,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    #[inline]
    pub fn out_neighbors(&self, u: u32) -> &[u32] {
        &self.out_adj[self.out_start[u as usize] as usize..self.out_start[u as usize + 1] as usize]
    }

    #[inline]
    pub fn in_neighbors(&self, v: u32) -> &[u32] {
        &self.in_adj[self.in_start[v as usize] as usize..self.in_start[v as usize + 1] as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.out_neighbors(u).binary_search(&v).is_ok()
    }

    /// Graph with every edge direction flipped.
    pub fn reverse(&self) -> Graph {
        Graph::new_unchecked(self.n, self.edges.iter().map(|&(u, v)| (v, u)).collect())
    }

    /// Subgraph induced by `keep`, with local ids assigned in ascending
    /// parent-id order. Returns the local graph, the local-to-parent map and
    /// the parent-to-local partial map (`NO_VERTEX` marks dropped vertices).
    pub fn induced_subgraph(&self, keep: &[u32]) -> Result<(Graph, Vec<u32>, Vec<u32>)> {
        if keep.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        let mut to_parent: Vec<u32> = keep.to_vec();
        to_parent.sort_unstable();
        to_parent.dedup();
        let mut to_local = vec![NO_VERTEX; self.n];
        for (local, &p) in to_parent.iter().enumerate() {
            debug_assert!((p as usize) < self.n);
            to_local[p as usize] = local as u32;
        }
        let mut edges = Vec::new();
        for &p in &to_parent {
            let lu = to_local[p as usize];
            for &q in self.out_neighbors(p) {
                let lv = to_local[q as usize];
                if lv != NO_VERTEX {
                    edges.push((lu, lv));
                }
            }
        }
        Ok((
            Graph::new_unchecked(to_parent.len(), edges),
            to_parent,
            to_local,
        ))
    }
}

fn build_adjacency(
    n: usize,
    edges: impl Iterator<Item = (u32, u32)> + Clone,
) -> (Vec<u32>, Vec<u32>) {
    let mut start = vec![0u32; n + 1];
    for (u, _) in edges.clone() {
        start[u as usize + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut adj = vec![0u32; start[n] as usize];
    let mut cursor = start.clone();
    for (u, v) in edges {
        adj[cursor[u as usize] as usize] = v;
        cursor[u as usize] += 1;
    }
    for u in 0..n {
        adj[start[u] as usize..start[u + 1] as usize].sort_unstable();
    }
    (start, adj)
}

/// Set of edges removed from a traversal's view, e.g. `H - e` or `H - P`.
/// A predicate view over the host graph, never a materialized copy.
#[derive(Clone, Debug)]
pub enum EdgeSet {
    Empty,
    Single(u32, u32),
    /// `succ[u] = v` marks the removed edge `(u, v)`; at most one removed
    /// edge per tail vertex, which is all path removal needs.
    PathSucc(Vec<u32>),
}

impl EdgeSet {
    pub fn empty() -> EdgeSet {
        EdgeSet::Empty
    }

    pub fn single(u: u32, v: u32) -> EdgeSet {
        EdgeSet::Single(u, v)
    }

    /// All edges of the path `verts[0] -> verts[1] -> ...`.
    pub fn path(n: usize, verts: &[u32]) -> EdgeSet {
        let mut succ = vec![NO_VERTEX; n];
        for w in verts.windows(2) {
            succ[w[0] as usize] = w[1];
        }
        EdgeSet::PathSucc(succ)
    }

    /// Edges `verts[i] -> verts[i+1]` for `i` in `lo..hi`.
    pub fn path_range(n: usize, verts: &[u32], lo: usize, hi: usize) -> EdgeSet {
        let mut succ = vec![NO_VERTEX; n];
        for i in lo..hi {
            succ[verts[i] as usize] = verts[i + 1];
        }
        EdgeSet::PathSucc(succ)
    }

    #[inline]
    pub fn contains(&self, u: u32, v: u32) -> bool {
        match self {
            EdgeSet::Empty => false,
            EdgeSet::Single(a, b) => *a == u && *b == v,
            EdgeSet::PathSucc(succ) => succ[u as usize] == v,
        }
    }
}

/// Per-vertex weights `w(v) >= d(s, v)`, modeling the virtual graph `H_w`
/// that adds an edge `(s, v)` of weight `w(v)` for every vertex.
#[derive(Clone, Debug)]
pub struct WeightFunction {
    pub source: u32,
    pub weights: Vec<ExtDist>,
}

impl WeightFunction {
    pub fn infinite(source: u32, n: usize) -> WeightFunction {
        WeightFunction {
            source,
            weights: vec![ExtDist::INFINITY; n],
        }
    }

    /// Checks `w(v) >= d(s, v, H)` with one BFS from the source.
    pub fn check_requirement(&self, g: &Graph) -> Result<()> {
        let b = bfs(g, self.source, &EdgeSet::empty());
        for v in 0..g.n() {
            if self.weights[v] < b.dist[v] {
                return Err(Error::WeightRequirement(v as u32));
            }
        }
        Ok(())
    }
}

pub struct BfsResult {
    pub dist: Vec<ExtDist>,
    pub parent: Vec<u32>,
    /// Edges scanned, for work accounting.
    pub work: u64,
}

/// BFS from `src` in `g - forbidden`. Unreachable vertices get infinity.
pub fn bfs(g: &Graph, src: u32, forbidden: &EdgeSet) -> BfsResult {
    let mut dist = vec![ExtDist::INFINITY; g.n()];
    let mut parent = vec![NO_VERTEX; g.n()];
    let mut queue = std::collections::VecDeque::new();
    dist[src as usize] = ExtDist::ZERO;
    queue.push_back(src);
    let mut work = 0u64;
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &v in g.out_neighbors(u) {
            work += 1;
            if forbidden.contains(u, v) {
                continue;
            }
            if !dist[v as usize].is_finite() {
                dist[v as usize] = du + 1;
                parent[v as usize] = u;
                queue.push_back(v);
            }
        }
    }
    BfsResult { dist, parent, work }
}

pub struct DijkstraResult {
    pub dist: Vec<ExtDist>,
    pub work: u64,
}

/// Dijkstra from `w.source` in `H_w - forbidden`, where `H_w` is `g` plus a
/// virtual edge `(s, v)` of weight `w(v)` for every vertex. Virtual edges
/// are never members of `forbidden`; real edges have unit weight.
pub fn dijkstra_weighted_view(
    g: &Graph,
    w: &WeightFunction,
    forbidden: &EdgeSet,
) -> DijkstraResult {
    dijkstra_view(g, w.source, &w.weights, forbidden)
}

pub(crate) fn dijkstra_view(
    g: &Graph,
    source: u32,
    weights: &[ExtDist],
    forbidden: &EdgeSet,
) -> DijkstraResult {
    let mut dist = vec![ExtDist::INFINITY; g.n()];
    let mut heap = std::collections::BinaryHeap::new();
    dist[source as usize] = ExtDist::ZERO;
    heap.push(std::cmp::Reverse((ExtDist::ZERO, source)));
    for v in 0..g.n() {
        let wd = weights[v];
        if wd.is_finite() && wd < dist[v] {
            dist[v] = wd;
            heap.push(std::cmp::Reverse((wd, v as u32)));
        }
    }
    let mut work = 0u64;
    while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        for &v in g.out_neighbors(u) {
            work += 1;
            if forbidden.contains(u, v) {
                continue;
            }
            let nd = d + 1;
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                heap.push(std::cmp::Reverse((nd, v)));
            }
        }
    }
    DijkstraResult { dist, work }
}

/// Parses the edge-list format: lines starting `#` ignored, first data line
/// `<n> <m>`, then exactly `m` lines `<u> <v>`.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut data_lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line_no, header) = data_lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "missing header line".to_string(),
    })?;
    let mut it = header.split_whitespace();
    let n: usize = parse_field(it.next(), line_no, "n")?;
    let m: usize = parse_field(it.next(), line_no, "m")?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line: line_no,
            msg: "trailing tokens after header".to_string(),
        });
    }

    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    for _ in 0..m {
        let (line_no, line) = data_lines.next().ok_or(Error::Parse {
            line: 0,
            msg: format!("expected {m} edges, input ended early"),
        })?;
        let mut it = line.split_whitespace();
        let u: u64 = parse_field(it.next(), line_no, "u")?;
        let v: u64 = parse_field(it.next(), line_no, "v")?;
        if it.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                msg: "trailing tokens after edge".to_string(),
            });
        }
        if u >= n as u64 || v >= n as u64 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("vertex id out of range (n = {n})"),
            });
        }
        if u == v {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("self-loop at vertex {u}"),
            });
        }
        if !seen.insert((u as u32, v as u32)) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate edge ({u}, {v})"),
            });
        }
        edges.push((u as u32, v as u32));
    }
    if let Some((line_no, _)) = data_lines.next() {
        return Err(Error::Parse {
            line: line_no,
            msg: "unexpected data after edge list".to_string(),
        });
    }
    Ok(Graph::new_unchecked(n, edges))
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or(Error::Parse {
        line,
        msg: format!("missing field {what}"),
    })?
    .parse()
    .map_err(|_| Error::Parse {
        line,
        msg: format!("malformed field {what}"),
    })
}

/// Serializes in the same edge-list format `parse_graph` accepts.
pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", g.n(), g.m()));
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
