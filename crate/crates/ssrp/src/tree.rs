//! BFS-tree construction, balanced tree separator, LCA index, tree-path
//! utilities.

use crate::graph::{bfs, EdgeSet, Graph, NO_VERTEX};
use crate::{Error, Result};

/// Rooted shortest-path tree over a graph. `depth[v] = d(root, v)` for every
/// vertex; tree edges are identified by their child endpoint.
#[derive(Clone, Debug)]
pub struct BfsTree {
    pub root: u32,
    pub parent: Vec<u32>,
    pub depth: Vec<u32>,
    pub children: Vec<Vec<u32>>,
}

impl BfsTree {
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    /// Tree edges as (parent, child), one per non-root vertex.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.parent.len() as u32)
            .filter(move |&v| v != self.root)
            .map(move |v| (self.parent[v as usize], v))
    }

    pub(crate) fn from_parents(root: u32, parent: Vec<u32>, depth: Vec<u32>) -> BfsTree {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        for v in 0..n as u32 {
            if v != root {
                children[parent[v as usize] as usize].push(v);
            }
        }
        BfsTree {
            root,
            parent,
            depth,
            children,
        }
    }

    /// Subtree sizes, computed without recursion.
    pub fn subtree_sizes(&self) -> Vec<u32> {
        let n = self.n();
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![self.root];
        while let Some(u) = stack.pop() {
            order.push(u);
            stack.extend_from_slice(&self.children[u as usize]);
        }
        let mut size = vec![1u32; n];
        for &u in order.iter().rev() {
            if u != self.root {
                size[self.parent[u as usize] as usize] += size[u as usize];
            }
        }
        size
    }
}

/// Builds the BFS tree of `g` rooted at `root`; every vertex must be
/// reachable. Deterministic given adjacency order.
pub fn build_bfs_tree(g: &Graph, root: u32) -> Result<BfsTree> {
    let b = bfs(g, root, &EdgeSet::empty());
    if let Some(v) = b.dist.iter().position(|d| !d.is_finite()) {
        return Err(Error::Unreachable(v as u32));
    }
    let depth = b
        .dist
        .iter()
        .map(|d| d.value().expect("checked finite"))
        .collect();
    Ok(BfsTree::from_parents(root, b.parent, depth))
}

/// Balanced split of a tree into two edge-disjoint subtrees `S` and `T`
/// meeting only at the separator vertex `t`; the root stays in `S` and `t`
/// roots `T` (possibly `t = root`).
#[derive(Clone, Debug)]
pub struct Separation {
    pub t: u32,
    /// Vertex membership in `V(T)`; `in_t[t]` is true, and `V(S)` is the
    /// complement plus `t`.
    pub in_t: Vec<bool>,
    /// Root-to-t vertex sequence, the path `P` (contained in `S`).
    pub path: Vec<u32>,
}

impl Separation {
    pub fn s_vertices(&self) -> Vec<u32> {
        (0..self.in_t.len() as u32)
            .filter(|&v| !self.in_t[v as usize] || v == self.t)
            .collect()
    }

    pub fn t_vertices(&self) -> Vec<u32> {
        (0..self.in_t.len() as u32)
            .filter(|&v| self.in_t[v as usize])
            .collect()
    }

    /// A tree edge (identified by its child endpoint) belongs to `E(T)`
    /// exactly when the child lies in `V(T) - {t}`.
    #[inline]
    pub fn edge_in_t(&self, child: u32) -> bool {
        self.in_t[child as usize] && child != self.t
    }
}

/// Finds a separator vertex whose split satisfies
/// `floor(n/3) <= |V(S)|, |V(T)| <= ceil(2n/3)` in linear time: descend from
/// the root into the heaviest child while that child's subtree exceeds n/3,
/// then peel child subtrees of the stop vertex into `T` until `S` fits.
/// Ties between equal-weight children break toward the lowest vertex id.
pub fn balanced_separator(tree: &BfsTree) -> Result<Separation> {
    let n = tree.n();
    if n < 3 {
        return Err(Error::TreeTooSmall(n));
    }
    let size = tree.subtree_sizes();
    let n3 = n as u64;

    let mut t = tree.root;
    loop {
        let mut heavy = NO_VERTEX;
        let mut heavy_size = 0u32;
        for &c in &tree.children[t as usize] {
            if size[c as usize] > heavy_size {
                heavy = c;
                heavy_size = size[c as usize];
            }
        }
        if heavy != NO_VERTEX && 3 * heavy_size as u64 > n3 {
            t = heavy;
        } else {
            break;
        }
    }

    // Children of t, heaviest first, ties by lowest id (stable sort over
    // id-sorted lists keeps the lowest id first).
    let mut picks: Vec<u32> = tree.children[t as usize].clone();
    picks.sort_by_key(|&c| std::cmp::Reverse(size[c as usize]));

    let mut in_t = vec![false; n];
    in_t[t as usize] = true;
    let mut sigma = 0u64; // vertices in T besides t
    for &c in &picks {
        if 3 * (n3 - sigma) <= 2 * n3 {
            break;
        }
        sigma += size[c as usize] as u64;
        let mut stack = vec![c];
        while let Some(u) = stack.pop() {
            in_t[u as usize] = true;
            stack.extend_from_slice(&tree.children[u as usize]);
        }
    }

    let mut path = Vec::new();
    let mut v = t;
    loop {
        path.push(v);
        if v == tree.root {
            break;
        }
        v = tree.parent[v as usize];
    }
    path.reverse();

    Ok(Separation { t, in_t, path })
}

/// Constant-time LCA and ancestor queries from an Euler tour with a sparse
/// table over depths.
#[derive(Clone, Debug)]
pub struct LcaIndex {
    first: Vec<u32>,
    tin: Vec<u32>,
    tout: Vec<u32>,
    /// sparse[k][i] = index (into the Euler tour) of the minimum-depth
    /// vertex in tour[i .. i + 2^k].
    sparse: Vec<Vec<u32>>,
    tour: Vec<u32>,
    depth: Vec<u32>,
}

pub fn build_lca(tree: &BfsTree) -> LcaIndex {
    let n = tree.n();
    let mut tour = Vec::with_capacity(2 * n);
    let mut first = vec![u32::MAX; n];
    let mut tin = vec![0u32; n];
    let mut tout = vec![0u32; n];
    let mut clock = 0u32;

    // Iterative Euler tour: (vertex, next-child index).
    let mut stack: Vec<(u32, usize)> = vec![(tree.root, 0)];
    first[tree.root as usize] = 0;
    tin[tree.root as usize] = clock;
    clock += 1;
    tour.push(tree.root);
    while let Some(&mut (u, ref mut ci)) = stack.last_mut() {
        if *ci < tree.children[u as usize].len() {
            let c = tree.children[u as usize][*ci];
            *ci += 1;
            first[c as usize] = tour.len() as u32;
            tin[c as usize] = clock;
            clock += 1;
            tour.push(c);
            stack.push((c, 0));
        } else {
            stack.pop();
            tout[u as usize] = clock;
            clock += 1;
            if let Some(&(p, _)) = stack.last() {
                tour.push(p);
            }
        }
    }

    let len = tour.len();
    let levels = (usize::BITS - len.leading_zeros()) as usize;
    let mut sparse: Vec<Vec<u32>> = Vec::with_capacity(levels);
    sparse.push((0..len as u32).collect());
    let mut k = 1;
    while (1 << k) <= len {
        let half = 1 << (k - 1);
        let prev = &sparse[k - 1];
        let mut row = Vec::with_capacity(len - (1 << k) + 1);
        for i in 0..=len - (1 << k) {
            let a = prev[i];
            let b = prev[i + half];
            row.push(
                if tree.depth[tour[a as usize] as usize] <= tree.depth[tour[b as usize] as usize] {
                    a
                } else {
                    b
                },
            );
        }
        sparse.push(row);
        k += 1;
    }

    LcaIndex {
        first,
        tin,
        tout,
        sparse,
        tour,
        depth: tree.depth.clone(),
    }
}

impl LcaIndex {
    pub fn lca(&self, u: u32, v: u32) -> u32 {
        let (mut a, mut b) = (self.first[u as usize], self.first[v as usize]);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let len = (b - a + 1) as usize;
        let k = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let i = self.sparse[k][a as usize];
        let j = self.sparse[k][b as usize + 1 - (1 << k)];
        let (vi, vj) = (self.tour[i as usize], self.tour[j as usize]);
        if self.depth[vi as usize] <= self.depth[vj as usize] {
            vi
        } else {
            vj
        }
    }

    /// True when `a` is an ancestor of `x` or `a == x`.
    #[inline]
    pub fn is_ancestor(&self, a: u32, x: u32) -> bool {
        self.tin[a as usize] <= self.tin[x as usize]
            && self.tout[x as usize] <= self.tout[a as usize]
    }
}

/// True when the tree edge `e = (u, v)` lies on the root-to-x tree path,
/// i.e. `v` is an ancestor-or-self of `x`.
pub fn on_tree_path(idx: &LcaIndex, tree: &BfsTree, x: u32, e: (u32, u32)) -> Result<bool> {
    let (u, v) = e;
    if v == tree.root || v as usize >= tree.n() || tree.parent[v as usize] != u {
        return Err(Error::NotATreeEdge(u, v));
    }
    Ok(idx.is_ancestor(v, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Graph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path_graph(n: usize) -> Graph {
        Graph::new(n, (1..n as u32).map(|v| (v - 1, v)).collect()).unwrap()
    }

    #[test]
    fn bfs_tree_path() {
        let t = build_bfs_tree(&path_graph(3), 0).unwrap();
        assert_eq!(t.parent, vec![NO_VERTEX, 0, 1]);
        assert_eq!(t.depth, vec![0, 1, 2]);
    }

    #[test]
    fn bfs_tree_shortest_property() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let t = build_bfs_tree(&g, 0).unwrap();
        assert_eq!(t.depth[2], 1);
        assert_eq!(t.parent[2], 0);
    }

    #[test]
    fn bfs_tree_star() {
        let g = Graph::new(5, (1..5).map(|v| (0, v)).collect()).unwrap();
        let t = build_bfs_tree(&g, 0).unwrap();
        assert!(t.depth[1..].iter().all(|&d| d == 1));
    }

    #[test]
    fn bfs_tree_unreachable() {
        let g = Graph::new(3, vec![(0, 1)]).unwrap();
        assert!(matches!(build_bfs_tree(&g, 0), Err(Error::Unreachable(2))));
    }

    fn check_separation(tree: &BfsTree, sep: &Separation) {
        let n = tree.n();
        let s: Vec<u32> = sep.s_vertices();
        let t: Vec<u32> = sep.t_vertices();
        assert_eq!(s.len() + t.len(), n + 1, "V(S) and V(T) overlap only at t");
        assert!(s.contains(&tree.root));
        assert!(s.contains(&sep.t) && t.contains(&sep.t));
        let lo = n / 3;
        let hi = (2 * n).div_ceil(3);
        assert!(
            s.len() >= lo && s.len() <= hi,
            "|S| = {} out of [{lo}, {hi}]",
            s.len()
        );
        assert!(
            t.len() >= lo && t.len() <= hi,
            "|T| = {} out of [{lo}, {hi}]",
            t.len()
        );
        // Edge partition: every tree edge in exactly one side.
        let edge_count_t = tree.edges().filter(|&(_, v)| sep.edge_in_t(v)).count();
        assert_eq!(edge_count_t, t.len() - 1);
        // T is connected under the parent relation with root t.
        for &v in &t {
            if v != sep.t {
                assert!(sep.in_t[tree.parent[v as usize] as usize]);
            }
        }
        // P runs from the root to t inside S.
        assert_eq!(*sep.path.first().unwrap(), tree.root);
        assert_eq!(*sep.path.last().unwrap(), sep.t);
        for &v in &sep.path {
            assert!(!sep.in_t[v as usize] || v == sep.t);
        }
    }

    #[test]
    fn separator_path_nine() {
        // Exhaustive scan over all splits says t sits at depth 3..=5 with
        // both sides in [3, 6].
        let tree = build_bfs_tree(&path_graph(9), 0).unwrap();
        let sep = balanced_separator(&tree).unwrap();
        check_separation(&tree, &sep);
        let d = tree.depth[sep.t as usize];
        assert!((3..=5).contains(&d), "separator depth {d}");
    }

    #[test]
    fn separator_star_six_leaves() {
        let g = Graph::new(7, (1..7).map(|v| (0, v)).collect()).unwrap();
        let tree = build_bfs_tree(&g, 0).unwrap();
        let sep = balanced_separator(&tree).unwrap();
        check_separation(&tree, &sep);
        assert_eq!(sep.t, 0, "star separates at the hub");
        assert_eq!(sep.t_vertices().len(), 4); // hub + 3 leaves
    }

    #[test]
    fn separator_too_small() {
        let tree = build_bfs_tree(&path_graph(2), 0).unwrap();
        assert!(matches!(
            balanced_separator(&tree),
            Err(Error::TreeTooSmall(2))
        ));
    }

    fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> BfsTree {
        let mut parent = vec![NO_VERTEX; n];
        let mut depth = vec![0u32; n];
        for v in 1..n {
            let p = rng.gen_range(0..v) as u32;
            parent[v] = p;
            depth[v] = depth[p as usize] + 1;
        }
        BfsTree::from_parents(0, parent, depth)
    }

    #[test]
    fn separator_random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..300 {
            let n = rng.gen_range(3..200);
            let tree = random_tree(n, &mut rng);
            let sep = balanced_separator(&tree).unwrap();
            check_separation(&tree, &sep);
        }
    }

    #[test]
    fn lca_self_and_path() {
        let tree = build_bfs_tree(&path_graph(5), 0).unwrap();
        let idx = build_lca(&tree);
        assert_eq!(idx.lca(3, 3), 3);
        assert_eq!(idx.lca(4, 2), 2);
        assert_eq!(idx.lca(2, 4), 2);
    }

    #[test]
    fn lca_matches_ancestor_walk() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let n = rng.gen_range(2..64);
            let tree = random_tree(n, &mut rng);
            let idx = build_lca(&tree);
            for u in 0..n as u32 {
                for v in 0..n as u32 {
                    assert_eq!(
                        idx.lca(u, v),
                        naive_lca(&tree, u, v),
                        "lca({u},{v}) in n={n}"
                    );
                }
            }
        }
    }

    fn naive_lca(tree: &BfsTree, mut u: u32, mut v: u32) -> u32 {
        while tree.depth[u as usize] > tree.depth[v as usize] {
            u = tree.parent[u as usize];
        }
        while tree.depth[v as usize] > tree.depth[u as usize] {
            v = tree.parent[v as usize];
        }
        while u != v {
            u = tree.parent[u as usize];
            v = tree.parent[v as usize];
        }
        u
    }

    #[test]
    fn on_tree_path_cases() {
        let tree = build_bfs_tree(&path_graph(3), 0).unwrap();
        let idx = build_lca(&tree);
        assert!(on_tree_path(&idx, &tree, 2, (0, 1)).unwrap());
        assert!(!on_tree_path(&idx, &tree, 1, (1, 2)).unwrap());
        assert!(on_tree_path(&idx, &tree, 1, (0, 1)).unwrap());
        assert!(matches!(
            on_tree_path(&idx, &tree, 1, (2, 0)),
            Err(Error::NotATreeEdge(2, 0))
        ));
    }

    #[test]
    fn on_tree_path_sibling_branch() {
        // 0 -> {1, 2}, 1 -> 3
        let g = Graph::new(4, vec![(0, 1), (0, 2), (1, 3)]).unwrap();
        let tree = build_bfs_tree(&g, 0).unwrap();
        let idx = build_lca(&tree);
        assert!(!on_tree_path(&idx, &tree, 3, (0, 2)).unwrap());
        assert!(on_tree_path(&idx, &tree, 3, (1, 3)).unwrap());
    }

    #[test]
    fn on_tree_path_matches_flood_fill() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..40 {
            let n = rng.gen_range(2..40);
            let tree = random_tree(n, &mut rng);
            let idx = build_lca(&tree);
            for v in 1..n as u32 {
                let e = (tree.parent[v as usize], v);
                // Removing e disconnects exactly subtree(v) from the root.
                let mut cut = vec![false; n];
                let mut stack = vec![v];
                while let Some(u) = stack.pop() {
                    cut[u as usize] = true;
                    stack.extend_from_slice(&tree.children[u as usize]);
                }
                for x in 0..n as u32 {
                    assert_eq!(on_tree_path(&idx, &tree, x, e).unwrap(), cut[x as usize]);
                }
            }
        }
    }
}
