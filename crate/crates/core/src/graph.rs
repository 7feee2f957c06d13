//! Static undirected graphs and rooted forests over their vertex sets.
//!
//! Vertex ids are `0..n` and the id order is the total order every search in
//! this crate uses. Neighbor lists are strictly increasing.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub type Vertex = usize;

/// Immutable simple undirected graph in compressed adjacency form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<Vertex>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, repeated edges
    /// (in either orientation) and out-of-range ids.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adjacency: Vec<Vec<Vertex>> = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Ok(Graph { offsets, targets })
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn average_degree(&self) -> f64 {
        match self.vertex_count() {
            0 => 0.0,
            n => self.targets.len() as f64 / n as f64,
        }
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edge_slot(u, v).is_some()
    }

    /// Stable id of the edge `{u, v}`: the position of the larger endpoint in
    /// the smaller endpoint's neighbor list, offset into the adjacency array.
    /// Ids are unique per edge and lie in `0..edge_slots()`.
    pub fn edge_slot(&self, u: Vertex, v: Vertex) -> Option<usize> {
        let n = self.vertex_count();
        if u >= n || v >= n {
            return None;
        }
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        self.neighbors(lo)
            .binary_search(&hi)
            .ok()
            .map(|i| self.offsets[lo] + i)
    }

    /// Upper bound (exclusive) on values returned by [`Graph::edge_slot`].
    pub fn edge_slots(&self) -> usize {
        self.targets.len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub(crate) fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.vertex_count(),
            })
        }
    }
}

/// `N(S)`: vertices outside `s` adjacent to some vertex of `s`, sorted.
pub fn neighborhood_of_set(g: &Graph, s: &[Vertex]) -> Result<Vec<Vertex>> {
    let n = g.vertex_count();
    let mut in_set = vec![false; n];
    for &v in s {
        g.check_vertex(v)?;
        in_set[v] = true;
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for &v in s {
        for &u in g.neighbors(v) {
            if !in_set[u] && !seen[u] {
                seen[u] = true;
                out.push(u);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Reusable scratch for repeated `|N(S)|` evaluation on one graph.
pub(crate) struct NeighborhoodCounter {
    in_set: Vec<u32>,
    seen: Vec<u32>,
    epoch: u32,
}

impl NeighborhoodCounter {
    pub(crate) fn new(n: usize) -> Self {
        NeighborhoodCounter {
            in_set: vec![0; n],
            seen: vec![0; n],
            epoch: 0,
        }
    }

    pub(crate) fn count(&mut self, g: &Graph, s: &[Vertex]) -> usize {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.in_set.fill(0);
            self.seen.fill(0);
            self.epoch = 1;
        }
        let e = self.epoch;
        for &v in s {
            self.in_set[v] = e;
        }
        let mut count = 0;
        for &v in s {
            for &u in g.neighbors(v) {
                if self.in_set[u] != e && self.seen[u] != e {
                    self.seen[u] = e;
                    count += 1;
                }
            }
        }
        count
    }
}

/// Rooted forest on `0..n` given by parent pointers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    parent: Vec<Option<Vertex>>,
    children: Vec<Vec<Vertex>>,
}

impl Forest {
    pub fn new(n: usize) -> Self {
        Forest {
            parent: vec![None; n],
            children: vec![Vec::new(); n],
        }
    }

    /// Rebuilds a forest from parent pointers, rejecting loops.
    pub fn from_parents(parent: Vec<Option<Vertex>>) -> Result<Self> {
        let n = parent.len();
        if let Some(v) = find_parent_cycle(&parent)? {
            return Err(Error::ForestCycle(v));
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                children[p].push(v);
            }
        }
        Ok(Forest { parent, children })
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    #[inline]
    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v]
    }

    #[inline]
    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.children[v]
    }

    pub fn parents(&self) -> &[Option<Vertex>] {
        &self.parent
    }

    /// Attaches the root `child` below `parent`.
    pub(crate) fn link(&mut self, child: Vertex, parent: Vertex) {
        debug_assert!(self.parent[child].is_none());
        self.parent[child] = Some(parent);
        self.children[parent].push(child);
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }

    /// Edges as `(child, parent)`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v, p)))
    }

    pub fn contains_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.parent[u] == Some(v) || self.parent[v] == Some(u)
    }

    pub fn depth(&self, mut v: Vertex) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent[v] {
            v = p;
            d += 1;
        }
        d
    }

    /// The unique `x`–`y` path as a vertex sequence from `x` to `y`, or `None`
    /// when they lie in different trees. Its length in edges is `len() - 1`.
    pub fn path(&self, x: Vertex, y: Vertex) -> Option<Vec<Vertex>> {
        let n = self.vertex_count();
        if x >= n || y >= n {
            return None;
        }
        let (mut a, mut b) = (x, y);
        let (mut da, mut db) = (self.depth(a), self.depth(b));
        let mut up = Vec::new();
        let mut down = Vec::new();
        while da > db {
            up.push(a);
            a = self.parent[a]?;
            da -= 1;
        }
        while db > da {
            down.push(b);
            b = self.parent[b]?;
            db -= 1;
        }
        while a != b {
            up.push(a);
            down.push(b);
            a = self.parent[a]?;
            b = self.parent[b]?;
        }
        up.push(a);
        up.extend(down.into_iter().rev());
        Some(up)
    }
}

/// Free-function form of [`Forest::path`].
pub fn forest_path(f: &Forest, x: Vertex, y: Vertex) -> Option<Vec<Vertex>> {
    f.path(x, y)
}

/// Returns a vertex on a parent-pointer loop, if any. Out-of-range parents
/// are an error.
pub(crate) fn find_parent_cycle(parent: &[Option<Vertex>]) -> Result<Option<Vertex>> {
    let n = parent.len();
    // 0 = unvisited, 1 = on current walk, 2 = known to reach a root
    let mut color = vec![0u8; n];
    let mut walk = Vec::new();
    for start in 0..n {
        let mut v = start;
        while color[v] == 0 {
            color[v] = 1;
            walk.push(v);
            match parent[v] {
                Some(p) if p >= n => return Err(Error::VertexOutOfRange { vertex: p, n }),
                Some(p) => v = p,
                None => break,
            }
        }
        if color[v] == 1 && parent[v].is_some() {
            return Ok(Some(v));
        }
        for &w in &walk {
            color[w] = 2;
        }
        walk.clear();
    }
    Ok(None)
}

/// Constant-time-ish forest distances via binary lifting. Built once per
/// final forest and then queried for every ambient edge.
pub struct ForestIndex {
    depth: Vec<usize>,
    root: Vec<Vertex>,
    up: Vec<Vec<Vertex>>,
}

impl ForestIndex {
    pub fn new(f: &Forest) -> Self {
        let n = f.vertex_count();
        let mut depth = vec![0; n];
        let mut root = (0..n).collect::<Vec<_>>();
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<Vertex> = (0..n).filter(|&v| f.parent(v).is_none()).collect();
        while let Some(v) = stack.pop() {
            order.push(v);
            for &c in f.children(v) {
                depth[c] = depth[v] + 1;
                root[c] = root[v];
                stack.push(c);
            }
        }
        let max_depth: usize = depth.iter().copied().max().unwrap_or(0);
        let levels = (usize::BITS - max_depth.leading_zeros()).max(1) as usize;
        let mut up = Vec::with_capacity(levels);
        up.push((0..n).map(|v| f.parent(v).unwrap_or(v)).collect::<Vec<_>>());
        for l in 1..levels {
            let prev = &up[l - 1];
            let next = (0..n).map(|v| prev[prev[v]]).collect();
            up.push(next);
        }
        ForestIndex { depth, root, up }
    }

    fn lift(&self, mut v: Vertex, mut by: usize) -> Vertex {
        let mut l = 0;
        while by > 0 {
            if by & 1 == 1 {
                v = self.up[l][v];
            }
            by >>= 1;
            l += 1;
        }
        v
    }

    /// Path length in edges, `None` for different trees.
    pub fn distance(&self, x: Vertex, y: Vertex) -> Option<usize> {
        if self.root[x] != self.root[y] {
            return None;
        }
        let (dx, dy) = (self.depth[x], self.depth[y]);
        let (mut a, mut b) = if dx >= dy {
            (self.lift(x, dx - dy), y)
        } else {
            (x, self.lift(y, dy - dx))
        };
        if a != b {
            for l in (0..self.up.len()).rev() {
                if self.up[l][a] != self.up[l][b] {
                    a = self.up[l][a];
                    b = self.up[l][b];
                }
            }
            a = self.up[0][a];
        }
        Some(dx + dy - 2 * self.depth[a])
    }

    pub fn depth(&self, v: Vertex) -> usize {
        self.depth[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn complete(n: usize) -> Graph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).unwrap()
    }

    fn cycle5() -> Graph {
        Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap()
    }

    #[test]
    fn neighborhood_examples() {
        assert_eq!(neighborhood_of_set(&complete(4), &[0]).unwrap(), vec![1, 2, 3]);
        let all: Vec<_> = (0..4).collect();
        assert!(neighborhood_of_set(&complete(4), &all).unwrap().is_empty());
        assert_eq!(neighborhood_of_set(&cycle5(), &[0, 1]).unwrap(), vec![2, 4]);
        assert_eq!(
            neighborhood_of_set(&cycle5(), &[7]),
            Err(Error::VertexOutOfRange { vertex: 7, n: 5 })
        );
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(Graph::from_edges(2, [(0, 0)]), Err(Error::SelfLoop(0)));
        assert_eq!(
            Graph::from_edges(3, [(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        );
        assert!(matches!(
            Graph::from_edges(2, [(0, 2)]),
            Err(Error::VertexOutOfRange { vertex: 2, .. })
        ));
    }

    #[test]
    fn edge_slots_are_unique() {
        let g = complete(6);
        let mut slots: Vec<_> = g.edges().map(|(u, v)| g.edge_slot(v, u).unwrap()).collect();
        slots.sort_unstable();
        slots.dedup();
        assert_eq!(slots.len(), g.edge_count());
        assert!(slots.iter().all(|&s| s < g.edge_slots()));
        assert_eq!(g.edge_slot(0, 0), None);
    }

    #[test]
    fn forest_path_examples() {
        let mut f = Forest::new(6);
        assert_eq!(f.path(3, 3), Some(vec![3]));
        f.link(1, 0);
        assert_eq!(f.path(0, 1), Some(vec![0, 1]));
        f.link(3, 2);
        assert_eq!(f.path(0, 3), None);
        f.link(4, 1);
        f.link(5, 1);
        assert_eq!(f.path(4, 5), Some(vec![4, 1, 5]));
        assert_eq!(f.path(4, 0), Some(vec![4, 1, 0]));
    }

    #[test]
    fn from_parents_rejects_loops() {
        assert_eq!(
            Forest::from_parents(vec![Some(1), Some(0), None]).unwrap_err(),
            Error::ForestCycle(0)
        );
        assert!(Forest::from_parents(vec![None, Some(0), Some(1)]).is_ok());
        assert!(Forest::from_parents(vec![Some(0)]).is_err());
    }

    fn brute_neighborhood_size(g: &Graph, mask: u32) -> usize {
        let n = g.vertex_count();
        let mut out = 0u32;
        for (u, v) in g.edges() {
            let (iu, iv) = (mask >> u & 1 == 1, mask >> v & 1 == 1);
            if iu && !iv {
                out |= 1 << v;
            }
            if iv && !iu {
                out |= 1 << u;
            }
        }
        debug_assert!(n <= 32);
        out.count_ones() as usize
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
                let mut edges = Vec::new();
                let mut i = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if bits[i] {
                            edges.push((u, v));
                        }
                        i += 1;
                    }
                }
                Graph::from_edges(n, edges).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn neighborhood_matches_edge_scan_on_every_subset(g in arb_graph(10)) {
            let n = g.vertex_count();
            let mut counter = NeighborhoodCounter::new(n);
            for mask in 0u32..(1 << n) {
                let s: Vec<_> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                let nbhd = neighborhood_of_set(&g, &s).unwrap();
                prop_assert!(nbhd.iter().all(|v| !s.contains(v)));
                let brute = brute_neighborhood_size(&g, mask);
                prop_assert_eq!(nbhd.len(), brute);
                prop_assert_eq!(counter.count(&g, &s), brute);
            }
        }

        #[test]
        fn forest_paths_walk_forest_edges(parents in proptest::collection::vec(any::<prop::sample::Index>(), 1..40), roots in any::<u64>()) {
            // parent of v is some u < v, or none
            let n = parents.len();
            let parent: Vec<Option<Vertex>> = (0..n)
                .map(|v| if v == 0 || roots >> (v % 64) & 1 == 1 { None } else { Some(parents[v].index(v)) })
                .collect();
            let f = Forest::from_parents(parent).unwrap();
            let idx = ForestIndex::new(&f);
            for x in 0..n {
                for y in 0..n {
                    let p = f.path(x, y);
                    prop_assert_eq!(p.as_ref().map(|p| p.len() - 1), idx.distance(x, y));
                    if let Some(p) = p {
                        prop_assert_eq!(p[0], x);
                        prop_assert_eq!(*p.last().unwrap(), y);
                        for w in p.windows(2) {
                            prop_assert!(f.contains_edge(w[0], w[1]));
                        }
                        let mut sorted = p.clone();
                        sorted.sort_unstable();
                        sorted.dedup();
                        prop_assert_eq!(sorted.len(), p.len());
                    }
                }
            }
        }
    }
}
