//! Seeded test-bed graphs. All generators are pure functions of their
//! arguments and emit canonical vertex ids.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::rng::{self, Purpose};

/// Restarts allowed before [`random_regular`] gives up.
pub const REGULAR_RETRY_BUDGET: usize = 200;

pub fn complete(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Input("complete graph needs at least one vertex"));
    }
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// `K_{a,b}` with side one on `0..a` and side two on `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph> {
    if a == 0 || b == 0 {
        return Err(Error::Input("bipartite sides must be non-empty"));
    }
    Graph::from_edges(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))))
}

/// The cycle `0 - 1 - ... - (n-1) - 0`.
pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Input("a cycle needs at least three vertices"));
    }
    Graph::from_edges(n, (0..n).map(|u| (u, (u + 1) % n)))
}

pub fn path(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Input("path needs at least one vertex"));
    }
    Graph::from_edges(n, (1..n).map(|u| (u - 1, u)))
}

/// `G(n, q)`: each of the `n(n-1)/2` pairs independently with probability `q`.
pub fn erdos_renyi(n: usize, q: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Probability(q));
    }
    let mut rng = rng::stream(seed, Purpose::Generator, 1);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < q {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Uniform-ish simple `r`-regular graph from the pairing model.
///
/// Points are paired one random pair at a time; a pair that would create a
/// loop or a repeated edge is rejected and redrawn. When rejections pile up
/// the remaining points are scanned for any admissible pair, and if none is
/// left the whole pairing restarts, up to [`REGULAR_RETRY_BUDGET`] times.
pub fn random_regular(n: usize, r: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Input("regular graph needs at least one vertex"));
    }
    if r >= n || (n * r) % 2 == 1 {
        return Err(Error::Input("no simple r-regular graph: need r < n and n*r even"));
    }
    let mut rng = rng::stream(seed, Purpose::Generator, 0);
    for _ in 0..REGULAR_RETRY_BUDGET {
        if let Some(adj) = try_pairing(n, r, &mut rng) {
            let edges = adj
                .iter()
                .enumerate()
                .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)));
            return Graph::from_edges(n, edges);
        }
    }
    Err(Error::GenerationFailed {
        attempts: REGULAR_RETRY_BUDGET,
    })
}

fn try_pairing<R: Rng>(n: usize, r: usize, rng: &mut R) -> Option<Vec<Vec<Vertex>>> {
    let mut points: Vec<Vertex> = (0..n).flat_map(|v| core::iter::repeat_n(v, r)).collect();
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::with_capacity(r); n];
    let mut rejections = 0usize;
    while !points.is_empty() {
        let len = points.len();
        let i = rng.random_range(0..len);
        let j = rng.random_range(0..len);
        let (u, v) = (points[i], points[j]);
        if i != j && u != v && !adj[u].contains(&v) {
            adj[u].push(v);
            adj[v].push(u);
            let (hi, lo) = if i > j { (i, j) } else { (j, i) };
            points.swap_remove(hi);
            points.swap_remove(lo);
            rejections = 0;
            continue;
        }
        rejections += 1;
        if rejections < 64 {
            continue;
        }
        let mut distinct = points.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() > 512 {
            if rejections > 100_000 {
                return None;
            }
            continue;
        }
        let admissible: Vec<(Vertex, Vertex)> = distinct
            .iter()
            .enumerate()
            .flat_map(|(a, &x)| distinct[a + 1..].iter().map(move |&y| (x, y)))
            .filter(|&(x, y)| !adj[x].contains(&y))
            .collect();
        if admissible.is_empty() {
            return None;
        }
        let (x, y) = admissible[rng.random_range(0..admissible.len())];
        adj[x].push(y);
        adj[y].push(x);
        for w in [x, y] {
            let at = points.iter().position(|&p| p == w).expect("point present");
            points.swap_remove(at);
        }
        rejections = 0;
    }
    Some(adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_families() {
        let k3 = complete(3).unwrap();
        assert_eq!(k3.edge_count(), 3);
        let star = complete_bipartite(1, 3).unwrap();
        assert_eq!(star.edge_count(), 3);
        assert_eq!(star.degree(0), 3);
        let k24 = complete_bipartite(2, 4).unwrap();
        assert_eq!(k24.edge_count(), 8);
        assert!(k24.edges().all(|(u, v)| (u < 2) != (v < 2)));
        assert!(complete(0).is_err());
        assert!(complete_bipartite(0, 3).is_err());
    }

    #[test]
    fn regular_k4_is_unique() {
        for seed in 0..5 {
            assert_eq!(random_regular(4, 3, seed).unwrap(), complete(4).unwrap());
        }
    }

    #[test]
    fn two_regular_is_union_of_cycles() {
        for seed in 0..10 {
            let g = random_regular(6, 2, seed).unwrap();
            assert!((0..6).all(|v| g.degree(v) == 2));
            // every component of a 2-regular graph is a cycle; check coverage
            let mut seen = [false; 6];
            let mut covered = 0;
            for s in 0..6 {
                if seen[s] {
                    continue;
                }
                let (mut prev, mut cur, mut len) = (s, g.neighbors(s)[0], 1);
                seen[s] = true;
                while cur != s {
                    seen[cur] = true;
                    let next = *g.neighbors(cur).iter().find(|&&w| w != prev).unwrap();
                    prev = cur;
                    cur = next;
                    len += 1;
                }
                assert!(len >= 3);
                covered += len;
            }
            assert_eq!(covered, 6);
        }
    }

    #[test]
    fn regular_is_deterministic() {
        let a = random_regular(100, 10, 7).unwrap();
        let b = random_regular(100, 10, 7).unwrap();
        assert_eq!(a, b);
        assert!((0..100).all(|v| a.degree(v) == 10));
        assert_ne!(a, random_regular(100, 10, 8).unwrap());
    }

    #[test]
    fn regular_rejects_infeasible() {
        assert!(random_regular(5, 3, 0).is_err());
        assert!(random_regular(4, 4, 0).is_err());
        assert_eq!(random_regular(5, 0, 0).unwrap().edge_count(), 0);
    }

    #[test]
    fn dense_regular_completes() {
        let g = random_regular(2000, 20, 1).unwrap();
        assert!((0..2000).all(|v| g.degree(v) == 20));
        let g = random_regular(12, 9, 3).unwrap();
        assert!((0..12).all(|v| g.degree(v) == 9));
    }
}
