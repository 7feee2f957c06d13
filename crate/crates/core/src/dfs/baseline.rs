//! Unmodified depth-first search on `G_p`, for comparison: no blocks, no
//! safe vertices, no rollback. Reports the longest active path it ever held.

use alloc::vec;
use alloc::vec::Vec;

use rand::distr::{Bernoulli, Distribution};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::rng::{self, Purpose};

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaselinePath {
    /// The realizing path, bottom of the stack first.
    pub vertices: Vec<Vertex>,
}

impl BaselinePath {
    /// Length in edges.
    pub fn length(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

/// Plain search over `G_p` with each edge drawn from its own keyed stream.
pub fn baseline_dfs_path(g: &Graph, p: f64, seed: u64) -> Result<BaselinePath> {
    let keep = Bernoulli::new(p).map_err(|_| Error::Probability(p))?;
    let n = g.vertex_count();
    let mut visited = vec![false; n];
    let mut cursor = vec![0usize; n];
    let mut stack: Vec<Vertex> = Vec::new();
    let mut best: Vec<Vertex> = Vec::new();
    let mut next = 0;
    loop {
        let Some(&head) = stack.last() else {
            while next < n && visited[next] {
                next += 1;
            }
            if next == n {
                break;
            }
            visited[next] = true;
            stack.push(next);
            continue;
        };
        let nbrs = g.neighbors(head);
        let mut advanced = false;
        while cursor[head] < nbrs.len() {
            let u = nbrs[cursor[head]];
            cursor[head] += 1;
            if visited[u] {
                continue;
            }
            let slot = g.edge_slot(head, u).expect("neighbour edge");
            let mut rng = rng::stream(seed, Purpose::Baseline, slot as u64);
            if keep.sample(&mut rng) {
                visited[u] = true;
                stack.push(u);
                advanced = true;
                break;
            }
        }
        if !advanced {
            // a local maximum of the stack is the only place a new best appears
            if stack.len() > best.len() {
                best.clone_from(&stack);
            }
            stack.pop();
        }
    }
    Ok(BaselinePath { vertices: best })
}
