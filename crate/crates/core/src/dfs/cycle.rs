//! Long edges and the cycles they close.

use alloc::vec::Vec;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::graph::{ForestIndex, Graph, Vertex};
use crate::percolation::EdgeOracle;

use super::DfsRun;

/// An ambient edge `xy` whose endpoints are `rho` apart in the search forest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LongEdge {
    pub x: Vertex,
    pub y: Vertex,
    pub rho: usize,
}

/// Forest distance between `x` and `y` in the run's final forest; `None`
/// stands for infinity (different trees).
///
/// Forest edges are never removed, so the first path joining two vertices
/// stays their unique path for the rest of the run and the final forest gives
/// the same value as the minimum over all times.
pub fn rho(run: &DfsRun, x: Vertex, y: Vertex) -> Result<Option<usize>> {
    let forest = run.forest()?;
    Ok(forest.path(x, y).map(|p| p.len() - 1))
}

/// Edges of `g` at finite forest distance at least `alpha k d`, sorted by
/// decreasing distance and then by endpoints.
///
/// Forest edges themselves (distance 1) never qualify: closing one gives back
/// the same edge, not a cycle.
pub fn collect_long_edges(run: &DfsRun, g: &Graph, cfg: &ExperimentConfig) -> Result<Vec<LongEdge>> {
    let forest = run.forest()?;
    let index = ForestIndex::new(&forest);
    let threshold = cfg.long_threshold();
    let mut out: Vec<LongEdge> = g
        .edges()
        .filter_map(|(x, y)| {
            let rho = index.distance(x, y)?;
            (rho >= 2 && rho as f64 >= threshold).then_some(LongEdge { x, y, rho })
        })
        .collect();
    out.sort_unstable_by(|a, b| b.rho.cmp(&a.rho).then((a.x, a.y).cmp(&(b.x, b.y))));
    Ok(out)
}

/// The first long edge (in the order of `long_edges`) present in `G_p`,
/// closed into a cycle: the forest path from `x` to `y`, with the edge `yx`
/// implied. Its length in edges equals the path's vertex count, `rho + 1`.
pub fn extract_cycle(
    run: &DfsRun,
    long_edges: &[LongEdge],
    oracle: &mut EdgeOracle<'_>,
) -> Result<Option<Vec<Vertex>>> {
    if long_edges.is_empty() {
        return Ok(None);
    }
    let forest = run.forest()?;
    for e in long_edges {
        if !oracle.present(e.x, e.y)? {
            continue;
        }
        let path = forest
            .path(e.x, e.y)
            .ok_or(Error::State("long edge endpoints lie in different trees"))?;
        validate_cycle(&path, oracle)?;
        return Ok(Some(path));
    }
    Ok(None)
}

/// Checks that `cycle` is a simple cycle of length at least 3 all of whose
/// edges, including the closing one, are already revealed present.
pub fn validate_cycle(cycle: &[Vertex], oracle: &EdgeOracle<'_>) -> Result<()> {
    if cycle.len() < 3 {
        return Err(Error::State("cycle shorter than three vertices"));
    }
    let mut sorted = cycle.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::State("cycle repeats a vertex"));
    }
    let closing = (cycle[cycle.len() - 1], cycle[0]);
    for (u, v) in cycle.windows(2).map(|w| (w[0], w[1])).chain(core::iter::once(closing)) {
        if oracle.known_present(u, v) != Some(true) {
            return Err(Error::InvalidCycle(u, v));
        }
    }
    Ok(())
}
