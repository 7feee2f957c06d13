//! Two-layer lazy edge exposure.
//!
//! The percolated graph `G_p` is the union of two independent layers: layer
//! one with probability `p1`, revealed by the search one query at a time, and
//! layer two with probability `p2`, revealed only when sprinkling. With
//! `1 - p = (1 - p1)(1 - p2)` every edge is present in the union with
//! probability exactly `p`.

use alloc::vec;
use alloc::vec::Vec;

use rand::distr::{Bernoulli, Distribution};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::rng::{self, Purpose};

/// `(p, p1, p2)` with `1 - p = (1 - p1)(1 - p2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SprinklingSplit {
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
}

fn check_probability(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Probability(x))
    }
}

/// Splits `p` into a search layer and a sprinkling layer carrying `p2`.
///
/// At `p = 1` the search layer is taken to be certain (`p1 = 1`) for any
/// `p2`; the identity holds trivially there.
pub fn split_probability(p: f64, p2: f64) -> Result<SprinklingSplit> {
    check_probability(p)?;
    check_probability(p2)?;
    if p2 > p {
        return Err(Error::InfeasibleSplit { p, p2 });
    }
    let p1 = if p == 1.0 { 1.0 } else { (p - p2) / (1.0 - p2) };
    Ok(SprinklingSplit {
        p,
        p1: p1.clamp(0.0, p),
        p2,
    })
}

impl SprinklingSplit {
    /// `|(1 - p1)(1 - p2) - (1 - p)|`.
    pub fn identity_residual(&self) -> f64 {
        ((1.0 - self.p1) * (1.0 - self.p2) - (1.0 - self.p)).abs()
    }
}

/// Where a layer-one value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RevealOrigin {
    /// A search query charged to the given block (1-based).
    Block(usize),
    /// Revealed after the search, for an edge it never queried.
    Late,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Reveal {
    pub u: Vertex,
    pub v: Vertex,
    pub present: bool,
    pub origin: RevealOrigin,
}

const UNKNOWN: u8 = 0;
const NEG_SEARCH: u8 = 1;
const POS_SEARCH: u8 = 2;
const NEG_LATE: u8 = 3;
const POS_LATE: u8 = 4;

/// Per-trial memoized edge oracle over an ambient graph.
pub struct EdgeOracle<'g> {
    graph: &'g Graph,
    split: SprinklingSplit,
    seed: u64,
    layer1_dist: Bernoulli,
    layer2_dist: Bernoulli,
    layer1: Vec<u8>,
    layer2: Vec<u8>,
    block_stream: Option<(usize, ChaCha8Rng)>,
    consumed: Vec<usize>,
    layer1_log: Vec<Reveal>,
    layer2_log: Vec<Reveal>,
}

impl<'g> EdgeOracle<'g> {
    pub fn new(graph: &'g Graph, split: SprinklingSplit, seed: u64) -> Result<Self> {
        let layer1_dist = Bernoulli::new(split.p1).map_err(|_| Error::Probability(split.p1))?;
        let layer2_dist = Bernoulli::new(split.p2).map_err(|_| Error::Probability(split.p2))?;
        Ok(EdgeOracle {
            graph,
            split,
            seed,
            layer1_dist,
            layer2_dist,
            layer1: vec![UNKNOWN; graph.edge_slots()],
            layer2: vec![UNKNOWN; graph.edge_slots()],
            block_stream: None,
            consumed: Vec::new(),
            layer1_log: Vec::new(),
            layer2_log: Vec::new(),
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn split(&self) -> SprinklingSplit {
        self.split
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn slot(&self, u: Vertex, v: Vertex) -> Result<usize> {
        self.graph.edge_slot(u, v).ok_or(Error::NotAnEdge(u, v))
    }

    /// Layer-one query on behalf of block `block` (1-based). A fresh edge
    /// consumes the next draw `X_{block, j}`; a memoized edge consumes nothing.
    pub fn query_layer1(&mut self, u: Vertex, v: Vertex, block: usize) -> Result<bool> {
        let slot = self.slot(u, v)?;
        if let Some(known) = decode(self.layer1[slot]) {
            return Ok(known);
        }
        if block == 0 {
            return Err(Error::Input("block indices start at 1"));
        }
        let present = self.draw_block(block);
        self.layer1[slot] = if present { POS_SEARCH } else { NEG_SEARCH };
        self.layer1_log.push(Reveal {
            u: u.min(v),
            v: u.max(v),
            present,
            origin: RevealOrigin::Block(block),
        });
        Ok(present)
    }

    fn draw_block(&mut self, block: usize) -> bool {
        if self.consumed.len() <= block {
            self.consumed.resize(block + 1, 0);
        }
        let stale = !matches!(self.block_stream, Some((b, _)) if b == block);
        if stale {
            let mut rng = rng::stream(self.seed, Purpose::BlockQueries, block as u64);
            for _ in 0..self.consumed[block] {
                self.layer1_dist.sample(&mut rng);
            }
            self.block_stream = Some((block, rng));
        }
        let (_, rng) = self.block_stream.as_mut().expect("stream installed above");
        self.consumed[block] += 1;
        self.layer1_dist.sample(rng)
    }

    /// Layer-one value of an edge, revealing it from its own per-edge stream
    /// when the search never queried it.
    pub fn reveal_layer1(&mut self, u: Vertex, v: Vertex) -> Result<bool> {
        let slot = self.slot(u, v)?;
        if let Some(known) = decode(self.layer1[slot]) {
            return Ok(known);
        }
        let mut rng = rng::stream(self.seed, Purpose::LateReveal, slot as u64);
        let present = self.layer1_dist.sample(&mut rng);
        self.layer1[slot] = if present { POS_LATE } else { NEG_LATE };
        self.layer1_log.push(Reveal {
            u: u.min(v),
            v: u.max(v),
            present,
            origin: RevealOrigin::Late,
        });
        Ok(present)
    }

    /// Layer-two (sprinkling) value of an edge, memoized.
    pub fn query_layer2(&mut self, u: Vertex, v: Vertex) -> Result<bool> {
        let slot = self.slot(u, v)?;
        if let Some(known) = decode(self.layer2[slot]) {
            return Ok(known);
        }
        let mut rng = rng::stream(self.seed, Purpose::Sprinkle, slot as u64);
        let present = self.layer2_dist.sample(&mut rng);
        self.layer2[slot] = if present { POS_SEARCH } else { NEG_SEARCH };
        self.layer2_log.push(Reveal {
            u: u.min(v),
            v: u.max(v),
            present,
            origin: RevealOrigin::Late,
        });
        Ok(present)
    }

    /// Presence in `G_p`: layer one or layer two, revealing as needed.
    pub fn present(&mut self, u: Vertex, v: Vertex) -> Result<bool> {
        Ok(self.reveal_layer1(u, v)? || self.query_layer2(u, v)?)
    }

    pub fn layer1_memo(&self, u: Vertex, v: Vertex) -> Option<bool> {
        self.graph
            .edge_slot(u, v)
            .and_then(|s| decode(self.layer1[s]))
    }

    /// Layer-one value only if it came from a search query.
    pub fn search_memo(&self, u: Vertex, v: Vertex) -> Option<bool> {
        match self.graph.edge_slot(u, v).map(|s| self.layer1[s]) {
            Some(NEG_SEARCH) => Some(false),
            Some(POS_SEARCH) => Some(true),
            _ => None,
        }
    }

    pub fn layer2_memo(&self, u: Vertex, v: Vertex) -> Option<bool> {
        self.graph
            .edge_slot(u, v)
            .and_then(|s| decode(self.layer2[s]))
    }

    /// Presence in `G_p` as far as already revealed; `None` if undecided.
    pub fn known_present(&self, u: Vertex, v: Vertex) -> Option<bool> {
        match (self.layer1_memo(u, v), self.layer2_memo(u, v)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        }
    }

    /// Draws consumed so far from block `block`'s query stream.
    pub fn consumed(&self, block: usize) -> usize {
        self.consumed.get(block).copied().unwrap_or(0)
    }

    pub fn total_consumed(&self) -> usize {
        self.consumed.iter().sum()
    }

    pub fn layer1_log(&self) -> &[Reveal] {
        &self.layer1_log
    }

    pub fn layer2_log(&self) -> &[Reveal] {
        &self.layer2_log
    }

    /// Search-made layer-one reveals, in query order.
    pub fn search_queries(&self) -> impl Iterator<Item = &Reveal> {
        self.layer1_log
            .iter()
            .filter(|r| matches!(r.origin, RevealOrigin::Block(_)))
    }
}

fn decode(code: u8) -> Option<bool> {
    match code {
        NEG_SEARCH | NEG_LATE => Some(false),
        POS_SEARCH | POS_LATE => Some(true),
        _ => None,
    }
}

/// Eagerly percolated copy of `g`: each edge kept with probability `p`.
pub fn percolate_full(g: &Graph, p: f64, seed: u64) -> Result<Graph> {
    let keep = Bernoulli::new(p).map_err(|_| Error::Probability(p))?;
    let mut rng = rng::stream(seed, Purpose::Percolate, 0);
    let kept: Vec<_> = g.edges().filter(|_| keep.sample(&mut rng)).collect();
    Graph::from_edges(g.vertex_count(), kept)
}
