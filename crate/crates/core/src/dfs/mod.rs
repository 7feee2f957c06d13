//! The modified depth-first search.
//!
//! The search runs the usual stack discipline over the layer-one oracle and
//! additionally counts processed vertices in blocks of `k`. At each block
//! boundary the block's fresh-query outcomes are classified; a bad block
//! rolls the active path back to the top safe vertex (or fails the run when
//! there is none), and every `2k`-th consecutive good block plants a new safe
//! vertex on the active path.

mod baseline;
mod cycle;
mod state;

use alloc::vec::Vec;

pub use baseline::{baseline_dfs_path, BaselinePath};
pub use cycle::{collect_long_edges, extract_cycle, rho, validate_cycle, LongEdge};
pub use state::{DfsState, FailureReason, StepEvent, VertexStatus};

use crate::error::{Error, Result};
use crate::graph::{Forest, Graph, Vertex};
use crate::percolation::{EdgeOracle, Reveal};

/// Current run-record layout version.
pub const RUN_FORMAT: u32 = 1;

/// Block size and the good-block threshold parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockRule {
    pub k: usize,
    pub d: f64,
    pub epsilon: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Verdict {
    Good,
    Bad,
}

impl BlockRule {
    /// Integer window `[ceil(dk/2), floor(dk)]` of prefix lengths checked.
    pub fn window(&self) -> (usize, usize) {
        let dk = self.d * self.k as f64;
        let lo = (libm::ceil(dk / 2.0) as usize).max(1);
        let hi = libm::floor(dk) as usize;
        (lo, hi)
    }

    /// Good iff `Y_s >= (1+eps) s / d` for every `s` in the window that the
    /// block actually reached. A window the block never reached is vacuous.
    pub fn classify(&self, outcomes: &[bool]) -> Verdict {
        let (lo, hi) = self.window();
        let hi = hi.min(outcomes.len());
        let mut positives = 0usize;
        for (i, &x) in outcomes.iter().enumerate().take(hi) {
            positives += usize::from(x);
            let s = i + 1;
            if s >= lo && (positives as f64) < (1.0 + self.epsilon) * s as f64 / self.d {
                return Verdict::Bad;
            }
        }
        Verdict::Good
    }
}

/// Free-function form of [`BlockRule::classify`].
pub fn classify_block(record: &BlockRecord, k: usize, d: f64, epsilon: f64) -> Verdict {
    BlockRule { k, d, epsilon }.classify(&record.outcomes)
}

/// One completed block `B_i`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockRecord {
    pub index: usize,
    /// Fresh layer-one outcomes `X_{i,1}, X_{i,2}, ...` in query order.
    #[cfg_attr(feature = "serde", serde(with = "bits"))]
    pub outcomes: Vec<bool>,
    pub verdict: Verdict,
    /// The step `t_i` at which the `ik`-th vertex was processed.
    pub boundary_step: u64,
    pub first_vertex: Vertex,
    /// `v_i`.
    pub last_vertex: Vertex,
    /// `a_i = |A(t_i)|`, before the boundary rule acts.
    pub active_at_boundary: usize,
    /// `|S|` once the boundary rule has acted.
    pub safe_after_boundary: usize,
    /// Whether every safe vertex was still active after the boundary rule.
    pub safe_within_active: bool,
}

impl BlockRecord {
    pub fn queries(&self) -> usize {
        self.outcomes.len()
    }

    pub fn positives(&self) -> usize {
        self.outcomes.iter().filter(|&&x| x).count()
    }

    /// `Y_{i,s}` for `s = 1..=queries`.
    pub fn running_positives(&self) -> Vec<usize> {
        self.outcomes
            .iter()
            .scan(0, |y, &x| {
                *y += usize::from(x);
                Some(*y)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum SafeEvent {
    /// `safe` was pushed at the boundary of `block`, as the active vertex
    /// nearest to `anchor` (the first vertex of block `block - k`).
    Created { block: usize, anchor: Vertex, safe: Vertex },
    /// The creation rule fired but `anchor` shares no tree with the active path.
    Skipped { block: usize, anchor: Vertex },
    /// Bad block `block` rolled back to `safe`, trashing `trashed`.
    Consumed { block: usize, safe: Vertex, trashed: Vec<Vertex> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Failure {
    pub block: usize,
    pub reason: FailureReason,
}

/// Plants a safe vertex if `blocks` ends on a multiple of `2k` preceded by
/// `2k` good blocks.
pub fn maybe_create_safe(state: &mut DfsState, blocks: &[BlockRecord], k: usize) -> Option<SafeEvent> {
    let j = blocks.len();
    if j == 0 || j % (2 * k) != 0 {
        return None;
    }
    if blocks[j - 2 * k..].iter().any(|b| b.verdict == Verdict::Bad) {
        return None;
    }
    let anchor = blocks[j - k - 1].first_vertex;
    Some(match state.closest_active(anchor) {
        Some(y) => {
            state.safe.push(y);
            SafeEvent::Created {
                block: j,
                anchor,
                safe: y,
            }
        }
        None => SafeEvent::Skipped { block: j, anchor },
    })
}

/// Bad-block handling: rollback to the top safe vertex or failure.
pub fn handle_bad_block(state: &mut DfsState, block: usize) -> core::result::Result<SafeEvent, Failure> {
    match state.rollback() {
        Ok((safe, trashed)) => Ok(SafeEvent::Consumed {
            block,
            safe,
            trashed,
        }),
        Err(reason) => Err(Failure { block, reason }),
    }
}

/// Default step budget: `10 n` times the average degree (at least `10 n`).
pub fn default_step_budget(g: &Graph) -> u64 {
    let n = g.vertex_count() as f64;
    (10.0 * n * g.average_degree().max(1.0)) as u64
}

/// Drives a [`DfsState`] and applies the block-boundary rules.
pub struct DfsEngine<'a, 'g> {
    graph: &'g Graph,
    oracle: &'a mut EdgeOracle<'g>,
    rule: BlockRule,
    budget: u64,
    state: DfsState,
    blocks: Vec<BlockRecord>,
    bad_trace: Vec<usize>,
    safe_events: Vec<SafeEvent>,
    failure: Option<Failure>,
    truncated: bool,
}

impl<'a, 'g> DfsEngine<'a, 'g> {
    pub fn new(oracle: &'a mut EdgeOracle<'g>, rule: BlockRule, budget: Option<u64>) -> Result<Self> {
        let graph = oracle.graph();
        let n = graph.vertex_count();
        if rule.k == 0 || rule.k > n {
            return Err(Error::Input("need 1 <= k <= n"));
        }
        Ok(DfsEngine {
            graph,
            oracle,
            rule,
            budget: budget.unwrap_or_else(|| default_step_budget(graph)),
            state: DfsState::new(n),
            blocks: Vec::new(),
            bad_trace: Vec::new(),
            safe_events: Vec::new(),
            failure: None,
            truncated: false,
        })
    }

    pub fn state(&self) -> &DfsState {
        &self.state
    }

    pub fn rule(&self) -> BlockRule {
        self.rule
    }

    pub fn oracle(&self) -> &EdgeOracle<'g> {
        self.oracle
    }

    pub fn blocks(&self) -> &[BlockRecord] {
        &self.blocks
    }

    pub fn safe_events(&self) -> &[SafeEvent] {
        &self.safe_events
    }

    pub fn failure(&self) -> Option<Failure> {
        self.failure
    }

    pub fn is_done(&self) -> bool {
        self.failure.is_some() || self.truncated || self.state.is_finished()
    }

    /// One step plus any boundary handling it triggers. Returns `None` once
    /// the run is over (finished, failed, or out of budget).
    pub fn advance(&mut self) -> Result<Option<StepEvent>> {
        if self.is_done() {
            return Ok(None);
        }
        if self.state.steps >= self.budget {
            self.truncated = true;
            return Ok(None);
        }
        let event = self.state.step(self.graph, self.oracle)?;
        if let StepEvent::Processed(v) = event {
            if self.state.processed % self.rule.k == 0 {
                self.close_block(v);
            }
        }
        Ok(Some(event))
    }

    fn close_block(&mut self, last: Vertex) {
        let index = self.state.block;
        let outcomes = core::mem::take(&mut self.state.block_outcomes);
        let verdict = self.rule.classify(&outcomes);
        let first = self.state.block_first.take().unwrap_or(last);
        self.blocks.push(BlockRecord {
            index,
            outcomes,
            verdict,
            boundary_step: self.state.steps,
            first_vertex: first,
            last_vertex: last,
            active_at_boundary: self.state.active.len(),
            safe_after_boundary: 0,
            safe_within_active: true,
        });
        let bad_so_far = self.bad_trace.last().copied().unwrap_or(0) + usize::from(verdict == Verdict::Bad);
        self.bad_trace.push(bad_so_far);
        let event = match verdict {
            Verdict::Bad => match handle_bad_block(&mut self.state, index) {
                Ok(ev) => Some(ev),
                Err(f) => {
                    self.failure = Some(f);
                    None
                }
            },
            Verdict::Good => maybe_create_safe(&mut self.state, &self.blocks, self.rule.k),
        };
        if let Some(ev) = event {
            self.safe_events.push(ev);
        }
        let record = self.blocks.last_mut().expect("pushed above");
        record.safe_after_boundary = self.state.safe.len();
        record.safe_within_active = self
            .state
            .safe
            .iter()
            .all(|&s| self.state.status[s] == VertexStatus::Active);
        self.state.block += 1;
    }

    pub fn run_to_end(mut self) -> Result<DfsRun> {
        while self.advance()?.is_some() {}
        Ok(self.finish())
    }

    pub fn finish(self) -> DfsRun {
        let queries = self.oracle.search_queries().copied().collect();
        let state = self.state;
        DfsRun {
            format: RUN_FORMAT,
            vertex_count: state.status.len(),
            rule: self.rule,
            steps: state.steps,
            failed: self.failure.is_some(),
            failure: self.failure,
            truncated: self.truncated,
            blocks: self.blocks,
            bad_trace: self.bad_trace,
            tail_outcomes: state.block_outcomes,
            safe_events: self.safe_events,
            status: state.status,
            active: state.active,
            safe: state.safe,
            parent: state.forest.parents().to_vec(),
            queries,
            long_edges: Vec::new(),
            cycle: None,
        }
    }
}

/// A completed (or failed, or truncated) search with everything needed to
/// audit it afterwards.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DfsRun {
    pub format: u32,
    pub vertex_count: usize,
    pub rule: BlockRule,
    pub steps: u64,
    pub failed: bool,
    pub failure: Option<Failure>,
    pub truncated: bool,
    pub blocks: Vec<BlockRecord>,
    /// `Z_s` for `s = 1..=blocks.len()`.
    pub bad_trace: Vec<usize>,
    /// Outcomes charged to the last, unfinished block.
    #[cfg_attr(feature = "serde", serde(with = "bits"))]
    pub tail_outcomes: Vec<bool>,
    pub safe_events: Vec<SafeEvent>,
    pub status: Vec<VertexStatus>,
    pub active: Vec<Vertex>,
    pub safe: Vec<Vertex>,
    pub parent: Vec<Option<Vertex>>,
    /// Layer-one queries made by the search, in order.
    pub queries: Vec<Reveal>,
    pub long_edges: Vec<LongEdge>,
    pub cycle: Option<Vec<Vertex>>,
}

impl DfsRun {
    pub fn forest(&self) -> Result<Forest> {
        Forest::from_parents(self.parent.clone())
    }

    pub fn bad_blocks(&self) -> usize {
        self.blocks.iter().filter(|b| b.verdict == Verdict::Bad).count()
    }

    /// `Z_s` recomputed from the block verdicts.
    pub fn recompute_bad_trace(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |z, b| {
                *z += usize::from(b.verdict == Verdict::Bad);
                Some(*z)
            })
            .collect()
    }

    /// Every vertex that has ever been on the safe stack.
    pub fn ever_safe(&self) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self
            .safe_events
            .iter()
            .filter_map(|e| match e {
                SafeEvent::Created { safe, .. } | SafeEvent::Consumed { safe, .. } => Some(*safe),
                SafeEvent::Skipped { .. } => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Runs the modified search to completion on `oracle`'s graph.
pub fn run_dfs(cfg: &crate::config::ExperimentConfig, oracle: &mut EdgeOracle<'_>) -> Result<DfsRun> {
    DfsEngine::new(oracle, cfg.block_rule(), cfg.step_budget)?.run_to_end()
}

#[cfg(feature = "serde")]
mod bits {
    use alloc::string::String;
    use alloc::vec::Vec;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[bool], s: S) -> Result<S::Ok, S::Error> {
        let text: String = v.iter().map(|&b| if b { '1' } else { '0' }).collect();
        s.serialize_str(&text)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(D::Error::custom("outcome strings may only hold 0 and 1")),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests;
