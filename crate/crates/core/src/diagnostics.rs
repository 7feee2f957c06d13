//! Auditing search runs.
//!
//! Hard checks are the deterministic facts about the search: the vertex
//! partition, the active path, the forest of positive queries, the negative
//! `W`–`U` boundary and the separation of trashed vertices by safe ones. They
//! hold on every run, failed or truncated, and a violation means an engine bug.
//!
//! Soft checks are the growth statements that only hold with high probability
//! under the theorem's hypotheses. They are measured and reported, never
//! enforced.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use libm::{exp, floor};

use crate::bounds::wilson_interval;
use crate::config::ExperimentConfig;
use crate::dfs::{BlockRule, DfsEngine, DfsRun, SafeEvent, Verdict, VertexStatus, RUN_FORMAT};
use crate::graph::{Forest, ForestIndex, Graph, Vertex};
use crate::percolation::RevealOrigin;

/// A broken deterministic invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum Violation {
    Shape { what: &'static str },
    /// The active stack and the status vector disagree about `vertex`.
    Partition { vertex: Vertex },
    /// `active[position]` is not a child of `active[position - 1]` (or, at
    /// position 0, is not a root).
    ActiveNotPath { position: usize },
    ForestCycle { vertex: Vertex },
    ForestTouchesUnprocessed { vertex: Vertex },
    /// A forest edge that was not a positive search query.
    ForestEdgeNotPositive { child: Vertex, parent: Vertex },
    /// Positive search queries and forest edges differ in number.
    PositiveCount { queries: usize, forest_edges: usize },
    /// A `W`–`U` edge of the graph that the search never saw come up negative.
    ProcessedUnprocessedEdge { processed: Vertex, unprocessed: Vertex },
    /// A forest path from a trashed vertex into `A ∪ W` that avoids every
    /// safe vertex; `trashed` and `other` are its ends.
    TrashUnseparated { trashed: Vertex, other: Vertex },
    TrashShrunk { vertex: Vertex },
    TrashLogMismatch { vertex: Vertex },
    DuplicateQuery { u: Vertex, v: Vertex },
    QueryOffGraph { u: Vertex, v: Vertex },
    BlockOutcomes { block: usize },
    VerdictMismatch { block: usize },
    BadTraceMismatch,
    FailureMismatch,
    BlockCount { processed: usize, blocks: usize },
    LongEdge { x: Vertex, y: Vertex },
    Cycle { what: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            Shape { what } => write!(f, "malformed record: {what}"),
            Partition { vertex } => write!(f, "vertex {vertex}: status and active stack disagree"),
            ActiveNotPath { position } => write!(f, "active stack breaks the forest path at position {position}"),
            ForestCycle { vertex } => write!(f, "forest has a cycle through {vertex}"),
            ForestTouchesUnprocessed { vertex } => write!(f, "unprocessed vertex {vertex} lies on a forest edge"),
            ForestEdgeNotPositive { child, parent } => {
                write!(f, "forest edge {parent}-{child} was not a positive query")
            }
            PositiveCount { queries, forest_edges } => {
                write!(f, "{queries} positive queries but {forest_edges} forest edges")
            }
            ProcessedUnprocessedEdge { processed, unprocessed } => {
                write!(f, "edge {processed}-{unprocessed} between W and U not queried negative")
            }
            TrashUnseparated { trashed, other } => {
                write!(f, "forest path {trashed}..{other} from T to A or W avoids every safe vertex")
            }
            TrashShrunk { vertex } => write!(f, "vertex {vertex} left T"),
            TrashLogMismatch { vertex } => write!(f, "vertex {vertex}: T and the rollback log disagree"),
            DuplicateQuery { u, v } => write!(f, "edge {u}-{v} queried twice"),
            QueryOffGraph { u, v } => write!(f, "query {u}-{v} is not an edge"),
            BlockOutcomes { block } => write!(f, "block {block}: outcomes differ from the query log"),
            VerdictMismatch { block } => write!(f, "block {block}: stored verdict differs from replay"),
            BadTraceMismatch => write!(f, "bad-block trace differs from the verdicts"),
            FailureMismatch => write!(f, "failure record inconsistent with the blocks"),
            BlockCount { processed, blocks } => {
                write!(f, "{processed} vertices processed but {blocks} blocks closed")
            }
            LongEdge { x, y } => write!(f, "long edge {x}-{y} has a wrong distance"),
            Cycle { what } => write!(f, "invalid cycle: {what}"),
        }
    }
}

/// The part of a search state the observation checks look at.
#[derive(Clone, Copy, Debug)]
pub struct StateView<'a> {
    pub status: &'a [VertexStatus],
    pub active: &'a [Vertex],
    pub parent: &'a [Option<Vertex>],
    /// Every vertex that has ever been safe, sorted.
    pub ever_safe: &'a [Vertex],
}

/// The deterministic observations on one state. `search` gives the search's
/// layer-one result for a graph edge, `None` if the search never queried it;
/// `positives` is the number of positive search queries.
pub fn check_observations<F>(g: &Graph, view: &StateView<'_>, positives: usize, search: F) -> Vec<Violation>
where
    F: Fn(Vertex, Vertex) -> Option<bool>,
{
    use VertexStatus::*;
    let n = g.vertex_count();
    let mut out = Vec::new();
    if view.status.len() != n || view.parent.len() != n {
        out.push(Violation::Shape {
            what: "state size differs from the graph",
        });
        return out;
    }
    if view.active.iter().chain(view.ever_safe).any(|&v| v >= n) || view.parent.iter().flatten().any(|&p| p >= n) {
        out.push(Violation::Shape {
            what: "vertex id out of range",
        });
        return out;
    }

    let mut on_stack = vec![false; n];
    for &v in view.active {
        if on_stack[v] || view.status[v] != Active {
            out.push(Violation::Partition { vertex: v });
        }
        on_stack[v] = true;
    }
    for v in 0..n {
        if view.status[v] == Active && !on_stack[v] {
            out.push(Violation::Partition { vertex: v });
        }
    }
    for (i, &v) in view.active.iter().enumerate() {
        let expected = if i == 0 { None } else { Some(view.active[i - 1]) };
        if view.parent[v] != expected {
            out.push(Violation::ActiveNotPath { position: i });
        }
    }

    let forest = match Forest::from_parents(view.parent.to_vec()) {
        Ok(f) => f,
        Err(e) => {
            let vertex = match e {
                crate::Error::ForestCycle(v) => v,
                _ => 0,
            };
            out.push(Violation::ForestCycle { vertex });
            return out;
        }
    };
    let mut edges = 0;
    for v in 0..n {
        if view.status[v] == Unprocessed && (view.parent[v].is_some() || !forest.children(v).is_empty()) {
            out.push(Violation::ForestTouchesUnprocessed { vertex: v });
        }
        if let Some(p) = view.parent[v] {
            edges += 1;
            if search(v, p) != Some(true) {
                out.push(Violation::ForestEdgeNotPositive { child: v, parent: p });
            }
        }
    }
    if edges != positives {
        out.push(Violation::PositiveCount {
            queries: positives,
            forest_edges: edges,
        });
    }

    for w in (0..n).filter(|&w| view.status[w] == Processed) {
        for &u in g.neighbors(w) {
            if view.status[u] == Unprocessed && search(w, u) != Some(false) {
                out.push(Violation::ProcessedUnprocessedEdge {
                    processed: w,
                    unprocessed: u,
                });
            }
        }
    }

    out.extend(trash_separation(&forest, view));
    out
}

/// Cutting the forest at every ever-safe vertex must leave no piece holding
/// both a trashed vertex and an active or processed one.
fn trash_separation(forest: &Forest, view: &StateView<'_>) -> Option<Violation> {
    let n = view.status.len();
    let is_safe = |v: Vertex| view.ever_safe.binary_search(&v).is_ok();
    let mut dsu: Vec<usize> = (0..n).collect();
    fn find(dsu: &mut [usize], mut v: usize) -> usize {
        while dsu[v] != v {
            dsu[v] = dsu[dsu[v]];
            v = dsu[v];
        }
        v
    }
    for v in 0..n {
        if let Some(p) = forest.parent(v) {
            if !is_safe(v) && !is_safe(p) {
                let (a, b) = (find(&mut dsu, v), find(&mut dsu, p));
                dsu[a] = b;
            }
        }
    }
    let mut trash_in: Vec<Option<Vertex>> = vec![None; n];
    let mut live_in: Vec<Option<Vertex>> = vec![None; n];
    for v in (0..n).filter(|&v| !is_safe(v)) {
        let r = find(&mut dsu, v);
        match view.status[v] {
            VertexStatus::Trashed => {
                trash_in[r].get_or_insert(v);
            }
            VertexStatus::Active | VertexStatus::Processed => {
                live_in[r].get_or_insert(v);
            }
            VertexStatus::Unprocessed => {}
        }
    }
    (0..n).find_map(|r| match (trash_in[r], live_in[r]) {
        (Some(t), Some(o)) => Some(Violation::TrashUnseparated { trashed: t, other: o }),
        _ => None,
    })
}

fn ever_safe_of(events: &[SafeEvent]) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = events
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

/// Checks a live engine after every step: the observations, `T` only ever
/// growing, and `k` processed vertices per closed block.
#[derive(Clone, Debug, Default)]
pub struct StepChecker {
    trashed: Vec<bool>,
    steps_checked: u64,
}

impl StepChecker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn steps_checked(&self) -> u64 {
        self.steps_checked
    }

    pub fn check(&mut self, engine: &DfsEngine<'_, '_>) -> Vec<Violation> {
        let state = engine.state();
        let oracle = engine.oracle();
        let g = oracle.graph();
        let ever_safe = ever_safe_of(engine.safe_events());
        let view = StateView {
            status: state.statuses(),
            active: state.active(),
            parent: state.forest().parents(),
            ever_safe: &ever_safe,
        };
        let positives = oracle.search_queries().filter(|r| r.present).count();
        let mut out = check_observations(g, &view, positives, |u, v| oracle.search_memo(u, v));

        if self.trashed.len() != state.vertex_count() {
            self.trashed = vec![false; state.vertex_count()];
        }
        for (v, &s) in state.statuses().iter().enumerate() {
            let now = s == VertexStatus::Trashed;
            if self.trashed[v] && !now {
                out.push(Violation::TrashShrunk { vertex: v });
            }
            self.trashed[v] = now;
        }
        let k = engine.rule().k;
        if state.processed_count() / k != engine.blocks().len() {
            out.push(Violation::BlockCount {
                processed: state.processed_count(),
                blocks: engine.blocks().len(),
            });
        }
        self.steps_checked += 1;
        out
    }
}

/// `alpha`, `gamma` from the rule's `(d, eps)`.
fn rule_constants(rule: &BlockRule) -> (f64, f64) {
    let e = rule.epsilon;
    (e * e / 100.0, e * (1.0 - (1.0 + e) / rule.d) / 2.0)
}

/// Per-block growth measurements.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockDiagnostic {
    pub block: usize,
    pub verdict: Verdict,
    /// `a_i - a_{i-1}`, with `a_0 = 0`.
    pub growth: i64,
    pub safe: usize,
    pub bad_so_far: usize,
    /// `|S(t_i)| >= floor(i / 2k) - 2 Z_i`.
    pub safe_count_ok: bool,
    /// `|S(t_i)| >= i / 2k - 2 Z_i`, read literally.
    pub safe_count_literal_ok: bool,
    pub safe_within_active: bool,
    /// `a_i - a_{i-1} >= gamma k`; `None` for bad blocks, where nothing is claimed.
    pub growth_ok: Option<bool>,
}

/// Vertices of `A ∪ W ∪ T` within forest distance `alpha d k` of one final
/// safe vertex, against both forms of the bound.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SafeRegion {
    pub safe: Vertex,
    pub within: usize,
    /// `2 (alpha d + 3) k / gamma`.
    pub bound: f64,
    /// `(2 alpha d + 4) k / gamma`.
    pub bound_alt: f64,
}

/// The soft side of the audit.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SoftReport {
    pub alpha: f64,
    pub gamma: f64,
    pub blocks: Vec<BlockDiagnostic>,
    pub safe_count_violations: Vec<usize>,
    pub safe_count_literal_violations: Vec<usize>,
    pub containment_violations: Vec<usize>,
    pub growth_violations: Vec<usize>,
    /// Pairs of ever-safe vertices in one tree closer than `gamma k^2`.
    pub close_safe_pairs: Vec<(Vertex, Vertex, usize)>,
    pub safe_regions: Vec<SafeRegion>,
    pub long_edges: usize,
    /// The lemma's "fewer than `eps k` long edges" hypothesis, for this run.
    pub few_long_edges: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RunDiagnostics {
    pub hard: Vec<Violation>,
    pub soft: Option<SoftReport>,
}

impl RunDiagnostics {
    pub fn is_sound(&self) -> bool {
        self.hard.is_empty()
    }
}

/// Audits a finished run against the graph it was made on. The soft report
/// is only produced when the record is structurally sound.
pub fn verify_run_invariants(g: &Graph, run: &DfsRun) -> RunDiagnostics {
    let hard = hard_checks(g, run);
    let soft = if hard.is_empty() { Some(soft_checks(run)) } else { None };
    RunDiagnostics { hard, soft }
}

fn norm(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn hard_checks(g: &Graph, run: &DfsRun) -> Vec<Violation> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    if run.format != RUN_FORMAT {
        out.push(Violation::Shape {
            what: "unknown record format",
        });
        return out;
    }
    if run.vertex_count != n || run.status.len() != n || run.parent.len() != n {
        out.push(Violation::Shape {
            what: "record size differs from the graph",
        });
        return out;
    }
    let k = run.rule.k;
    if k == 0 {
        out.push(Violation::Shape { what: "block size 0" });
        return out;
    }

    let mut searched: BTreeMap<(Vertex, Vertex), bool> = BTreeMap::new();
    let mut per_block: BTreeMap<usize, Vec<bool>> = BTreeMap::new();
    let mut positives = 0;
    for q in &run.queries {
        if !g.has_edge(q.u, q.v) {
            out.push(Violation::QueryOffGraph { u: q.u, v: q.v });
            continue;
        }
        if searched.insert(norm(q.u, q.v), q.present).is_some() {
            out.push(Violation::DuplicateQuery { u: q.u, v: q.v });
        }
        positives += usize::from(q.present);
        match q.origin {
            RevealOrigin::Block(b) => per_block.entry(b).or_default().push(q.present),
            RevealOrigin::Late => out.push(Violation::Shape {
                what: "late reveal in the search log",
            }),
        }
    }

    let ever_safe = run.ever_safe();
    let view = StateView {
        status: &run.status,
        active: &run.active,
        parent: &run.parent,
        ever_safe: &ever_safe,
    };
    out.extend(check_observations(g, &view, positives, |u, v| {
        searched.get(&norm(u, v)).copied()
    }));

    let empty = Vec::new();
    for (i, b) in run.blocks.iter().enumerate() {
        if b.index != i + 1 || per_block.get(&b.index).unwrap_or(&empty) != &b.outcomes {
            out.push(Violation::BlockOutcomes { block: i + 1 });
        }
        if run.rule.classify(&b.outcomes) != b.verdict {
            out.push(Violation::VerdictMismatch { block: b.index });
        }
    }
    let tail = run.blocks.len() + 1;
    if per_block.get(&tail).unwrap_or(&empty) != &run.tail_outcomes
        || per_block.keys().any(|&b| b == 0 || b > tail)
    {
        out.push(Violation::BlockOutcomes { block: tail });
    }
    if run.recompute_bad_trace() != run.bad_trace {
        out.push(Violation::BadTraceMismatch);
    }
    let failure_ok = match run.failure {
        None => !run.failed,
        Some(f) => {
            run.failed
                && run
                    .blocks
                    .last()
                    .is_some_and(|b| b.index == f.block && b.verdict == Verdict::Bad)
        }
    };
    if !failure_ok {
        out.push(Violation::FailureMismatch);
    }
    let processed = run.status.iter().filter(|&&s| s == VertexStatus::Processed).count();
    // trashed vertices may or may not have been processed first
    let trashed = run.status.iter().filter(|&&s| s == VertexStatus::Trashed).count();
    if processed / k > run.blocks.len() || run.blocks.len() * k > processed + trashed {
        out.push(Violation::BlockCount {
            processed,
            blocks: run.blocks.len(),
        });
    }

    let mut logged = vec![false; n];
    for e in &run.safe_events {
        if let SafeEvent::Consumed { trashed, .. } = e {
            for &v in trashed {
                if v >= n || logged[v] {
                    out.push(Violation::TrashLogMismatch { vertex: v });
                } else {
                    logged[v] = true;
                }
            }
        }
    }
    for v in 0..n {
        if logged[v] != (run.status[v] == VertexStatus::Trashed) {
            out.push(Violation::TrashLogMismatch { vertex: v });
        }
    }

    if out.is_empty() {
        out.extend(check_outputs(g, run));
    }
    out
}

fn check_outputs(g: &Graph, run: &DfsRun) -> Vec<Violation> {
    let mut out = Vec::new();
    let Ok(forest) = run.forest() else {
        return out;
    };
    let index = ForestIndex::new(&forest);
    let (alpha, _) = rule_constants(&run.rule);
    let threshold = alpha * run.rule.k as f64 * run.rule.d;
    for e in &run.long_edges {
        let ok = e.x < e.y
            && e.y < g.vertex_count()
            && g.has_edge(e.x, e.y)
            && index.distance(e.x, e.y) == Some(e.rho)
            && e.rho >= 2
            && e.rho as f64 >= threshold;
        if !ok {
            out.push(Violation::LongEdge { x: e.x, y: e.y });
        }
    }
    if let Some(c) = &run.cycle {
        let what = if c.len() < 3 {
            Some("fewer than three vertices")
        } else if c.iter().any(|&v| v >= g.vertex_count()) {
            Some("vertex out of range")
        } else if forest.path(c[0], c[c.len() - 1]).as_deref() != Some(c.as_slice()) {
            Some("not a forest path")
        } else if !g.has_edge(c[0], c[c.len() - 1]) {
            Some("closing pair is not an edge")
        } else if (c.len() as f64) < threshold {
            Some("shorter than the long-edge threshold")
        } else if !run.long_edges.iter().any(|e| norm(c[0], c[c.len() - 1]) == (e.x, e.y)) {
            Some("closing edge is not a long edge")
        } else {
            None
        };
        if let Some(what) = what {
            out.push(Violation::Cycle { what });
        }
    }
    out
}

fn soft_checks(run: &DfsRun) -> SoftReport {
    let k = run.rule.k;
    let (alpha, gamma) = rule_constants(&run.rule);
    let mut blocks = Vec::with_capacity(run.blocks.len());
    let mut prev_a = 0i64;
    for (b, &z) in run.blocks.iter().zip(&run.bad_trace) {
        let i = b.index as f64;
        let safe = b.safe_after_boundary as f64;
        let a = b.active_at_boundary as i64;
        let growth = a - prev_a;
        prev_a = a;
        blocks.push(BlockDiagnostic {
            block: b.index,
            verdict: b.verdict,
            growth,
            safe: b.safe_after_boundary,
            bad_so_far: z,
            safe_count_ok: safe >= floor(i / (2.0 * k as f64)) - 2.0 * z as f64,
            safe_count_literal_ok: safe >= i / (2.0 * k as f64) - 2.0 * z as f64,
            safe_within_active: b.safe_within_active,
            growth_ok: (b.verdict == Verdict::Good).then(|| growth as f64 >= gamma * k as f64),
        });
    }
    let pick = |f: &dyn Fn(&BlockDiagnostic) -> bool| -> Vec<usize> {
        blocks.iter().filter(|b| f(b)).map(|b| b.block).collect()
    };
    let safe_count_violations = pick(&|b| !b.safe_count_ok);
    let safe_count_literal_violations = pick(&|b| !b.safe_count_literal_ok);
    let containment_violations = pick(&|b| !b.safe_within_active);
    let growth_violations = pick(&|b| b.growth_ok == Some(false));

    let forest = run.forest().unwrap_or_else(|_| Forest::new(run.vertex_count));
    let index = ForestIndex::new(&forest);
    let ever_safe = run.ever_safe();
    let far = gamma * (k * k) as f64;
    let mut close_safe_pairs = Vec::new();
    for (i, &u) in ever_safe.iter().enumerate() {
        for &w in &ever_safe[i + 1..] {
            if let Some(r) = index.distance(u, w) {
                if (r as f64) < far {
                    close_safe_pairs.push((u, w, r));
                }
            }
        }
    }

    let radius = alpha * run.rule.d * k as f64;
    let safe_regions = run
        .safe
        .iter()
        .map(|&s| SafeRegion {
            safe: s,
            within: ball_size(&forest, &run.status, s, radius),
            bound: 2.0 * (alpha * run.rule.d + 3.0) * k as f64 / gamma,
            bound_alt: (2.0 * alpha * run.rule.d + 4.0) * k as f64 / gamma,
        })
        .collect();

    SoftReport {
        alpha,
        gamma,
        blocks,
        safe_count_violations,
        safe_count_literal_violations,
        containment_violations,
        growth_violations,
        close_safe_pairs,
        safe_regions,
        long_edges: run.long_edges.len(),
        few_long_edges: (run.long_edges.len() as f64) < run.rule.epsilon * k as f64,
    }
}

/// Non-`U` vertices within forest distance `radius` of `s`.
fn ball_size(forest: &Forest, status: &[VertexStatus], s: Vertex, radius: f64) -> usize {
    let mut seen = BTreeMap::new();
    seen.insert(s, 0usize);
    let mut frontier = vec![s];
    while let Some(v) = frontier.pop() {
        let dv = seen[&v];
        if (dv + 1) as f64 > radius {
            continue;
        }
        let nbrs = forest.children(v).iter().copied().chain(forest.parent(v));
        for w in nbrs {
            if !seen.contains_key(&w) {
                seen.insert(w, dv + 1);
                frontier.push(w);
            }
        }
    }
    seen.keys().filter(|&&v| status[v] != VertexStatus::Unprocessed).count()
}

/// Observed block statistics next to the per-block and few-bad-blocks bounds.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockStats {
    pub runs: usize,
    pub blocks: u64,
    pub bad_blocks: u64,
    pub bad_rate: f64,
    pub bad_rate_interval: (f64, f64),
    /// Largest `Z_s / s` seen in any run.
    pub max_bad_ratio: f64,
    /// `dk exp(-eps^2 k / 12)`, the bound on a block being bad.
    pub bad_rate_bound: f64,
    /// `exp(-lambda k / 2)`.
    pub bad_ratio_bound: f64,
    /// Fraction of runs whose `Z_s / s` stayed within `bad_ratio_bound`.
    pub runs_within_ratio_bound: f64,
}

pub fn empirical_block_stats(runs: &[DfsRun], cfg: &ExperimentConfig) -> BlockStats {
    let k = cfg.k as f64;
    let e = cfg.epsilon;
    let bad_ratio_bound = exp(-cfg.lambda * k / 2.0);
    let (mut blocks, mut bad, mut max_ratio, mut within) = (0u64, 0u64, 0.0f64, 0usize);
    for run in runs {
        blocks += run.blocks.len() as u64;
        bad += run.bad_blocks() as u64;
        let worst = run
            .bad_trace
            .iter()
            .enumerate()
            .map(|(i, &z)| z as f64 / (i + 1) as f64)
            .fold(0.0, f64::max);
        max_ratio = max_ratio.max(worst);
        within += usize::from(worst <= bad_ratio_bound);
    }
    BlockStats {
        runs: runs.len(),
        blocks,
        bad_blocks: bad,
        bad_rate: if blocks == 0 { 0.0 } else { bad as f64 / blocks as f64 },
        bad_rate_interval: wilson_interval(bad, blocks, 1.959_963_984_540_054),
        max_bad_ratio: max_ratio,
        bad_rate_bound: (cfg.d * k * exp(-e * e * k / 12.0)).min(1.0),
        bad_ratio_bound,
        runs_within_ratio_bound: if runs.is_empty() { 0.0 } else { within as f64 / runs.len() as f64 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfs::run_dfs;
    use crate::generators;
    use crate::percolation::EdgeOracle;
    use crate::trial::run_trial;

    #[test]
    fn fresh_runs_are_sound() {
        let g = generators::random_regular(300, 6, 3).unwrap();
        for (i, p) in [0.0, 0.05, 1.0 / 6.0, 0.4, 1.0].into_iter().enumerate() {
            let cfg = ExperimentConfig::builder(4, 3.0, 0.5).p(p).seed(i as u64).build().unwrap();
            let t = run_trial(&g, &cfg, 0).unwrap();
            let d = verify_run_invariants(&g, &t.run);
            assert!(d.is_sound(), "p={p}: {:?}", d.hard);
        }
    }

    #[test]
    fn tampered_forest_is_caught() {
        let g = generators::complete(12).unwrap();
        let cfg = ExperimentConfig::builder(3, 2.0, 0.5).p(1.0).build().unwrap();
        let mut run = run_trial(&g, &cfg, 0).unwrap().run;
        let v = (1..12).find(|&v| run.parent[v] == Some(v - 1)).unwrap();
        run.parent[v] = Some((v + 5) % 12);
        let d = verify_run_invariants(&g, &run);
        assert!(!d.is_sound());
        assert!(d.soft.is_none());
    }

    #[test]
    fn tampered_verdict_is_caught() {
        let g = generators::random_regular(200, 6, 9).unwrap();
        let cfg = ExperimentConfig::builder(4, 3.0, 0.5).p(0.5).build().unwrap();
        let mut run = run_trial(&g, &cfg, 0).unwrap().run;
        let b = &mut run.blocks[0];
        b.verdict = match b.verdict {
            Verdict::Good => Verdict::Bad,
            Verdict::Bad => Verdict::Good,
        };
        let d = verify_run_invariants(&g, &run);
        assert!(d.hard.contains(&Violation::VerdictMismatch { block: 1 }));
    }

    #[test]
    fn step_checker_on_complete_graph() {
        let g = generators::complete(10).unwrap();
        let cfg = ExperimentConfig::builder(2, 2.0, 0.5).p(1.0).build().unwrap();
        let mut oracle = EdgeOracle::new(&g, cfg.split, 1).unwrap();
        let mut engine = DfsEngine::new(&mut oracle, cfg.block_rule(), None).unwrap();
        let mut checker = StepChecker::new();
        while engine.advance().unwrap().is_some() {
            assert_eq!(checker.check(&engine), vec![]);
        }
        assert_eq!(checker.steps_checked(), engine.state().steps());
    }

    #[test]
    fn trash_separation_needs_a_safe_cut() {
        use VertexStatus::*;
        // path 0-1-2 with 2 trashed: fine if 1 was safe, a violation otherwise
        let status = [Active, Active, Trashed];
        let parent = [None, Some(0), Some(1)];
        let forest = Forest::from_parents(parent.to_vec()).unwrap();
        let view = |safe: &'static [Vertex]| StateView {
            status: &status,
            active: &[0, 1],
            parent: &parent,
            ever_safe: safe,
        };
        assert_eq!(trash_separation(&forest, &view(&[1])), None);
        assert!(trash_separation(&forest, &view(&[])).is_some());
        assert!(trash_separation(&forest, &view(&[0])).is_some());
    }

    #[test]
    fn full_probability_growth_on_small_complete_graph() {
        // n in [(1+gamma)k, 2k): one block, a_1 = n - k
        let (n, k) = (14, 8);
        let g = generators::complete(n).unwrap();
        let cfg = ExperimentConfig::builder(k, 3.0, 0.5).p(1.0).build().unwrap();
        let mut oracle = EdgeOracle::new(&g, cfg.split, 0).unwrap();
        let run = run_dfs(&cfg, &mut oracle).unwrap();
        let soft = verify_run_invariants(&g, &run).soft.unwrap();
        assert_eq!(soft.blocks.len(), 1);
        assert_eq!(soft.blocks[0].growth, (n - k) as i64);
        assert!(soft.growth_violations.is_empty());
        assert!(soft.safe_count_violations.is_empty());
        // the literal reading demands a safe vertex after the very first block
        assert_eq!(soft.safe_count_literal_violations, vec![1]);
    }

    #[test]
    fn block_stats_endpoints() {
        let g = generators::random_regular(200, 8, 2).unwrap();
        let full = ExperimentConfig::builder(3, 4.0, 0.5).p(1.0).build().unwrap();
        let runs: Vec<_> = (0..3).map(|i| run_trial(&g, &full, i).unwrap().run).collect();
        let s = empirical_block_stats(&runs, &full);
        assert_eq!(s.bad_blocks, 0);
        assert_eq!(s.max_bad_ratio, 0.0);
        assert_eq!(s.runs_within_ratio_bound, 1.0);

        let none = ExperimentConfig::builder(3, 4.0, 0.5).p(0.0).build().unwrap();
        let runs: Vec<_> = (0..3).map(|i| run_trial(&g, &none, i).unwrap().run).collect();
        let s = empirical_block_stats(&runs, &none);
        assert_eq!(s.bad_rate, 1.0);
    }
}
