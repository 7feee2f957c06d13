//! One trial: search at `p1`, collect long edges, sprinkle, extract a cycle.
//! Plus the order-independent aggregation of many trials.

use alloc::vec::Vec;

use libm::sqrt;

use crate::bounds::{theorem_bounds, wilson_interval, TheoremBounds};
use crate::config::ExperimentConfig;
use crate::dfs::{collect_long_edges, extract_cycle, run_dfs, DfsRun};
use crate::error::Result;
use crate::graph::Graph;
use crate::percolation::EdgeOracle;
use crate::rng::trial_seed;

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialResult {
    pub trial: u64,
    pub seed: u64,
    pub cycle_found: bool,
    /// Cycle length in edges; 0 when none was found.
    pub cycle_len: usize,
    pub long_edges: usize,
    pub blocks: usize,
    pub bad_blocks: usize,
    pub failed: bool,
    pub truncated: bool,
    /// Wall time; left at 0 by [`run_trial`], filled in by timed harnesses.
    pub millis: u64,
}

/// A trial's summary together with its full run record.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub result: TrialResult,
    pub run: DfsRun,
}

/// Runs trial `trial` of `cfg` on `g`. Search failure is an outcome, not an
/// error; the forest built up to the failure is still searched for long edges.
pub fn run_trial(g: &Graph, cfg: &ExperimentConfig, trial: u64) -> Result<TrialOutcome> {
    let seed = trial_seed(cfg.seed, trial);
    let mut oracle = EdgeOracle::new(g, cfg.split, seed)?;
    let mut run = run_dfs(cfg, &mut oracle)?;
    let long = collect_long_edges(&run, g, cfg)?;
    let cycle = extract_cycle(&run, &long, &mut oracle)?;
    let result = TrialResult {
        trial,
        seed,
        cycle_found: cycle.is_some(),
        cycle_len: cycle.as_ref().map_or(0, Vec::len),
        long_edges: long.len(),
        blocks: run.blocks.len(),
        bad_blocks: run.bad_blocks(),
        failed: run.failed,
        truncated: run.truncated,
        millis: 0,
    };
    run.long_edges = long;
    run.cycle = cycle;
    Ok(TrialOutcome { result, run })
}

/// Five-number summary of cycle lengths among trials that found one.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

fn nearest_rank(sorted: &[usize], q: f64) -> f64 {
    let idx = libm::ceil(q * sorted.len() as f64) as usize;
    sorted[idx.clamp(1, sorted.len()) - 1] as f64
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentSummary {
    pub trials: u64,
    pub cycles_found: u64,
    /// Empirical P(cycle of length >= alpha k d).
    pub cycle_probability: f64,
    /// 95% Wilson interval for `cycle_probability`.
    pub cycle_probability_interval: (f64, f64),
    /// Mean cycle length over all trials, counting misses as 0.
    pub mean_cycle_len: f64,
    pub mean_cycle_len_std_error: f64,
    pub cycle_len_quantiles: Option<Quantiles>,
    pub mean_long_edges: f64,
    pub blocks: u64,
    pub bad_blocks: u64,
    pub bad_block_rate: f64,
    pub failures: u64,
    pub failure_rate: f64,
    pub truncations: u64,
}

/// Order-independent accumulator for [`ExperimentSummary`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SummaryAccumulator {
    trials: u64,
    cycles: u64,
    lengths: Vec<usize>,
    len_sum: f64,
    len_sq_sum: f64,
    long_edges: u64,
    blocks: u64,
    bad: u64,
    failures: u64,
    truncations: u64,
}

impl SummaryAccumulator {
    pub fn push(&mut self, r: &TrialResult) {
        self.trials += 1;
        if r.cycle_found {
            self.cycles += 1;
            self.lengths.push(r.cycle_len);
        }
        let len = r.cycle_len as f64;
        self.len_sum += len;
        self.len_sq_sum += len * len;
        self.long_edges += r.long_edges as u64;
        self.blocks += r.blocks as u64;
        self.bad += r.bad_blocks as u64;
        self.failures += u64::from(r.failed);
        self.truncations += u64::from(r.truncated);
    }

    pub fn merge(mut self, other: SummaryAccumulator) -> Self {
        self.trials += other.trials;
        self.cycles += other.cycles;
        self.lengths.extend(other.lengths);
        self.len_sum += other.len_sum;
        self.len_sq_sum += other.len_sq_sum;
        self.long_edges += other.long_edges;
        self.blocks += other.blocks;
        self.bad += other.bad;
        self.failures += other.failures;
        self.truncations += other.truncations;
        self
    }

    pub fn finish(mut self) -> ExperimentSummary {
        let n = self.trials.max(1) as f64;
        self.lengths.sort_unstable();
        let mean = self.len_sum / n;
        let var = if self.trials > 1 {
            ((self.len_sq_sum - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        let quantiles = (!self.lengths.is_empty()).then(|| Quantiles {
            min: self.lengths[0] as f64,
            q25: nearest_rank(&self.lengths, 0.25),
            median: nearest_rank(&self.lengths, 0.5),
            q75: nearest_rank(&self.lengths, 0.75),
            max: *self.lengths.last().expect("non-empty") as f64,
        });
        ExperimentSummary {
            trials: self.trials,
            cycles_found: self.cycles,
            cycle_probability: self.cycles as f64 / n,
            cycle_probability_interval: wilson_interval(self.cycles, self.trials, 1.959_963_984_540_054),
            mean_cycle_len: mean,
            mean_cycle_len_std_error: sqrt(var / n),
            cycle_len_quantiles: quantiles,
            mean_long_edges: self.long_edges as f64 / n,
            blocks: self.blocks,
            bad_blocks: self.bad,
            bad_block_rate: if self.blocks == 0 { 0.0 } else { self.bad as f64 / self.blocks as f64 },
            failures: self.failures,
            failure_rate: self.failures as f64 / n,
            truncations: self.truncations,
        }
    }
}

impl ExperimentSummary {
    pub fn from_results<'a, I: IntoIterator<Item = &'a TrialResult>>(results: I) -> Self {
        let mut acc = SummaryAccumulator::default();
        for r in results {
            acc.push(r);
        }
        acc.finish()
    }
}

/// Theory next to measurement for one configuration.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub long_threshold: f64,
    pub bounds: TheoremBounds,
    pub summary: ExperimentSummary,
}

impl ExperimentReport {
    pub fn new(cfg: &ExperimentConfig, results: &[TrialResult]) -> Self {
        ExperimentReport {
            config: cfg.clone(),
            long_threshold: cfg.long_threshold(),
            bounds: theorem_bounds(cfg),
            summary: ExperimentSummary::from_results(results),
        }
    }
}
