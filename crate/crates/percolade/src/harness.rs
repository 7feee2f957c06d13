//! Running many independent trials in parallel.
//!
//! Trial `i` draws all of its randomness from streams keyed by the master
//! seed and `i`, so results do not depend on the thread count or on the
//! order in which workers finish.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use percolade_core::trial::{ExperimentReport, ExperimentSummary};
use percolade_core::{run_trial, DfsRun, ExperimentConfig, Graph, TrialResult};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const THREADS_ENV: &str = "PERCOLADE_THREADS";

/// Explicit value, else `PERCOLADE_THREADS`, else the machine's parallelism.
pub fn resolve_threads(flag: Option<usize>) -> usize {
    flag.filter(|&t| t > 0)
        .or_else(|| {
            std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .filter(|&t| t > 0)
        })
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct HarnessOptions {
    pub threads: Option<usize>,
    /// Record wall time per trial. Off by default so outputs stay reproducible.
    pub timing: bool,
    pub keep_runs: bool,
}

/// Experiment parameters as read from a config file or flags; every field
/// optional so layers can be merged.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    pub k: Option<usize>,
    pub d: Option<f64>,
    pub epsilon: Option<f64>,
    pub p: Option<f64>,
    pub p2: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub step_budget: Option<u64>,
}

impl ConfigSpec {
    /// Fields set in `over` win.
    pub fn overlay(&self, over: &ConfigSpec) -> ConfigSpec {
        ConfigSpec {
            k: over.k.or(self.k),
            d: over.d.or(self.d),
            epsilon: over.epsilon.or(self.epsilon),
            p: over.p.or(self.p),
            p2: over.p2.or(self.p2),
            seed: over.seed.or(self.seed),
            trials: over.trials.or(self.trials),
            step_budget: over.step_budget.or(self.step_budget),
        }
    }

    pub fn build(&self) -> Result<ExperimentConfig> {
        let (Some(k), Some(d), Some(eps)) = (self.k, self.d, self.epsilon) else {
            bail!("k, d and epsilon are required (flags or config file)");
        };
        let mut b = ExperimentConfig::builder(k, d, eps)
            .seed(self.seed.unwrap_or(0))
            .trials(self.trials.unwrap_or(1));
        if let Some(p) = self.p {
            b = b.p(p);
        }
        if let Some(p2) = self.p2 {
            b = b.p2(p2);
        }
        if let Some(s) = self.step_budget {
            b = b.step_budget(s);
        }
        Ok(b.build()?)
    }
}

pub struct Experiment {
    pub results: Vec<TrialResult>,
    /// Full run records, in trial order, when requested.
    pub runs: Vec<DfsRun>,
    pub report: ExperimentReport,
    pub threads: usize,
}

pub fn run_experiment(g: &Graph, cfg: &ExperimentConfig, opts: HarnessOptions) -> Result<Experiment> {
    if cfg.trials == 0 {
        bail!("trials must be at least 1");
    }
    if cfg.k > g.vertex_count() {
        bail!("block size k = {} exceeds the vertex count n = {}", cfg.k, g.vertex_count());
    }
    let threads = resolve_threads(opts.threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("building the worker pool")?;
    let outcomes: Vec<_> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let start = Instant::now();
                let mut t = run_trial(g, cfg, i)?;
                if opts.timing {
                    t.result.millis = start.elapsed().as_millis() as u64;
                }
                Ok((t.result, opts.keep_runs.then_some(t.run)))
            })
            .collect::<Result<_, percolade_core::Error>>()
    })?;
    let mut results = Vec::with_capacity(outcomes.len());
    let mut runs = Vec::new();
    for (r, run) in outcomes {
        results.push(r);
        runs.extend(run);
    }
    let report = ExperimentReport::new(cfg, &results);
    Ok(Experiment {
        results,
        runs,
        report,
        threads,
    })
}

/// Values to sweep; an empty axis keeps the base value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Grid {
    pub p: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub k: Vec<usize>,
}

impl Grid {
    pub fn is_empty(&self) -> bool {
        self.p.is_empty() && self.epsilon.is_empty() && self.k.is_empty()
    }

    /// Grid points as config overlays, `k` outermost and `p` innermost.
    pub fn points(&self) -> Vec<ConfigSpec> {
        fn axis<T: Copy>(v: &[T]) -> Vec<Option<T>> {
            if v.is_empty() {
                vec![None]
            } else {
                v.iter().copied().map(Some).collect()
            }
        }
        let mut out = Vec::new();
        for k in axis(&self.k) {
            for epsilon in axis(&self.epsilon) {
                for p in axis(&self.p) {
                    out.push(ConfigSpec {
                        k,
                        epsilon,
                        p,
                        ..ConfigSpec::default()
                    });
                }
            }
        }
        out
    }
}

/// Aggregates for one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub d: f64,
    pub epsilon: f64,
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
    pub trials: u64,
    pub long_threshold: f64,
    pub cycles_found: u64,
    pub cycle_probability: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_cycle_len: f64,
    pub cycle_len_std_error: f64,
    pub median_cycle_len: f64,
    pub max_cycle_len: f64,
    pub mean_long_edges: f64,
    pub bad_block_rate: f64,
    pub failure_rate: f64,
    pub target_length: f64,
}

impl SweepRow {
    pub fn new(cfg: &ExperimentConfig, s: &ExperimentSummary, target_length: f64) -> Self {
        let q = s.cycle_len_quantiles.unwrap_or_default();
        SweepRow {
            k: cfg.k,
            d: cfg.d,
            epsilon: cfg.epsilon,
            p: cfg.split.p,
            p1: cfg.split.p1,
            p2: cfg.split.p2,
            trials: s.trials,
            long_threshold: cfg.long_threshold(),
            cycles_found: s.cycles_found,
            cycle_probability: s.cycle_probability,
            ci_low: s.cycle_probability_interval.0,
            ci_high: s.cycle_probability_interval.1,
            mean_cycle_len: s.mean_cycle_len,
            cycle_len_std_error: s.mean_cycle_len_std_error,
            median_cycle_len: q.median,
            max_cycle_len: q.max,
            mean_long_edges: s.mean_long_edges,
            bad_block_rate: s.bad_block_rate,
            failure_rate: s.failure_rate,
            target_length,
        }
    }
}

pub fn run_sweep(g: &Graph, base: &ConfigSpec, grid: &Grid, opts: HarnessOptions) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        bail!("empty sweep grid");
    }
    let opts = HarnessOptions {
        keep_runs: false,
        ..opts
    };
    grid.points()
        .iter()
        .map(|point| {
            let cfg = base.overlay(point).build()?;
            let exp = run_experiment(g, &cfg, opts)?;
            Ok(SweepRow::new(
                &cfg,
                &exp.report.summary,
                exp.report.bounds.target_cycle_length,
            ))
        })
        .collect()
}
