//! Experiment parameters and the constants derived from them.

use libm::sqrt;

use crate::dfs::BlockRule;
use crate::error::{Error, Result};
use crate::percolation::{split_probability, SprinklingSplit};

/// `(k, d, eps)` plus the phase probabilities and the derived constants
/// `alpha = eps^2/100`, `gamma = eps (1 - (1+eps)/d) / 2`, `lambda = eps^2/24`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentConfig {
    pub k: usize,
    pub d: f64,
    pub epsilon: f64,
    pub split: SprinklingSplit,
    pub alpha: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub seed: u64,
    pub trials: u64,
    pub step_budget: Option<u64>,
}

/// Default phase probabilities: `p = (1+3 eps)/d` overall, `p1 = (1+2 eps)/d`
/// for the search, and the sprinkle `p2` that makes the two compose to `p`.
pub fn default_split(d: f64, epsilon: f64) -> SprinklingSplit {
    let p = ((1.0 + 3.0 * epsilon) / d).min(1.0);
    let p1 = ((1.0 + 2.0 * epsilon) / d).min(1.0);
    if p1 >= 1.0 {
        return SprinklingSplit {
            p: 1.0,
            p1: 1.0,
            p2: (epsilon / d).min(1.0),
        };
    }
    let p2 = 1.0 - (1.0 - p) / (1.0 - p1);
    SprinklingSplit { p, p1, p2 }
}

#[derive(Clone, Debug)]
pub struct ConfigBuilder {
    k: usize,
    d: f64,
    epsilon: f64,
    p: Option<f64>,
    p2: Option<f64>,
    seed: u64,
    trials: u64,
    step_budget: Option<u64>,
}

impl ConfigBuilder {
    pub fn p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn p2(mut self, p2: f64) -> Self {
        self.p2 = Some(p2);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn step_budget(mut self, budget: u64) -> Self {
        self.step_budget = Some(budget);
        self
    }

    /// Resolves the split. An overridden `p` without an explicit `p2` keeps
    /// the default sprinkle fraction `p2/p`.
    pub fn build(self) -> Result<ExperimentConfig> {
        let ConfigBuilder {
            k,
            d,
            epsilon,
            p,
            p2,
            seed,
            trials,
            step_budget,
        } = self;
        if k == 0 {
            return Err(Error::Input("block size k must be at least 1"));
        }
        if !(d > 1.0) || !d.is_finite() {
            return Err(Error::Input("expansion rate d must exceed 1"));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::Input("epsilon must be positive"));
        }
        if trials == 0 {
            return Err(Error::Input("trials must be at least 1"));
        }
        let default = default_split(d, epsilon);
        let split = match (p, p2) {
            (None, None) => default,
            (p, Some(p2)) => split_probability(p.unwrap_or(default.p), p2)?,
            (Some(p), None) => {
                let fraction = if default.p > 0.0 { default.p2 / default.p } else { 0.0 };
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Probability(p));
                }
                split_probability(p, p * fraction)?
            }
        };
        let cfg = ExperimentConfig {
            k,
            d,
            epsilon,
            split,
            alpha: epsilon * epsilon / 100.0,
            gamma: epsilon * (1.0 - (1.0 + epsilon) / d) / 2.0,
            lambda: epsilon * epsilon / 24.0,
            seed,
            trials,
            step_budget,
        };
        if !cfg.theorem_valid() {
            log::warn!(
                "epsilon = {} is below 300/sqrt(d) = {}; the long-cycle guarantee does not apply",
                epsilon,
                300.0 / sqrt(d)
            );
        }
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn builder(k: usize, d: f64, epsilon: f64) -> ConfigBuilder {
        ConfigBuilder {
            k,
            d,
            epsilon,
            p: None,
            p2: None,
            seed: 0,
            trials: 1,
            step_budget: None,
        }
    }

    pub fn new(k: usize, d: f64, epsilon: f64) -> Result<Self> {
        Self::builder(k, d, epsilon).build()
    }

    pub fn theorem_valid(&self) -> bool {
        self.epsilon >= 300.0 / sqrt(self.d)
    }

    /// `alpha k d`: the forest distance an edge needs to count as long.
    pub fn long_threshold(&self) -> f64 {
        self.alpha * self.k as f64 * self.d
    }

    pub fn block_rule(&self) -> BlockRule {
        BlockRule {
            k: self.k,
            d: self.d,
            epsilon: self.epsilon,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        ExperimentConfig {
            seed,
            ..self.clone()
        }
    }
}
