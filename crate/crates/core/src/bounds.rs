//! Closed-form probability bounds and interval estimates.

use libm::{exp, pow, sqrt};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

/// Binomial two-sided tail bound `P(|X - mu| > t) < 2 exp(-t^2 / 3mu)`,
/// valid for `mu > 0` and `0 <= t <= mu/2`. Clamped to 1.
pub fn chernoff_bound(mu: f64, t: f64) -> Result<f64> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Domain("mean must be positive and finite"));
    }
    if !(t >= 0.0) || t > mu / 2.0 {
        return Err(Error::Domain("deviation must lie in [0, mu/2]"));
    }
    Ok((2.0 * exp(-t * t / (3.0 * mu))).min(1.0))
}

/// Closed forms attached to one configuration.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TheoremBounds {
    /// `eps^2 k d / 100`.
    pub target_cycle_length: f64,
    /// `1 - 2 exp(-eps^2 k / 200 d)`, unclamped; may be negative.
    pub success_bound: f64,
    pub success_vacuous: bool,
    /// Lower bound on P(block good): `1 - d k exp(-eps^2 k / 12)`, unclamped.
    pub block_good_bound: f64,
    /// `e^{-lambda k / 2}`: the bound on `Z_s / s`.
    pub bad_ratio_bound: f64,
    /// `1 - exp(-lambda k / 8)`: probability that the ratio bound holds.
    pub few_bad_probability: f64,
    /// `1 - (1 - eps/d)^{eps k}`.
    pub sprinkle_success_exact: f64,
    /// `1 - exp(-eps^2 k / d)`.
    pub sprinkle_success_bound: f64,
    /// `eps >= 300 d^{-1/2}`.
    pub theorem_valid: bool,
}

pub fn theorem_bounds(cfg: &ExperimentConfig) -> TheoremBounds {
    let (k, d, eps) = (cfg.k as f64, cfg.d, cfg.epsilon);
    let lambda = cfg.lambda;
    let success_bound = 1.0 - 2.0 * exp(-eps * eps * k / (200.0 * d));
    TheoremBounds {
        target_cycle_length: eps * eps * k * d / 100.0,
        success_bound,
        success_vacuous: success_bound <= 0.0,
        block_good_bound: 1.0 - d * k * exp(-eps * eps * k / 12.0),
        bad_ratio_bound: exp(-lambda * k / 2.0),
        few_bad_probability: 1.0 - exp(-lambda * k / 8.0),
        sprinkle_success_exact: 1.0 - pow(1.0 - (eps / d).min(1.0), eps * k),
        sprinkle_success_bound: 1.0 - exp(-eps * eps * k / d),
        theorem_valid: cfg.theorem_valid(),
    }
}

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chernoff_examples() {
        let e1 = 2.0 * exp(-1.0);
        assert!((chernoff_bound(12.0, 6.0).unwrap() - 0.735_758_882_342_884_6).abs() < 1e-12);
        assert!((chernoff_bound(12.0, 6.0).unwrap() - e1).abs() < 1e-12);
        assert_eq!(chernoff_bound(5.0, 0.0).unwrap(), 1.0);
        assert!((chernoff_bound(300.0, 30.0).unwrap() - e1).abs() < 1e-12);
        assert!(chernoff_bound(12.0, 6.5).is_err());
        assert!(chernoff_bound(0.0, 0.0).is_err());
        assert!(chernoff_bound(4.0, -1.0).is_err());
    }

    #[test]
    fn chernoff_monotone() {
        for mu in [1.0, 10.0, 250.0] {
            let mut prev = 2.0;
            for i in 0..=50 {
                let t = mu / 2.0 * i as f64 / 50.0;
                let b = chernoff_bound(mu, t).unwrap();
                assert!(b <= prev);
                prev = b;
                assert!(chernoff_bound(mu * 1.5, t).unwrap() >= b);
            }
        }
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(30, 100, 1.96);
        assert!(lo < 0.3 && 0.3 < hi);
        assert_eq!(wilson_interval(0, 0, 1.96), (0.0, 1.0));
        let (lo, hi) = wilson_interval(50, 50, 1.96);
        assert!(lo > 0.9 && hi == 1.0);
    }
}
