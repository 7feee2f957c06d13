//! Checking the `(=k,d)` vertex-expansion hypothesis: every set of exactly
//! `k` vertices has at least `d·k` outside neighbors.
//!
//! Exact mode enumerates every `k`-subset in lexicographic order and stops at
//! the first violation, so a refutation carries the lexicographically least
//! witness. Sampled mode can only refute.

use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NeighborhoodCounter, Vertex};
use crate::rng::{self, Purpose};

/// Default cap on `C(n, k)` for exact enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ExpansionStatus {
    CertifiedExact,
    Refuted,
    PlausibleSampled,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExpansionVerdict {
    pub status: ExpansionStatus,
    pub witness: Option<Vec<Vertex>>,
    /// `|N(witness)|` when refuted.
    pub witness_neighborhood: Option<usize>,
    pub checked_subsets: u64,
}

impl ExpansionVerdict {
    fn refuted(witness: Vec<Vertex>, size: usize, checked: u64) -> Self {
        ExpansionVerdict {
            status: ExpansionStatus::Refuted,
            witness: Some(witness),
            witness_neighborhood: Some(size),
            checked_subsets: checked,
        }
    }
}

/// `C(n, k)`, or `None` past `u64`.
pub fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc: u64 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn violates(size: usize, k: usize, d: f64) -> bool {
    (size as f64) < d * k as f64
}

fn check_params(g: &Graph, k: usize, d: f64) -> Result<()> {
    if k == 0 || k > g.vertex_count() {
        return Err(Error::Input("need 1 <= k <= n"));
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Input("expansion rate d must be positive"));
    }
    Ok(())
}

pub fn certify_exact(g: &Graph, k: usize, d: f64, budget: u64) -> Result<ExpansionVerdict> {
    check_params(g, k, d)?;
    let n = g.vertex_count();
    match binomial(n, k) {
        Some(c) if c <= budget => {}
        _ => return Err(Error::BudgetExceeded { n, k, budget }),
    }
    let mut counter = NeighborhoodCounter::new(n);
    let mut subset: Vec<Vertex> = (0..k).collect();
    let mut checked = 0u64;
    loop {
        checked += 1;
        let size = counter.count(g, &subset);
        if violates(size, k, d) {
            return Ok(ExpansionVerdict::refuted(subset, size, checked));
        }
        // next combination in lexicographic order
        let mut i = k;
        while i > 0 && subset[i - 1] == n - k + (i - 1) {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        subset[i - 1] += 1;
        for j in i..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
    Ok(ExpansionVerdict {
        status: ExpansionStatus::CertifiedExact,
        witness: None,
        witness_neighborhood: None,
        checked_subsets: checked,
    })
}

/// Randomized refuter. Even trials draw a uniform `k`-subset; odd trials grow
/// a set greedily from a low-degree start, always adding the candidate that
/// keeps `|N(S)|` smallest.
pub fn certify_sampled(
    g: &Graph,
    k: usize,
    d: f64,
    trials: u64,
    seed: u64,
) -> Result<ExpansionVerdict> {
    if trials == 0 {
        return Err(Error::Input("sampled certification needs at least one trial"));
    }
    check_params(g, k, d)?;
    let n = g.vertex_count();
    let mut rng = rng::stream(seed, Purpose::Sampler, 0);
    let mut counter = NeighborhoodCounter::new(n);
    let mut greedy = GreedyGrower::new(n);
    for t in 0..trials {
        let mut subset = if t % 2 == 0 {
            index::sample(&mut rng, n, k).into_vec()
        } else {
            greedy.grow(g, k, &mut rng)
        };
        let size = counter.count(g, &subset);
        if violates(size, k, d) {
            subset.sort_unstable();
            return Ok(ExpansionVerdict::refuted(subset, size, t + 1));
        }
    }
    Ok(ExpansionVerdict {
        status: ExpansionStatus::PlausibleSampled,
        witness: None,
        witness_neighborhood: None,
        checked_subsets: trials,
    })
}

struct GreedyGrower {
    in_set: Vec<bool>,
    in_nbhd: Vec<bool>,
    candidates: Vec<Vertex>,
}

impl GreedyGrower {
    fn new(n: usize) -> Self {
        GreedyGrower {
            in_set: alloc::vec![false; n],
            in_nbhd: alloc::vec![false; n],
            candidates: Vec::new(),
        }
    }

    fn gain(&self, g: &Graph, c: Vertex) -> isize {
        let fresh = g
            .neighbors(c)
            .iter()
            .filter(|&&w| !self.in_set[w] && !self.in_nbhd[w])
            .count() as isize;
        fresh - isize::from(self.in_nbhd[c])
    }

    fn add(&mut self, g: &Graph, v: Vertex, set: &mut Vec<Vertex>) {
        self.in_set[v] = true;
        self.in_nbhd[v] = false;
        set.push(v);
        for &w in g.neighbors(v) {
            if !self.in_set[w] && !self.in_nbhd[w] {
                self.in_nbhd[w] = true;
                self.candidates.push(w);
            }
        }
    }

    fn grow<R: Rng>(&mut self, g: &Graph, k: usize, rng: &mut R) -> Vec<Vertex> {
        let n = g.vertex_count();
        self.in_set.fill(false);
        self.in_nbhd.fill(false);
        self.candidates.clear();
        let mut set = Vec::with_capacity(k);
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        let start = if g.degree(b) < g.degree(a) { b } else { a };
        self.add(g, start, &mut set);
        while set.len() < k {
            self.candidates.retain(|&c| self.in_nbhd[c]);
            let mut pool = self.candidates.clone();
            for _ in 0..4 {
                let r = rng.random_range(0..n);
                if !self.in_set[r] {
                    pool.push(r);
                }
            }
            let best = pool
                .iter()
                .copied()
                .filter(|&c| !self.in_set[c])
                .min_by_key(|&c| (self.gain(g, c), c));
            let next = match best {
                Some(v) => v,
                None => (0..n).find(|&v| !self.in_set[v]).expect("k <= n"),
            };
            self.add(g, next, &mut set);
        }
        set
    }
}
