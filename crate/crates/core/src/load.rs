//! Number of distinct backhaul files requested at the tagged BS.

use serde::{Deserialize, Serialize};

use crate::content::FileId;
use crate::error::{Error, Result};

/// Largest backhaul set the subset-enumeration oracle accepts.
pub const BRUTEFORCE_MAX_FILES: usize = 20;

/// Distribution of the backhaul load `k = 1..=F_b`; `probs[k - 1] = P(k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadPmf {
    pub probs: Vec<f64>,
}

impl LoadPmf {
    pub fn prob(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.probs.get(k - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn max_load(&self) -> usize {
        self.probs.len()
    }

    /// `P(load ≥ k)`.
    pub fn tail(&self, k: usize) -> f64 {
        self.probs.iter().skip(k.saturating_sub(1)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }

    /// `E[B / max(k, B)]`: the probability that the requested file gets one
    /// of the `B` backhaul channels when the `k` requested files share them
    /// uniformly.
    pub fn admission_weight(&self, backhaul: usize) -> f64 {
        let b = backhaul as f64;
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| p * b / ((i + 1) as f64).max(b))
            .sum()
    }

    pub fn total_variation(&self, other: &LoadPmf) -> f64 {
        let n = self.probs.len().max(other.probs.len());
        0.5 * (1..=n)
            .map(|k| (self.prob(k) - other.prob(k)).abs())
            .sum::<f64>()
    }
}

/// Probability that at least one user in a BS cell requests a file of
/// popularity `q`, under the gamma approximation of the cell size.
pub fn request_prob(q: f64, lambda_u: f64, lambda_b: f64) -> Result<f64> {
    if !(lambda_u > 0.0) || !(lambda_b > 0.0) || !lambda_u.is_finite() || !lambda_b.is_finite() {
        return Err(Error::domain(format!(
            "densities must be positive and finite, got λ_u = {lambda_u}, λ_b = {lambda_b}"
        )));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!(
            "popularity must lie in [0, 1], got {q}"
        )));
    }
    // 1 - (1 + x)^-4.5 without cancellation for small x.
    let x = q * lambda_u / (3.5 * lambda_b);
    Ok(-(-4.5 * x.ln_1p()).exp_m1())
}

/// Distribution of the number of successes among independent Bernoulli
/// trials; `out[k]` is `P(k successes)`, `k = 0..=n`.
pub fn poisson_binomial_pmf(success: &[f64]) -> Vec<f64> {
    let mut pmf = Vec::with_capacity(success.len() + 1);
    pmf.push(1.0);
    for &p in success {
        pmf.push(0.0);
        for k in (1..pmf.len()).rev() {
            pmf[k] = pmf[k] * (1.0 - p) + pmf[k - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    pmf
}

fn other_request_probs(
    requested: FileId,
    backhaul_set: &[FileId],
    popularity: &[f64],
    lambda_u: f64,
    lambda_b: f64,
) -> Result<Vec<f64>> {
    if !backhaul_set.contains(&requested) {
        return Err(Error::domain(format!(
            "file {requested} is not in the backhaul set"
        )));
    }
    if requested == 0 || requested > popularity.len() {
        return Err(Error::domain(format!(
            "file {requested} has no popularity entry"
        )));
    }
    backhaul_set
        .iter()
        .filter(|&&g| g != requested)
        .map(|&g| {
            let q = popularity
                .get(g.wrapping_sub(1))
                .copied()
                .ok_or_else(|| Error::domain(format!("file {g} has no popularity entry")))?;
            request_prob(q, lambda_u, lambda_b)
        })
        .collect()
}

/// Load pmf seen by a user requesting `requested`: the file itself plus the
/// number of other backhaul files requested in the same cell.
pub fn backhaul_load_pmf(
    requested: FileId,
    backhaul_set: &[FileId],
    popularity: &[f64],
    lambda_u: f64,
    lambda_b: f64,
) -> Result<LoadPmf> {
    let p = other_request_probs(requested, backhaul_set, popularity, lambda_u, lambda_b)?;
    Ok(LoadPmf {
        probs: poisson_binomial_pmf(&p),
    })
}

/// Same distribution by summing over every subset of the other backhaul
/// files. Exponential; kept as a reference.
pub fn backhaul_load_pmf_bruteforce(
    requested: FileId,
    backhaul_set: &[FileId],
    popularity: &[f64],
    lambda_u: f64,
    lambda_b: f64,
) -> Result<LoadPmf> {
    if backhaul_set.len() > BRUTEFORCE_MAX_FILES {
        return Err(Error::TooLarge(format!(
            "subset enumeration over {} files exceeds the limit of {BRUTEFORCE_MAX_FILES}",
            backhaul_set.len()
        )));
    }
    let p = other_request_probs(requested, backhaul_set, popularity, lambda_u, lambda_b)?;
    let n = p.len();
    let mut probs = vec![0.0; n + 1];
    for mask in 0u32..(1u32 << n) {
        let mut prob = 1.0;
        for (j, &pj) in p.iter().enumerate() {
            prob *= if mask >> j & 1 == 1 { pj } else { 1.0 - pj };
        }
        probs[mask.count_ones() as usize] += prob;
    }
    Ok(LoadPmf { probs })
}

/// Limit of the load pmf as the user density grows: every backhaul file is
/// requested.
pub fn asymptotic_load_pmf(backhaul_files: usize) -> Result<LoadPmf> {
    if backhaul_files == 0 {
        return Err(Error::domain("backhaul set must be non-empty"));
    }
    let mut probs = vec![0.0; backhaul_files];
    probs[backhaul_files - 1] = 1.0;
    Ok(LoadPmf { probs })
}
