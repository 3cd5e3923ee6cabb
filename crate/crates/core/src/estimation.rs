//! Group data, summary statistics and maximum likelihood estimation of
//! `(mu, sigma^2)` under the common-mean null and under the tree order.
//!
//! Both estimators alternate between a mean step (weighted mean, or tree
//! projection, with weights `n_i / sigma_i^2`) and a variance step
//! `sigma_i^2 = (1/n_i) sum_j (x_ij - mu_i)^2 = s_i^2 + (xbar_i - mu_i)^2`.
//! Each step maximizes the log-likelihood in its block, so the likelihood
//! never decreases along the iterates.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::isotonic::project_into;

/// Floor applied to variances before forming weights.
pub const VARIANCE_FLOOR: f64 = 1e-300;

/// Observations per group; index 0 is the control.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedData {
    groups: Vec<Vec<f64>>,
}

impl GroupedData {
    pub fn new(groups: Vec<Vec<f64>>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "need a control and at least one treatment (k >= 1), got {} group(s)",
                groups.len()
            )));
        }
        for (i, g) in groups.iter().enumerate() {
            if g.len() < 2 {
                return Err(Error::InsufficientData(format!(
                    "group {i} has {} observation(s); at least 2 are required",
                    g.len()
                )));
            }
            if let Some(x) = g.iter().find(|x| !x.is_finite()) {
                return Err(Error::InsufficientData(format!(
                    "group {i} contains non-finite value {x}"
                )));
            }
        }
        Ok(GroupedData { groups })
    }

    pub fn groups(&self) -> &[Vec<f64>] {
        &self.groups
    }

    /// Number of treatments.
    pub fn k(&self) -> usize {
        self.groups.len() - 1
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn summarize(&self) -> SummaryStats {
        summarize(self)
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<GroupedData> {
        GroupedData::new(self.groups.iter().map(|g| g.iter().map(|&x| f(x)).collect()).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: Vec<usize>,
    pub mean: Vec<f64>,
    /// `s_i^2 = (1/n_i) sum (x - xbar_i)^2`
    pub biased_var: Vec<f64>,
    /// `S_i^2 = (1/(n_i - 1)) sum (x - xbar_i)^2`
    pub unbiased_var: Vec<f64>,
}

pub fn summarize(data: &GroupedData) -> SummaryStats {
    let len = data.groups.len();
    let mut stats = SummaryStats {
        n: Vec::with_capacity(len),
        mean: Vec::with_capacity(len),
        biased_var: Vec::with_capacity(len),
        unbiased_var: Vec::with_capacity(len),
    };
    for g in &data.groups {
        let (mean, ss) = mean_and_sum_sq(g);
        let n = g.len();
        stats.n.push(n);
        stats.mean.push(mean);
        stats.biased_var.push(ss / n as f64);
        stats.unbiased_var.push(ss / (n - 1) as f64);
    }
    stats
}

/// Two-pass mean and centered sum of squares.
pub(crate) fn mean_and_sum_sq(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, ss)
}

impl SummaryStats {
    /// Builds statistics from published summaries (sizes, means, unbiased
    /// variances).
    pub fn from_unbiased(n: Vec<usize>, mean: Vec<f64>, unbiased_var: Vec<f64>) -> Result<Self> {
        if n.len() != mean.len() || n.len() != unbiased_var.len() {
            return Err(Error::InsufficientData("summary vectors differ in length".into()));
        }
        if n.len() < 2 {
            return Err(Error::InsufficientData(
                "need a control and at least one treatment".into(),
            ));
        }
        if let Some(i) = n.iter().position(|&ni| ni < 2) {
            return Err(Error::InsufficientData(format!(
                "group {i} has fewer than 2 observations"
            )));
        }
        if mean.iter().chain(&unbiased_var).any(|v| !v.is_finite()) || unbiased_var.iter().any(|&v| v < 0.0) {
            return Err(Error::InsufficientData(
                "summaries must be finite with non-negative variances".into(),
            ));
        }
        let biased_var = n
            .iter()
            .zip(&unbiased_var)
            .map(|(&ni, &v)| v * (ni - 1) as f64 / ni as f64)
            .collect();
        Ok(SummaryStats {
            n,
            mean,
            biased_var,
            unbiased_var,
        })
    }

    pub fn k(&self) -> usize {
        self.n.len() - 1
    }

    pub fn total(&self) -> usize {
        self.n.iter().sum()
    }

    /// `(1/n_i) sum_j (x_ij - mu)^2`
    #[inline]
    pub fn variance_about(&self, i: usize, mu: f64) -> f64 {
        let d = self.mean[i] - mu;
        self.biased_var[i] + d * d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Null,
    Tree,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Null => "null",
            Space::Tree => "tree",
        })
    }
}

/// Stopping rule: both `max |delta mu|` and `max |delta sigma^2|` at most
/// `10^-tol_exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConvergenceConfig {
    tol_exponent: u32,
    max_iterations: usize,
}

impl ConvergenceConfig {
    pub fn new(tol_exponent: u32, max_iterations: usize) -> Result<Self> {
        if tol_exponent < 3 {
            return Err(Error::Config(format!(
                "convergence exponent p must be at least 3, got {tol_exponent}"
            )));
        }
        if max_iterations == 0 {
            return Err(Error::Config("max_iterations must be positive".into()));
        }
        Ok(ConvergenceConfig {
            tol_exponent,
            max_iterations,
        })
    }

    pub fn tol_exponent(&self) -> u32 {
        self.tol_exponent
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn tolerance(&self) -> f64 {
        10f64.powi(-(self.tol_exponent as i32))
    }
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            tol_exponent: 6,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictedMleResult {
    pub space: Space,
    pub mu_hat: Vec<f64>,
    pub sigma2_hat: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood (without the additive constant) after every iteration.
    pub loglik_trace: Vec<f64>,
}

impl RestrictedMleResult {
    pub fn loglik(&self) -> f64 {
        *self.loglik_trace.last().expect("at least one iteration runs")
    }
}

/// `-sum (n_i/2) ln sigma_i^2 - sum (1/(2 sigma_i^2)) sum_j (x_ij - mu_i)^2`
pub fn log_likelihood(stats: &SummaryStats, mu: &[f64], sigma2: &[f64]) -> f64 {
    (0..stats.n.len())
        .map(|i| {
            let n = stats.n[i] as f64;
            -0.5 * n * sigma2[i].ln() - 0.5 * n * stats.variance_about(i, mu[i]) / sigma2[i]
        })
        .sum()
}

fn weights_into(stats: &SummaryStats, sigma2: &[f64], w: &mut [f64]) {
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = stats.n[i] as f64 / sigma2[i].max(VARIANCE_FLOOR);
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Common-mean MLE by fixed-point iteration from the grand mean.
pub fn mle_null(stats: &SummaryStats, cfg: &ConvergenceConfig) -> Result<RestrictedMleResult> {
    let total = stats.total() as f64;
    let grand = stats.n.iter().zip(&stats.mean).map(|(&n, m)| n as f64 * m).sum::<f64>() / total;
    let len = stats.n.len();
    let mu = vec![grand; len];
    let sigma2: Vec<f64> = (0..len).map(|i| stats.variance_about(i, grand)).collect();

    iterate(stats, cfg, Space::Null, mu, sigma2, |stats, w, mu| {
        let (num, den) = (0..w.len()).fold((0.0, 0.0), |(num, den), i| (num + w[i] * stats.mean[i], den + w[i]));
        mu.fill(num / den);
    })
}

/// Tree-order MLE: starts at the unrestricted MLE and alternates tree
/// isotonic regression of the group means with the variance update.
pub fn mle_tree(stats: &SummaryStats, cfg: &ConvergenceConfig) -> Result<RestrictedMleResult> {
    let mu = stats.mean.clone();
    let sigma2 = stats.biased_var.clone();
    iterate(stats, cfg, Space::Tree, mu, sigma2, |stats, w, mu| {
        project_into(&stats.mean, w, mu);
    })
}

fn iterate(
    stats: &SummaryStats,
    cfg: &ConvergenceConfig,
    space: Space,
    mut mu: Vec<f64>,
    mut sigma2: Vec<f64>,
    mean_step: impl Fn(&SummaryStats, &[f64], &mut [f64]),
) -> Result<RestrictedMleResult> {
    let len = mu.len();
    let tol = cfg.tolerance();
    let mut w = vec![0.0; len];
    let mut next_mu = vec![0.0; len];
    let mut next_sigma2 = vec![0.0; len];
    // Starting points need not be feasible, so only iterates are traced.
    let mut trace = Vec::new();

    for iteration in 1..=cfg.max_iterations() {
        weights_into(stats, &sigma2, &mut w);
        mean_step(stats, &w, &mut next_mu);
        for i in 0..len {
            next_sigma2[i] = stats.variance_about(i, next_mu[i]);
        }
        let done = max_abs_diff(&mu, &next_mu) <= tol && max_abs_diff(&sigma2, &next_sigma2) <= tol;
        std::mem::swap(&mut mu, &mut next_mu);
        std::mem::swap(&mut sigma2, &mut next_sigma2);
        trace.push(log_likelihood(stats, &mu, &sigma2));

        if done {
            if let Some(group) = sigma2.iter().position(|&s| s <= VARIANCE_FLOOR) {
                return Err(Error::DegenerateLikelihood { group });
            }
            return Ok(RestrictedMleResult {
                space,
                mu_hat: mu,
                sigma2_hat: sigma2,
                iterations: iteration,
                converged: true,
                loglik_trace: trace,
            });
        }
    }

    if let Some(group) = sigma2.iter().position(|&s| s <= VARIANCE_FLOOR) {
        return Err(Error::DegenerateLikelihood { group });
    }
    Err(Error::Convergence {
        space,
        iterations: cfg.max_iterations(),
        loglik_trace: trace,
        condition1_violated: !check_condition1(stats).all_pass(),
    })
}

/// Per-group evaluation of `s_i^2 > max{(xbar_i - a)^2, (xbar_i - b)^2}`
/// with `a = min xbar`, `b = max xbar`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition1Report {
    pub a: f64,
    pub b: f64,
    pub passes: Vec<bool>,
}

impl Condition1Report {
    pub fn all_pass(&self) -> bool {
        self.passes.iter().all(|&p| p)
    }

    pub fn failing_groups(&self) -> Vec<usize> {
        self.passes
            .iter()
            .enumerate()
            .filter(|(_, &p)| !p)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Sufficient condition for a unique tree-order MLE. A failure is a warning.
pub fn check_condition1(stats: &SummaryStats) -> Condition1Report {
    let a = stats.mean.iter().copied().fold(f64::INFINITY, f64::min);
    let b = stats.mean.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let passes = stats
        .mean
        .iter()
        .zip(&stats.biased_var)
        .map(|(&m, &s2)| s2 > (m - a).powi(2).max((m - b).powi(2)))
        .collect();
    Condition1Report { a, b, passes }
}
