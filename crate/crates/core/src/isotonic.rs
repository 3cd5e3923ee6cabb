//! Weighted least-squares projection onto the simple tree order
//! `{mu : mu[0] <= mu[i], i = 1..k}`.
//!
//! [`tree_isotonic`] is the Minimum Violator Algorithm: the control starts
//! alone in its block and absorbs the smallest violating treatment until
//! no treatment lies below the block's weighted mean.
//! [`brute_force_projection`] enumerates every pooling pattern and is only
//! meant as a test oracle.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedVector {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedVector {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::ParameterDomain(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if values.len() < 2 {
            return Err(Error::ParameterDomain(
                "tree order needs a control and at least one treatment".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::ParameterDomain(format!("non-finite value {v}")));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::ParameterDomain(format!(
                "weights must be positive and finite, got {w}"
            )));
        }
        Ok(WeightedVector { values, weights })
    }

    /// Unit weights.
    pub fn unweighted(values: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; values.len()];
        WeightedVector::new(values, weights)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum w_i (values_i - mu_i)^2`
    pub fn objective(&self, mu: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .zip(mu)
            .map(|((x, w), m)| w * (x - m) * (x - m))
            .sum()
    }

    /// `<u, v>_w = sum w_i u_i v_i`
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.weights.iter().zip(u).zip(v).map(|((w, a), b)| w * a * b).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeProjection {
    pub fitted: Vec<f64>,
    /// Treatments pooled with the control, in pooling order.
    pub pooled: Vec<usize>,
    pub objective: f64,
}

pub fn tree_isotonic(data: &WeightedVector) -> TreeProjection {
    let mut fitted = data.values.clone();
    let pooled = project_into(&data.values, &data.weights, &mut fitted);
    let objective = data.objective(&fitted);
    TreeProjection {
        fitted,
        pooled,
        objective,
    }
}

/// Writes the projection of `values` into `out` and returns the pooled
/// treatments. Inputs are assumed validated.
pub(crate) fn project_into(values: &[f64], weights: &[f64], out: &mut [f64]) -> Vec<usize> {
    out.copy_from_slice(values);

    // Ascending by value, ties by index: scanning this order pools the
    // minimum violator first.
    let mut order: Vec<usize> = (1..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let mut level = values[0];
    let mut mass = weights[0];
    let mut pooled = Vec::new();
    for &i in &order {
        if values[i] >= level {
            break;
        }
        level = (mass * level + weights[i] * values[i]) / (mass + weights[i]);
        mass += weights[i];
        pooled.push(i);
    }

    out[0] = level;
    for &i in &pooled {
        out[i] = level;
    }
    pooled
}

/// Largest input length the exhaustive oracle accepts.
pub const BRUTE_FORCE_MAX_LEN: usize = 6;

/// Exhaustive projection over all `2^k` pooling patterns.
///
/// For each subset `S` of treatments pooled with the control, the block
/// level is the weighted mean over `{0} + S`; the candidate is feasible when
/// every unpooled treatment sits at or above that level (within
/// `tolerance`). The feasible candidate with the smallest objective wins.
pub fn brute_force_projection(data: &WeightedVector, tolerance: f64) -> Result<TreeProjection> {
    let len = data.values.len();
    if len > BRUTE_FORCE_MAX_LEN {
        return Err(Error::ParameterDomain(format!(
            "brute-force projection is limited to {BRUTE_FORCE_MAX_LEN} entries, got {len}"
        )));
    }
    let k = len - 1;
    let mut best: Option<TreeProjection> = None;
    for mask in 0u32..(1 << k) {
        let members = |i: usize| mask & (1 << (i - 1)) != 0;
        let (mut num, mut den) = (data.weights[0] * data.values[0], data.weights[0]);
        for i in (1..len).filter(|&i| members(i)) {
            num += data.weights[i] * data.values[i];
            den += data.weights[i];
        }
        let level = num / den;
        if (1..len).any(|i| !members(i) && data.values[i] < level - tolerance) {
            continue;
        }
        let mut fitted = data.values.clone();
        fitted[0] = level;
        let pooled: Vec<usize> = (1..len).filter(|&i| members(i)).collect();
        for &i in &pooled {
            fitted[i] = level;
        }
        let objective = data.objective(&fitted);
        if best.as_ref().is_none_or(|b| objective < b.objective) {
            best = Some(TreeProjection {
                fitted,
                pooled,
                objective,
            });
        }
    }
    Ok(best.expect("pooling every treatment is feasible"))
}
