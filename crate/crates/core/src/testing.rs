//! LRT, Max-D and Min-D tests with parametric-bootstrap critical values.
//!
//! The null distributions are simulated by drawing every group afresh from
//! `N(0, S_i^2)` with the observed unbiased variances. Resample `m` draws
//! group `i` from the stream `seed / m / attempt / i`, so the three tests
//! share resamples when run with the same [`BootstrapConfig`], and the
//! results do not depend on the thread schedule.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{
    mean_and_sum_sq, mle_null, mle_tree, ConvergenceConfig, GroupedData, RestrictedMleResult, SummaryStats,
};
use crate::seed::Seed;

/// Attempts at redrawing a resample whose group variance came out zero.
pub const MAX_REDRAWS: u64 = 100;

/// Resamples may fail to estimate on at most this fraction before the
/// bootstrap is declared unstable.
pub const MAX_FAILED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TestKind {
    #[serde(rename = "lrt")]
    Lrt,
    #[serde(rename = "maxd")]
    MaxD,
    #[serde(rename = "mind")]
    MinD,
}

impl TestKind {
    pub const ALL: [TestKind; 3] = [TestKind::Lrt, TestKind::MaxD, TestKind::MinD];

    /// Lower-case identifier used on the command line and in CSV output.
    pub fn id(self) -> &'static str {
        match self {
            TestKind::Lrt => "lrt",
            TestKind::MaxD => "maxd",
            TestKind::MinD => "mind",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::Lrt => "LRT",
            TestKind::MaxD => "Max-D",
            TestKind::MinD => "Min-D",
        })
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lrt" => Ok(TestKind::Lrt),
            "maxd" | "max-d" => Ok(TestKind::MaxD),
            "mind" | "min-d" => Ok(TestKind::MinD),
            other => Err(Error::Config(format!(
                "unknown test '{other}' (expected lrt, maxd or mind)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig {
    draws: usize,
    alpha: f64,
    seed: Seed,
}

impl BootstrapConfig {
    pub fn new(draws: usize, alpha: f64, seed: Seed) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if draws < 100 {
            return Err(Error::Config(format!(
                "bootstrap size M must be at least 100, got {draws}"
            )));
        }
        if lower_rank(alpha, draws) < 1 {
            return Err(Error::Config(format!(
                "floor(alpha * M) must be at least 1 (alpha = {alpha}, M = {draws})"
            )));
        }
        if upper_rank(alpha, draws) < 1 {
            return Err(Error::Config(format!(
                "floor((1 - alpha) * M) must be at least 1 (alpha = {alpha}, M = {draws})"
            )));
        }
        Ok(BootstrapConfig { draws, alpha, seed })
    }

    pub fn draws(&self) -> usize {
        self.draws
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }
}

// Products like 0.05 * 5000 should land on the integer they denote.
const RANK_SLACK: f64 = 1e-9;

/// `floor(alpha * m)`: 1-indexed ascending rank of the LRT critical value.
pub fn lower_rank(alpha: f64, m: usize) -> usize {
    (alpha * m as f64 + RANK_SLACK).floor() as usize
}

/// `floor((1 - alpha) * m)`: 1-indexed ascending rank of the Max-D/Min-D
/// critical value.
pub fn upper_rank(alpha: f64, m: usize) -> usize {
    ((1.0 - alpha) * m as f64 + RANK_SLACK).floor() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub test: TestKind,
    pub statistic: f64,
    pub critical_value: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    /// Resamples behind the critical value.
    pub draws: usize,
    pub failed_resamples: usize,
    pub redrawn_resamples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_treatment_d: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_lower: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mle_null: Option<RestrictedMleResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mle_tree: Option<RestrictedMleResult>,
}

impl TestReport {
    pub fn decision(&self) -> &'static str {
        if self.reject {
            "Rejected"
        } else {
            "Not rejected"
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LrtFit {
    pub lambda: f64,
    pub null: RestrictedMleResult,
    pub tree: RestrictedMleResult,
}

/// Likelihood ratio `prod (sigma2_tree_i / sigma2_null_i)^(n_i/2)` with both
/// restricted MLEs.
///
/// The common-mean MLE also lies in the tree-ordered space. When the tree
/// iteration stops (within its tolerance) at a point of lower likelihood,
/// the null optimum is taken as the tree optimum as well.
pub fn lrt(stats: &SummaryStats, cfg: &ConvergenceConfig) -> Result<LrtFit> {
    let null = mle_null(stats, cfg)?;
    let mut tree = mle_tree(stats, cfg)?;
    if tree.loglik() < null.loglik() {
        tree.mu_hat = null.mu_hat.clone();
        tree.sigma2_hat = null.sigma2_hat.clone();
        tree.loglik_trace.push(null.loglik());
    }
    let log_lambda: f64 = (0..stats.n.len())
        .map(|i| 0.5 * stats.n[i] as f64 * (tree.sigma2_hat[i].ln() - null.sigma2_hat[i].ln()))
        .sum();
    Ok(LrtFit {
        lambda: log_lambda.exp(),
        null,
        tree,
    })
}

pub fn lrt_statistic(stats: &SummaryStats, cfg: &ConvergenceConfig) -> Result<f64> {
    lrt(stats, cfg).map(|fit| fit.lambda)
}

fn standard_errors(stats: &SummaryStats) -> Result<Vec<f64>> {
    let base = stats.unbiased_var[0] / stats.n[0] as f64;
    (1..stats.n.len())
        .map(|i| {
            let se = (stats.unbiased_var[i] / stats.n[i] as f64 + base).sqrt();
            if se > 0.0 && se.is_finite() {
                Ok(se)
            } else {
                Err(Error::DegenerateVariance(format!(
                    "standard error of treatment {i} minus control is zero"
                )))
            }
        })
        .collect()
}

/// `D_i = (xbar_i - xbar_0) / sqrt(S_i^2/n_i + S_0^2/n_0)`, `i = 1..k`.
pub fn d_statistics(stats: &SummaryStats) -> Result<Vec<f64>> {
    let se = standard_errors(stats)?;
    Ok(se
        .iter()
        .enumerate()
        .map(|(j, s)| (stats.mean[j + 1] - stats.mean[0]) / s)
        .collect())
}

/// Lower bounds of the one-sided simultaneous intervals
/// `(xbar_i - xbar_0 - d * se_i, inf)` for `mu_i - mu_0`.
pub fn simultaneous_ci(stats: &SummaryStats, d_max_critical: f64) -> Result<Vec<f64>> {
    if !d_max_critical.is_finite() {
        return Err(Error::ParameterDomain(format!(
            "critical value must be finite, got {d_max_critical}"
        )));
    }
    let se = standard_errors(stats)?;
    Ok(se
        .iter()
        .enumerate()
        .map(|(j, s)| stats.mean[j + 1] - stats.mean[0] - d_max_critical * s)
        .collect())
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Sorted bootstrap statistics for one observed data set.
#[derive(Debug, Clone, Default)]
pub(crate) struct NullDistribution {
    pub lrt: Vec<f64>,
    pub dmax: Vec<f64>,
    pub dmin: Vec<f64>,
    pub lrt_failed: usize,
    pub redrawn: usize,
}

impl NullDistribution {
    pub(crate) fn sorted(&self, kind: TestKind) -> &[f64] {
        match kind {
            TestKind::Lrt => &self.lrt,
            TestKind::MaxD => &self.dmax,
            TestKind::MinD => &self.dmin,
        }
    }

    pub(crate) fn critical(&self, kind: TestKind, alpha: f64) -> f64 {
        let sorted = self.sorted(kind);
        let rank = match kind {
            TestKind::Lrt => lower_rank(alpha, sorted.len()),
            _ => upper_rank(alpha, sorted.len()),
        };
        sorted[rank.max(1) - 1]
    }

    pub(crate) fn p_value(&self, kind: TestKind, observed: f64) -> f64 {
        let sorted = self.sorted(kind);
        let extreme = match kind {
            TestKind::Lrt => sorted.partition_point(|&x| x <= observed),
            _ => sorted.len() - sorted.partition_point(|&x| x < observed),
        };
        (1 + extreme) as f64 / (sorted.len() + 1) as f64
    }

    pub(crate) fn rejects(&self, kind: TestKind, alpha: f64, observed: f64) -> bool {
        let c = self.critical(kind, alpha);
        match kind {
            TestKind::Lrt => observed < c,
            _ => observed > c,
        }
    }
}

struct Resample {
    lrt: Option<f64>,
    d: Option<(f64, f64)>,
    redrawn: usize,
}

/// Simulates the null distributions requested by `want_lrt` / `want_d`.
pub(crate) fn bootstrap_null(
    stats: &SummaryStats,
    want_lrt: bool,
    want_d: bool,
    boot: &BootstrapConfig,
    cfg: &ConvergenceConfig,
    parallel: bool,
) -> Result<NullDistribution> {
    if let Some(i) = stats.unbiased_var.iter().position(|&v| v <= 0.0 || v.is_nan()) {
        return Err(Error::DegenerateVariance(format!(
            "group {i} has zero sample variance; the bootstrap law N(0, 0) is degenerate"
        )));
    }
    let sds: Vec<f64> = stats.unbiased_var.iter().map(|v| v.sqrt()).collect();
    let one = |m: usize| resample(stats, &sds, m, want_lrt, want_d, boot, cfg);
    let draws: Vec<Result<Resample>> = if parallel {
        (0..boot.draws).into_par_iter().map(one).collect()
    } else {
        (0..boot.draws).map(one).collect()
    };

    let mut out = NullDistribution::default();
    for r in draws {
        let r = r?;
        out.redrawn += r.redrawn;
        if want_lrt {
            match r.lrt {
                Some(l) => out.lrt.push(l),
                None => out.lrt_failed += 1,
            }
        }
        if let Some((hi, lo)) = r.d {
            out.dmax.push(hi);
            out.dmin.push(lo);
        }
    }
    if want_lrt && out.lrt_failed as f64 > MAX_FAILED_FRACTION * boot.draws as f64 {
        return Err(Error::BootstrapInstability {
            failed: out.lrt_failed,
            total: boot.draws,
        });
    }
    for v in [&mut out.lrt, &mut out.dmax, &mut out.dmin] {
        v.sort_by(f64::total_cmp);
    }
    Ok(out)
}

fn resample(
    stats: &SummaryStats,
    sds: &[f64],
    m: usize,
    want_lrt: bool,
    want_d: bool,
    boot: &BootstrapConfig,
    cfg: &ConvergenceConfig,
) -> Result<Resample> {
    let len = stats.n.len();
    let base = boot.seed.derive(m as u64);
    let mut buf = Vec::new();
    for attempt in 0..MAX_REDRAWS {
        let stream = base.derive(attempt);
        let mut star = SummaryStats {
            n: stats.n.clone(),
            mean: Vec::with_capacity(len),
            biased_var: Vec::with_capacity(len),
            unbiased_var: Vec::with_capacity(len),
        };
        for (i, &sd) in sds.iter().enumerate() {
            let mut rng = stream.derive(i as u64).rng();
            buf.clear();
            buf.extend((0..stats.n[i]).map(|_| sd * rng.sample::<f64, _>(StandardNormal)));
            let (mean, ss) = mean_and_sum_sq(&buf);
            star.mean.push(mean);
            star.biased_var.push(ss / stats.n[i] as f64);
            star.unbiased_var.push(ss / (stats.n[i] - 1) as f64);
        }
        if star.unbiased_var.iter().any(|&v| v <= 0.0 || v.is_nan()) {
            continue;
        }
        let lrt = if want_lrt { lrt_statistic(&star, cfg).ok() } else { None };
        let d = if want_d {
            let d = d_statistics(&star)?;
            Some((max_of(&d), min_of(&d)))
        } else {
            None
        };
        return Ok(Resample {
            lrt,
            d,
            redrawn: attempt as usize,
        });
    }
    Err(Error::DegenerateVariance(format!(
        "bootstrap resample {m} stayed degenerate after {MAX_REDRAWS} redraws"
    )))
}

/// Runs the selected tests on shared bootstrap resamples, in the order given.
pub fn run_tests(
    data: &GroupedData,
    tests: &[TestKind],
    boot: &BootstrapConfig,
    cfg: &ConvergenceConfig,
) -> Result<Vec<TestReport>> {
    let stats = data.summarize();
    let want_lrt = tests.contains(&TestKind::Lrt);
    let want_d = tests.iter().any(|t| *t != TestKind::Lrt);

    let observed_lrt = if want_lrt { Some(lrt(&stats, cfg)?) } else { None };
    let observed_d = if want_d { Some(d_statistics(&stats)?) } else { None };
    let null = bootstrap_null(&stats, want_lrt, want_d, boot, cfg, true)?;

    let mut reports = Vec::with_capacity(tests.len());
    for &kind in tests {
        let statistic = match kind {
            TestKind::Lrt => observed_lrt.as_ref().map(|f| f.lambda),
            TestKind::MaxD => observed_d.as_deref().map(max_of),
            TestKind::MinD => observed_d.as_deref().map(min_of),
        }
        .expect("observed statistic computed for every requested test");
        let critical_value = null.critical(kind, boot.alpha);
        let mut report = TestReport {
            test: kind,
            statistic,
            critical_value,
            p_value: null.p_value(kind, statistic),
            reject: null.rejects(kind, boot.alpha, statistic),
            alpha: boot.alpha,
            draws: null.sorted(kind).len(),
            failed_resamples: if kind == TestKind::Lrt { null.lrt_failed } else { 0 },
            redrawn_resamples: null.redrawn,
            per_treatment_d: None,
            ci_lower: None,
            mle_null: None,
            mle_tree: None,
        };
        match kind {
            TestKind::Lrt => {
                let fit = observed_lrt.clone().expect("LRT fitted");
                report.mle_null = Some(fit.null);
                report.mle_tree = Some(fit.tree);
            }
            TestKind::MaxD => {
                report.per_treatment_d = observed_d.clone();
                report.ci_lower = Some(simultaneous_ci(&stats, critical_value)?);
            }
            TestKind::MinD => report.per_treatment_d = observed_d.clone(),
        }
        reports.push(report);
    }
    Ok(reports)
}

pub fn run_lrt(data: &GroupedData, boot: &BootstrapConfig, cfg: &ConvergenceConfig) -> Result<TestReport> {
    Ok(run_tests(data, &[TestKind::Lrt], boot, cfg)?.remove(0))
}

pub fn run_maxd(data: &GroupedData, boot: &BootstrapConfig) -> Result<TestReport> {
    Ok(run_tests(data, &[TestKind::MaxD], boot, &ConvergenceConfig::default())?.remove(0))
}

pub fn run_mind(data: &GroupedData, boot: &BootstrapConfig) -> Result<TestReport> {
    Ok(run_tests(data, &[TestKind::MinD], boot, &ConvergenceConfig::default())?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pain_study_summary() -> SummaryStats {
        SummaryStats::from_unbiased(
            vec![23, 25, 22, 28],
            vec![-0.4134783, 0.2344000, 1.0504545, 0.9367857],
            vec![1.416596, 3.422117, 7.297271, 1.935926],
        )
        .unwrap()
    }

    fn sample(seed: u64, sizes: &[usize], means: &[f64], sds: &[f64]) -> GroupedData {
        let mut rng = Seed::new(seed).rng();
        GroupedData::new(
            sizes
                .iter()
                .zip(means.iter().zip(sds))
                .map(|(&n, (&m, &s))| (0..n).map(|_| m + s * rng.sample::<f64, _>(StandardNormal)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn ranks_match_published_budget() {
        assert_eq!(lower_rank(0.05, 5000), 250);
        assert_eq!(upper_rank(0.05, 5000), 4750);
        assert_eq!(lower_rank(0.05, 1000), 50);
        assert_eq!(upper_rank(0.05, 1000), 950);
        assert_eq!(lower_rank(0.1, 100), 10);
    }

    #[test]
    fn config_budget_floor() {
        assert!(BootstrapConfig::new(2, 0.5, Seed::new(1)).is_err());
        assert!(BootstrapConfig::new(100, 0.0, Seed::new(1)).is_err());
        assert!(BootstrapConfig::new(100, 0.005, Seed::new(1)).is_err());
        assert!(BootstrapConfig::new(100, 0.01, Seed::new(1)).is_ok());
    }

    #[test]
    fn critical_value_is_order_statistic() {
        // Naive reference: sort and index by the 1-based rank.
        let mut values: Vec<f64> = (0..137).map(|i| ((i * 7919) % 137) as f64 / 3.0).collect();
        let null = NullDistribution {
            lrt: {
                values.sort_by(f64::total_cmp);
                values.clone()
            },
            dmax: values.clone(),
            dmin: values.clone(),
            ..Default::default()
        };
        let alpha = 0.05;
        assert_eq!(
            null.critical(TestKind::Lrt, alpha),
            values[(0.05f64 * 137.0).floor() as usize - 1]
        );
        assert_eq!(
            null.critical(TestKind::MaxD, alpha),
            values[(0.95f64 * 137.0).floor() as usize - 1]
        );
    }

    #[test]
    fn p_values_at_extremes() {
        let sorted: Vec<f64> = (1..=200).map(|i| i as f64).collect();
        let null = NullDistribution {
            lrt: sorted.clone(),
            dmax: sorted.clone(),
            dmin: sorted,
            ..Default::default()
        };
        assert_eq!(null.p_value(TestKind::Lrt, 0.5), 1.0 / 201.0);
        assert!(null.rejects(TestKind::Lrt, 0.05, 0.5));
        assert_eq!(null.p_value(TestKind::MaxD, 1000.0), 1.0 / 201.0);
        assert!(null.rejects(TestKind::MaxD, 0.05, 1000.0));
        assert_eq!(null.p_value(TestKind::MaxD, -1.0), 1.0);
        assert!(!null.rejects(TestKind::MinD, 0.05, -1.0));
    }

    #[test]
    fn d_statistics_from_pain_study() {
        let d = d_statistics(&pain_study_summary()).unwrap();
        assert!((d[0] - 1.4542517).abs() < 1e-6, "{d:?}");
        assert!((d[2] - 3.7344682).abs() < 1e-6, "{d:?}");
        assert!((max_of(&d) - 3.7344682).abs() < 1e-6);
        assert!((min_of(&d) - 1.4542517).abs() < 1e-6);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn d_statistics_hand_example() {
        let s = SummaryStats::from_unbiased(vec![4, 4], vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let d = d_statistics(&s).unwrap();
        assert!((d[0] - 1.0 / 0.5f64.sqrt()).abs() < 1e-12);
        assert!((d[0] - 1.4142136).abs() < 1e-7);
    }

    #[test]
    fn identical_groups_give_zero_d() {
        let s = SummaryStats::from_unbiased(vec![5, 5, 5], vec![2.0; 3], vec![1.5; 3]).unwrap();
        assert_eq!(d_statistics(&s).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn zero_standard_error_is_degenerate() {
        let s = SummaryStats::from_unbiased(vec![5, 5], vec![2.0, 3.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(d_statistics(&s), Err(Error::DegenerateVariance(_))));
    }

    #[test]
    fn simultaneous_ci_from_pain_study() {
        let ci = simultaneous_ci(&pain_study_summary(), 2.1667720).unwrap();
        for (got, want) in ci.iter().zip([-0.3174323, 0.1050967, 0.5668287]) {
            assert!((got - want).abs() < 5e-4, "{got} vs {want}");
        }
    }

    #[test]
    fn simultaneous_ci_monotone_in_critical_value() {
        let s = pain_study_summary();
        let zero = simultaneous_ci(&s, 0.0).unwrap();
        for (j, lb) in zero.iter().enumerate() {
            assert!((lb - (s.mean[j + 1] - s.mean[0])).abs() < 1e-15);
        }
        let one = simultaneous_ci(&s, 2.1667720).unwrap();
        let two = simultaneous_ci(&s, 2.0 * 2.1667720).unwrap();
        assert!(one.iter().zip(&two).all(|(a, b)| b < a));
        assert!(simultaneous_ci(&s, f64::NAN).is_err());
    }

    #[test]
    fn lrt_is_one_when_means_agree() {
        let data = GroupedData::new(vec![vec![1.0, 3.0, 2.0], vec![0.0, 4.0], vec![2.0, 2.5, 1.5]]).unwrap();
        let lambda = lrt_statistic(&data.summarize(), &ConvergenceConfig::default()).unwrap();
        assert!((lambda - 1.0).abs() < 1e-12, "{lambda}");
    }

    #[test]
    fn lrt_never_exceeds_one() {
        let cfg = ConvergenceConfig::default();
        for seed in 0..200 {
            let data = sample(seed, &[5, 6, 9, 4], &[0.3, 0.0, 0.5, -0.2], &[1.0, 2.0, 0.7, 3.0]);
            let lambda = lrt_statistic(&data.summarize(), &cfg).unwrap();
            assert!(lambda > 0.0 && lambda <= 1.0 + 1e-12, "seed {seed}: {lambda}");
        }
    }

    #[test]
    fn statistics_are_location_and_scale_invariant() {
        let cfg = ConvergenceConfig::default();
        let data = sample(4, &[8, 7, 9], &[0.0, 0.8, 1.1], &[1.0, 2.0, 1.5]);
        let base = data.summarize();
        let d0 = d_statistics(&base).unwrap();
        let l0 = lrt_statistic(&base, &cfg).unwrap();
        for transformed in [
            data.map_values(|x| x + 12.5).unwrap(),
            data.map_values(|x| 3.0 * x).unwrap(),
        ] {
            let s = transformed.summarize();
            let d = d_statistics(&s).unwrap();
            assert!(d.iter().zip(&d0).all(|(a, b)| (a - b).abs() < 1e-10));
            assert!((lrt_statistic(&s, &cfg).unwrap() - l0).abs() < 1e-10);
        }
    }

    #[test]
    fn single_treatment_max_and_min_agree() {
        let data = sample(5, &[10, 12], &[0.0, 0.5], &[1.0, 1.0]);
        let boot = BootstrapConfig::new(200, 0.05, Seed::new(17)).unwrap();
        let hi = run_maxd(&data, &boot).unwrap();
        let lo = run_mind(&data, &boot).unwrap();
        assert_eq!(hi.statistic, lo.statistic);
        assert_eq!(hi.critical_value, lo.critical_value);
        assert_eq!(hi.p_value, lo.p_value);
        assert_eq!(hi.reject, lo.reject);
    }

    #[test]
    fn bootstrap_is_shift_invariant() {
        let data = sample(6, &[6, 6, 6], &[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0]);
        let boot = BootstrapConfig::new(200, 0.05, Seed::new(3)).unwrap();
        let cfg = ConvergenceConfig::default();
        let a = run_tests(&data, &TestKind::ALL, &boot, &cfg).unwrap();
        let b = run_tests(&data.map_values(|x| x - 40.0).unwrap(), &TestKind::ALL, &boot, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.statistic - y.statistic).abs() < 1e-9);
            assert!((x.critical_value - y.critical_value).abs() < 1e-9);
            assert_eq!(x.reject, y.reject);
        }
    }

    #[test]
    fn reports_are_deterministic_across_pools() {
        let data = sample(7, &[5, 8, 6], &[0.0, 0.4, 0.9], &[1.0, 1.0, 2.0]);
        let boot = BootstrapConfig::new(300, 0.05, Seed::new(8)).unwrap();
        let cfg = ConvergenceConfig::default();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_tests(&data, &TestKind::ALL, &boot, &cfg).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn maxd_rejection_agrees_with_intervals() {
        let boot = BootstrapConfig::new(400, 0.05, Seed::new(21)).unwrap();
        for seed in 0..20 {
            let data = sample(
                100 + seed,
                &[10, 10, 10],
                &[0.0, 0.3 * seed as f64 / 10.0, 0.6],
                &[1.0, 1.5, 2.0],
            );
            let r = run_maxd(&data, &boot).unwrap();
            let ci = r.ci_lower.as_ref().unwrap();
            // skip boundary instances
            if (r.statistic - r.critical_value).abs() < 1e-9 {
                continue;
            }
            assert_eq!(r.reject, ci.iter().any(|&lb| lb > 0.0), "seed {seed}");
        }
    }

    #[test]
    fn constant_group_cannot_be_bootstrapped() {
        let data = GroupedData::new(vec![vec![1.0, 1.0, 1.0], vec![0.0, 2.0, 1.0]]).unwrap();
        let boot = BootstrapConfig::new(100, 0.05, Seed::new(1)).unwrap();
        assert!(matches!(run_mind(&data, &boot), Err(Error::DegenerateVariance(_))));
    }

    #[test]
    fn test_kind_parsing() {
        assert_eq!("LRT".parse::<TestKind>().unwrap(), TestKind::Lrt);
        assert_eq!("max-d".parse::<TestKind>().unwrap(), TestKind::MaxD);
        assert_eq!("mind".parse::<TestKind>().unwrap(), TestKind::MinD);
        assert!("anova".parse::<TestKind>().is_err());
    }
}
