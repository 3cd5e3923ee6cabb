//! Monte-Carlo size and power of the bootstrap tests.
//!
//! Replication `r` draws group `i` from the stream `seed / r / DATA / i` and
//! its bootstrap resamples from `seed / r / BOOTSTRAP`. Replications run on
//! the current rayon pool and are merged by index, so results do not depend
//! on the worker count.
//!
//! Within a replication the standardized errors `W` are drawn once and every
//! power-curve point uses `X = c * mu + sigma * W`. The bootstrap law only
//! depends on the group variances, which do not change with `c`, so one set
//! of bootstrap statistics serves the whole curve.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, Standardized};
use crate::error::{Error, Result};
use crate::estimation::{mean_and_sum_sq, ConvergenceConfig, SummaryStats};
use crate::seed::{self, Seed};
use crate::testing::{bootstrap_null, d_statistics, lrt_statistic, BootstrapConfig, NullDistribution, TestKind};

/// Smallest accepted number of replications.
pub const MIN_REPLICATIONS: usize = 100;

fn default_tests() -> Vec<TestKind> {
    TestKind::ALL.to_vec()
}

fn default_alpha() -> f64 {
    0.05
}

fn default_bootstrap() -> usize {
    1000
}

fn default_convergence_p() -> u32 {
    6
}

/// One study cell. In JSON:
///
/// ```json
/// {"mu": [0, 0, 0], "sigma2": [1, 2, 5], "n": [5, 5, 5],
///  "replications": 2000, "bootstrap": 1000, "seed": 42}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub mu: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub n: Vec<usize>,
    #[serde(default)]
    pub distribution: DistributionSpec,
    #[serde(default = "default_tests")]
    pub tests: Vec<TestKind>,
    pub replications: usize,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_grid: Option<Vec<f64>>,
    #[serde(default = "default_convergence_p")]
    pub convergence_p: u32,
}

impl SimulationSpec {
    /// Normal errors, all tests, alpha 0.05, M = 1000, no power grid.
    pub fn new(mu: Vec<f64>, sigma2: Vec<f64>, n: Vec<usize>, replications: usize, seed: u64) -> Self {
        SimulationSpec {
            mu,
            sigma2,
            n,
            distribution: DistributionSpec::standard_normal(),
            tests: default_tests(),
            replications,
            bootstrap: default_bootstrap(),
            alpha: default_alpha(),
            seed,
            c_grid: None,
            convergence_p: default_convergence_p(),
        }
    }

    pub fn k(&self) -> usize {
        self.mu.len().saturating_sub(1)
    }

    /// Checks every invariant shared by size and power cells.
    pub fn validate(&self) -> Result<()> {
        let len = self.mu.len();
        if len < 2 {
            return Err(Error::Config("mu needs a control and at least one treatment".into()));
        }
        if self.sigma2.len() != len || self.n.len() != len {
            return Err(Error::Config(format!(
                "mu, sigma2 and n must have equal lengths, got {}, {} and {}",
                len,
                self.sigma2.len(),
                self.n.len()
            )));
        }
        if let Some(m) = self.mu.iter().find(|m| !m.is_finite()) {
            return Err(Error::Config(format!("mu must be finite, got {m}")));
        }
        if let Some(v) = self.sigma2.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Config(format!("sigma2 entries must be positive, got {v}")));
        }
        if let Some(n) = self.n.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("every group needs n >= 2, got {n}")));
        }
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::Config(format!(
                "replications must be at least {MIN_REPLICATIONS}, got {}",
                self.replications
            )));
        }
        if self.tests.is_empty() {
            return Err(Error::Config("tests must name at least one test".into()));
        }
        for (i, t) in self.tests.iter().enumerate() {
            if self.tests[..i].contains(t) {
                return Err(Error::Config(format!("test {t} listed twice")));
            }
        }
        if let Some(grid) = &self.c_grid {
            if grid.is_empty() {
                return Err(Error::Config("c_grid must not be empty".into()));
            }
            if let Some(c) = grid.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
                return Err(Error::Config(format!(
                    "c_grid entries must be finite and non-negative, got {c}"
                )));
            }
        }
        self.bootstrap_config()?;
        self.convergence()?;
        self.distribution.validate().map_err(into_config)?;
        self.distribution.theoretical_moments().map_err(into_config)?;
        Ok(())
    }

    fn bootstrap_config(&self) -> Result<BootstrapConfig> {
        BootstrapConfig::new(self.bootstrap, self.alpha, Seed::new(self.seed))
    }

    fn convergence(&self) -> Result<ConvergenceConfig> {
        ConvergenceConfig::new(self.convergence_p, 10_000)
    }

    fn is_null(&self) -> bool {
        self.mu.iter().all(|&m| m == self.mu[0])
    }

    fn is_tree_alternative(&self) -> bool {
        self.mu[1..].iter().all(|&m| m >= self.mu[0]) && self.mu[1..].iter().any(|&m| m > self.mu[0])
    }
}

fn into_config(e: Error) -> Error {
    match e {
        Error::ParameterDomain(m) | Error::UnsupportedMoments(m) => Error::Config(format!("distribution: {m}")),
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestRate {
    pub test: TestKind,
    pub rejections: usize,
    /// Replications that produced a decision.
    pub valid: usize,
    pub failed: usize,
    pub rejection_rate: f64,
    pub mc_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub c: f64,
    pub rates: Vec<TestRate>,
}

impl GridPoint {
    pub fn rate(&self, test: TestKind) -> Option<&TestRate> {
        self.rates.iter().find(|r| r.test == test)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub spec: SimulationSpec,
    /// One point with `c = 1` unless the spec carries a grid.
    pub points: Vec<GridPoint>,
    /// Replications in which at least one test failed to decide.
    pub replications_failed: usize,
    /// Wall-clock time; left out of serialized output so reruns compare equal.
    #[serde(skip)]
    pub elapsed_secs: f64,
}

impl SimulationResult {
    /// Rate at the first grid point.
    pub fn rate(&self, test: TestKind) -> Option<&TestRate> {
        self.points.first().and_then(|p| p.rate(test))
    }
}

/// Empirical size. `mu` must be constant and `c_grid` absent.
pub fn estimate_size(spec: &SimulationSpec) -> Result<SimulationResult> {
    spec.validate()?;
    if !spec.is_null() {
        return Err(Error::Config("estimate_size needs a constant mu".into()));
    }
    if spec.c_grid.is_some() {
        return Err(Error::Config("estimate_size does not take a c_grid".into()));
    }
    run(spec)
}

/// Empirical power at `mu`, or at `c * mu` for every `c` of the grid.
pub fn estimate_power(spec: &SimulationSpec) -> Result<SimulationResult> {
    spec.validate()?;
    if !spec.is_tree_alternative() {
        return Err(Error::Config(
            "estimate_power needs mu_0 <= mu_i for all i with at least one strict inequality".into(),
        ));
    }
    run(spec)
}

// Decision of each test (in spec order) at each grid point; None = failed.
type Decisions = Vec<Vec<Option<bool>>>;

fn run(spec: &SimulationSpec) -> Result<SimulationResult> {
    let start = Instant::now();
    let grid = spec.c_grid.clone().unwrap_or_else(|| vec![1.0]);
    let boot = spec.bootstrap_config()?;
    let cfg = spec.convergence()?;
    let errors = Standardized::new(&spec.distribution).map_err(into_config)?;
    let root = Seed::new(spec.seed);

    let decisions: Vec<Decisions> = (0..spec.replications)
        .into_par_iter()
        .map(|r| replicate(spec, &grid, &errors, &root, r as u64, &boot, &cfg))
        .collect();

    let mut points: Vec<GridPoint> = grid
        .iter()
        .map(|&c| GridPoint {
            c,
            rates: spec
                .tests
                .iter()
                .map(|&test| TestRate {
                    test,
                    rejections: 0,
                    valid: 0,
                    failed: 0,
                    rejection_rate: 0.0,
                    mc_se: 0.0,
                })
                .collect(),
        })
        .collect();
    let mut replications_failed = 0;
    for rep in &decisions {
        let mut any_failed = false;
        for (point, per_test) in points.iter_mut().zip(rep) {
            for (rate, decision) in point.rates.iter_mut().zip(per_test) {
                match decision {
                    Some(reject) => {
                        rate.valid += 1;
                        rate.rejections += *reject as usize;
                    }
                    None => {
                        rate.failed += 1;
                        any_failed = true;
                    }
                }
            }
        }
        replications_failed += any_failed as usize;
    }
    for rate in points.iter_mut().flat_map(|p| p.rates.iter_mut()) {
        if rate.valid > 0 {
            let r = rate.rejections as f64 / rate.valid as f64;
            rate.rejection_rate = r;
            rate.mc_se = (r * (1.0 - r) / rate.valid as f64).sqrt();
        } else {
            rate.rejection_rate = f64::NAN;
            rate.mc_se = f64::NAN;
        }
    }
    Ok(SimulationResult {
        spec: spec.clone(),
        points,
        replications_failed,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

fn replicate(
    spec: &SimulationSpec,
    grid: &[f64],
    errors: &Standardized,
    root: &Seed,
    r: u64,
    boot: &BootstrapConfig,
    cfg: &ConvergenceConfig,
) -> Decisions {
    let rep = root.derive(r);
    let data_seed = rep.derive(seed::DATA);
    let len = spec.mu.len();

    // Summaries of the standardized errors; shifting and scaling are applied
    // to the summaries below.
    let mut w_mean = Vec::with_capacity(len);
    let mut w_ss = Vec::with_capacity(len);
    let mut buf = Vec::new();
    for i in 0..len {
        let mut rng = data_seed.derive(i as u64).rng();
        buf.clear();
        buf.extend((0..spec.n[i]).map(|_| errors.draw(&mut rng)));
        let (m, ss) = mean_and_sum_sq(&buf);
        w_mean.push(m);
        w_ss.push(ss);
    }
    let observed = |c: f64| SummaryStats {
        n: spec.n.clone(),
        mean: (0..len)
            .map(|i| c * spec.mu[i] + spec.sigma2[i].sqrt() * w_mean[i])
            .collect(),
        biased_var: (0..len).map(|i| spec.sigma2[i] * w_ss[i] / spec.n[i] as f64).collect(),
        unbiased_var: (0..len)
            .map(|i| spec.sigma2[i] * w_ss[i] / (spec.n[i] - 1) as f64)
            .collect(),
    };

    let want_lrt = spec.tests.contains(&TestKind::Lrt);
    let want_d = spec.tests.iter().any(|&t| t != TestKind::Lrt);
    let boot = BootstrapConfig::new(boot.draws(), boot.alpha(), rep.derive(seed::BOOTSTRAP))
        .expect("validated bootstrap config");
    let base = observed(1.0);
    let null = bootstrap_null(&base, want_lrt, want_d, &boot, cfg, false);
    let (null, lrt_ok) = match null {
        Ok(null) => (Some(null), want_lrt),
        Err(Error::BootstrapInstability { .. }) if want_d => {
            (bootstrap_null(&base, false, true, &boot, cfg, false).ok(), false)
        }
        Err(_) => (None, false),
    };

    grid.iter()
        .map(|&c| {
            let stats = observed(c);
            let d = d_statistics(&stats).ok();
            spec.tests
                .iter()
                .map(|&test| {
                    let null: &NullDistribution = null.as_ref()?;
                    let statistic = match test {
                        TestKind::Lrt if lrt_ok => lrt_statistic(&stats, cfg).ok()?,
                        TestKind::Lrt => return None,
                        TestKind::MaxD => d.as_ref()?.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                        TestKind::MinD => d.as_ref()?.iter().copied().fold(f64::INFINITY, f64::min),
                    };
                    Some(null.rejects(test, boot.alpha(), statistic))
                })
                .collect()
        })
        .collect()
}

/// Outcome of one grid cell.
#[derive(Debug)]
pub struct CellOutcome {
    pub index: usize,
    pub result: Result<SimulationResult>,
}

/// Runs every cell; cells with a non-constant mean or a `c_grid` go through
/// [`estimate_power`], the rest through [`estimate_size`]. A failing cell
/// does not stop the others.
pub fn run_grid(specs: &[SimulationSpec]) -> Result<Vec<CellOutcome>> {
    if specs.is_empty() {
        return Err(Error::Config("grid has no cells".into()));
    }
    Ok(specs
        .iter()
        .enumerate()
        .map(|(index, spec)| {
            let result = if spec.c_grid.is_some() || (spec.mu.len() >= 2 && !spec.is_null()) {
                estimate_power(spec)
            } else {
                estimate_size(spec)
            };
            CellOutcome { index, result }
        })
        .collect())
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub k: usize,
    pub n_vec: String,
    pub sigma2_vec: String,
    pub mu_vec: String,
    pub c: f64,
    pub distribution: String,
    pub test: String,
    pub alpha: f64,
    #[serde(rename = "P")]
    pub p: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub rejection_rate: f64,
    pub mc_se: f64,
    pub seed: u64,
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join("|")
}

impl SimulationResult {
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let s = &self.spec;
        self.points
            .iter()
            .flat_map(|point| {
                point.rates.iter().map(move |rate| CsvRow {
                    k: s.k(),
                    n_vec: join(&s.n),
                    sigma2_vec: join(&s.sigma2),
                    mu_vec: join(&s.mu),
                    c: point.c,
                    distribution: s.distribution.to_string(),
                    test: rate.test.id().to_string(),
                    alpha: s.alpha,
                    p: s.replications,
                    m: s.bootstrap,
                    rejection_rate: rate.rejection_rate,
                    mc_se: rate.mc_se,
                    seed: s.seed,
                })
            })
            .collect()
    }
}

/// Writes the header and one row per (cell, grid point, test).
pub fn write_csv<W: Write>(results: &[SimulationResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut wrote = false;
    for row in results.iter().flat_map(SimulationResult::csv_rows) {
        w.serialize(row).map_err(csv_error)?;
        wrote = true;
    }
    if !wrote {
        w.write_record([
            "k",
            "n_vec",
            "sigma2_vec",
            "mu_vec",
            "c",
            "distribution",
            "test",
            "alpha",
            "P",
            "M",
            "rejection_rate",
            "mc_se",
            "seed",
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}
