//! Parametric-bootstrap tests of equal means against the simple tree order
//! `mu_0 <= mu_i` in one-way layouts with unequal group variances.
//!
//! - [`isotonic`]: weighted projection onto the tree-ordered cone.
//! - [`estimation`]: summary statistics and the restricted MLEs.
//! - [`testing`]: the LRT, Max-D and Min-D tests.
//! - [`simulation`]: Monte-Carlo size and power.
//! - [`distributions`]: error laws for robustness studies.
//! - [`cli`]: CSV ingest, reports and the `tree-anova` commands.

pub mod cli;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod isotonic;
pub mod seed;
pub mod simulation;
pub mod testing;

pub use cli::{ingest_csv, InputTable};
pub use distributions::DistributionSpec;
pub use error::{Error, Result};
pub use estimation::{
    check_condition1, log_likelihood, mle_null, mle_tree, ConvergenceConfig, GroupedData, RestrictedMleResult, Space,
    SummaryStats,
};
pub use isotonic::{tree_isotonic, TreeProjection, WeightedVector};
pub use seed::Seed;
pub use simulation::{estimate_power, estimate_size, run_grid, SimulationResult, SimulationSpec};
pub use testing::{
    d_statistics, lrt_statistic, run_lrt, run_maxd, run_mind, run_tests, simultaneous_ci, BootstrapConfig, TestKind,
    TestReport,
};
