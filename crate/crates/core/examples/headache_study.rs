//! All three tests on the pain-threshold data (change U2 - U1 for a control
//! and three treatments), with simultaneous lower confidence bounds.
//!
//! cargo run --release --example headache_study [path/to/file.csv]

use std::path::PathBuf;

use tree_anova::{check_condition1, ingest_csv, run_tests, BootstrapConfig, ConvergenceConfig, Seed, TestKind};

fn main() -> tree_anova::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/headache_u_change.csv"));
    let table = ingest_csv(&path, "Control")?;
    let stats = table.data.summarize();
    for (i, label) in table.labels.iter().enumerate() {
        println!(
            "{label:<8} n={:<3} mean={:>10.7} S2={:>9.6}",
            stats.n[i], stats.mean[i], stats.unbiased_var[i]
        );
    }
    if !check_condition1(&stats).all_pass() {
        println!("(Condition 1 does not hold; uniqueness of the tree MLE is not guaranteed)");
    }

    let boot = BootstrapConfig::new(5000, 0.05, Seed::new(2026))?;
    let reports = run_tests(&table.data, &TestKind::ALL, &boot, &ConvergenceConfig::default())?;
    for r in &reports {
        println!(
            "{:<6} statistic {:.7}  critical {:.7}  p {:.4}  {}",
            r.test.to_string(),
            r.statistic,
            r.critical_value,
            r.p_value,
            r.decision()
        );
        if let Some(ci) = &r.ci_lower {
            for (j, lb) in ci.iter().enumerate() {
                println!("       mu[{}] - mu[Control] > {lb:.7}", table.labels[j + 1]);
            }
        }
    }
    Ok(())
}
