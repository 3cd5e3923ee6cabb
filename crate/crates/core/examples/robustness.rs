//! LRT size under non-normal errors. Each law is standardized with its own
//! mean and variance, then shifted and scaled to the cell's mu and sigma.
//!
//! cargo run --release --example robustness

use tree_anova::{estimate_size, DistributionSpec, SimulationSpec, TestKind};

fn main() -> tree_anova::Result<()> {
    for law in DistributionSpec::robustness_suite() {
        let mut spec = SimulationSpec::new(vec![0.0; 3], vec![64.0, 100.0, 144.0], vec![50, 50, 50], 200, 5);
        spec.bootstrap = 200;
        spec.distribution = law.clone();
        spec.tests = vec![TestKind::Lrt];
        let res = estimate_size(&spec)?;
        let r = res.rate(TestKind::Lrt).expect("LRT requested");
        println!(
            "{:<40} LRT size {:.3} +/- {:.3}",
            law.to_string(),
            r.rejection_rate,
            r.mc_se
        );
    }
    Ok(())
}
