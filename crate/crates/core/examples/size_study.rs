//! Empirical size for one normal cell, k = 2, n = (5,5,5), sigma^2 = (1,2,5).
//!
//! cargo run --release --example size_study [replications] [bootstrap]

use tree_anova::{estimate_size, SimulationSpec, TestKind};

fn main() -> tree_anova::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("integer argument"));
    let replications = args.next().unwrap_or(500);
    let bootstrap = args.next().unwrap_or(500);

    let mut spec = SimulationSpec::new(vec![0.0; 3], vec![1.0, 2.0, 5.0], vec![5, 5, 5], replications, 7);
    spec.bootstrap = bootstrap;
    let res = estimate_size(&spec)?;
    println!("P = {replications}, M = {bootstrap}, {:.1} s", res.elapsed_secs);
    for test in TestKind::ALL {
        let r = res.rate(test).expect("all tests requested");
        println!(
            "{:<6} size {:.4} +/- {:.4}",
            test.to_string(),
            r.rejection_rate,
            r.mc_se
        );
    }
    Ok(())
}
