//! Power along mu = c * (1, 1.3, 1.6) written as CSV, ready for plotting.
//!
//! cargo run --release --example power_curve > power.csv

use tree_anova::simulation::write_csv;
use tree_anova::{estimate_power, SimulationSpec};

fn main() -> tree_anova::Result<()> {
    let mut spec = SimulationSpec::new(vec![1.0, 1.3, 1.6], vec![2.0, 3.0, 4.0], vec![5, 5, 5], 300, 11);
    spec.bootstrap = 300;
    // 1.0, 1.3, ..., 6.1
    spec.c_grid = Some((0..18).map(|i| ((10 + 3 * i) as f64) / 10.0).collect());
    let res = estimate_power(&spec)?;
    write_csv(&[res], std::io::stdout().lock())
}
