//! A small batch of size cells, as the `grid` subcommand runs them. The
//! second cell is invalid and is reported without stopping the others.
//!
//! cargo run --release --example study_grid

use tree_anova::simulation::write_csv;
use tree_anova::{run_grid, SimulationSpec};

fn main() -> tree_anova::Result<()> {
    let cells: Vec<SimulationSpec> = serde_json::from_str(
        r#"[
        {"mu": [0, 0, 0], "sigma2": [1, 1, 1], "n": [5, 5, 5], "replications": 200, "bootstrap": 200, "seed": 1},
        {"mu": [0, 0, 0], "sigma2": [1, -1, 1], "n": [5, 5, 5], "replications": 200, "bootstrap": 200, "seed": 1},
        {"mu": [0, 0, 0], "sigma2": [1, 2, 5], "n": [10, 10, 10], "replications": 200, "bootstrap": 200, "seed": 1,
         "distribution": {"kind": "student-t", "df": 3}}
    ]"#,
    )
    .expect("valid JSON");
    let mut ok = Vec::new();
    for cell in run_grid(&cells)? {
        match cell.result {
            Ok(r) => ok.push(r),
            Err(e) => eprintln!("cell {}: {e}", cell.index),
        }
    }
    write_csv(&ok, std::io::stdout().lock())
}
