//! Weighted projection onto the tree order, checked against the exhaustive
//! oracle.
//!
//! cargo run --example isotonic_projection

use tree_anova::isotonic::{brute_force_projection, tree_isotonic, WeightedVector};

fn main() -> tree_anova::Result<()> {
    let cases = [
        (vec![1.0, 2.0, 3.0], vec![1.0, 1.0, 1.0]),
        (vec![3.0, 1.0, 2.0], vec![1.0, 1.0, 1.0]),
        (vec![3.0, 1.0, 6.0], vec![1.0, 1.0, 1.0]),
        (vec![2.0, 0.5, 1.8, 4.0, -1.0], vec![4.0, 1.0, 2.5, 0.3, 0.5]),
    ];
    for (values, weights) in cases {
        let data = WeightedVector::new(values, weights)?;
        let fast = tree_isotonic(&data);
        let oracle = brute_force_projection(&data, 1e-12)?;
        println!(
            "{:?} -> {:?}  pooled {:?}  objective {:.6} (oracle {:.6})",
            data.values(),
            fast.fitted,
            fast.pooled,
            fast.objective,
            oracle.objective
        );
    }
    Ok(())
}
