//! Acceptance checks, one line per criterion:
//!
//! cargo test --release --test acceptance
//!
//! Tolerances and budgets are fixed below. The process exits non-zero when
//! any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;
use tree_anova::isotonic::{brute_force_projection, tree_isotonic, WeightedVector};
use tree_anova::simulation::with_threads;
use tree_anova::{
    d_statistics, estimate_power, estimate_size, ingest_csv, lrt_statistic, mle_tree, run_tests, simultaneous_ci,
    BootstrapConfig, ConvergenceConfig, DistributionSpec, GroupedData, Seed, SimulationSpec, SummaryStats, TestKind,
};

const SEED: u64 = 20_261_018;
const SIZE_BAND: f64 = 0.015;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Option<Outcome>;

fn outcome(pass: bool, detail: String) -> Option<Outcome> {
    Some(Outcome { pass, detail })
}

fn pain_study_summary() -> SummaryStats {
    SummaryStats::from_unbiased(
        vec![23, 25, 22, 28],
        vec![-0.4134783, 0.2344000, 1.0504545, 0.9367857],
        vec![1.416596, 3.422117, 7.297271, 1.935926],
    )
    .unwrap()
}

fn pain_study_statistics() -> Option<Outcome> {
    let start = Instant::now();
    let stats = pain_study_summary();
    let d = d_statistics(&stats).unwrap();
    let max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let ci = simultaneous_ci(&stats, 2.1667720).unwrap();
    let elapsed = start.elapsed();
    let want_ci = [-0.3174323, 0.1050967, 0.5668287];
    let ci_err = ci.iter().zip(want_ci).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let pass = (max - 3.7344682).abs() <= 1e-6
        && (min - 1.4542517).abs() <= 1e-6
        && ci_err <= 5e-4
        && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!("Max-D {max:.7}, Min-D {min:.7}, CI lower {ci:.7?} (max err {ci_err:.1e}), {elapsed:.2?}"),
    )
}

fn isotonic_oracle() -> Option<Outcome> {
    let start = Instant::now();
    let mut rng = Seed::new(SEED).derive(2).rng();
    let mut worst_obj: f64 = 0.0;
    let mut worst_kkt: f64 = 0.0;
    let mut infeasible = 0;
    for _ in 0..1000 {
        let len = rng.random_range(3..=6);
        let values: Vec<f64> = (0..len).map(|_| rng.random_range(-10.0..10.0)).collect();
        let weights: Vec<f64> = (0..len).map(|_| rng.random_range(0.05..20.0)).collect();
        let data = WeightedVector::new(values, weights).unwrap();
        let p = tree_isotonic(&data);
        let oracle = brute_force_projection(&data, 1e-12).unwrap();
        worst_obj = worst_obj.max((p.objective - oracle.objective).abs());

        let u = data.values();
        if p.fitted[1..].iter().any(|&m| m < p.fitted[0]) {
            infeasible += 1;
        }
        let resid: Vec<f64> = u.iter().zip(&p.fitted).map(|(a, b)| a - b).collect();
        // <u - u*, u*>_w = 0, <u - u*, 1>_w = 0, <u - u*, e_i>_w <= 0
        worst_kkt = worst_kkt.max(data.inner(&resid, &p.fitted).abs());
        worst_kkt = worst_kkt.max(data.inner(&resid, &vec![1.0; len]).abs());
        for i in 1..len {
            let mut e = vec![0.0; len];
            e[i] = 1.0;
            worst_kkt = worst_kkt.max(data.inner(&resid, &e));
        }
    }
    let elapsed = start.elapsed();
    let pass = worst_obj <= 1e-9 && worst_kkt <= 1e-9 && infeasible == 0 && elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!("1000 instances: max |objective gap| {worst_obj:.1e}, max optimality residual {worst_kkt:.1e}, {elapsed:.2?}"),
    )
}

fn likelihood_monotonicity() -> Option<Outcome> {
    let start = Instant::now();
    let cfg = ConvergenceConfig::default();
    let mut rng = Seed::new(SEED).derive(3).rng();
    let mut worst_drop: f64 = 0.0;
    let mut max_lambda: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..500 {
        let groups = rng.random_range(2..=6);
        let data: Vec<Vec<f64>> = (0..groups)
            .map(|_| {
                let n = rng.random_range(2..=30);
                let mean: f64 = rng.random_range(-2.0..2.0);
                let sd: f64 = rng.random_range(0.2..4.0);
                (0..n)
                    .map(|_| mean + sd * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        let stats = GroupedData::new(data).unwrap().summarize();
        match (mle_tree(&stats, &cfg), lrt_statistic(&stats, &cfg)) {
            (Ok(fit), Ok(lambda)) => {
                for w in fit.loglik_trace.windows(2) {
                    worst_drop = worst_drop.max(w[0] - w[1]);
                }
                max_lambda = max_lambda.max(lambda);
            }
            _ => errors += 1,
        }
    }
    let elapsed = start.elapsed();
    let pass = worst_drop <= 1e-10 && max_lambda <= 1.0 + 1e-12 && errors == 0 && elapsed < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "500 instances: largest trace drop {worst_drop:.1e}, max lambda {max_lambda:.15}, {errors} errors, {elapsed:.2?}"
        ),
    )
}

fn size_cell(spec: &SimulationSpec, targets: &[(TestKind, f64)]) -> Option<Outcome> {
    let res = estimate_size(spec).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for &(test, target) in targets {
        let r = res.rate(test).unwrap();
        pass &= (r.rejection_rate - target).abs() <= SIZE_BAND;
        parts.push(format!(
            "{test} {:.4} (target {target}, se {:.4})",
            r.rejection_rate, r.mc_se
        ));
    }
    parts.push(format!("{:.1} s", res.elapsed_secs));
    outcome(pass, parts.join(", "))
}

fn size_normal_small() -> Option<Outcome> {
    let spec = SimulationSpec::new(vec![1.0; 3], vec![1.0, 2.0, 5.0], vec![5, 5, 5], 2000, SEED + 4);
    size_cell(
        &spec,
        &[
            (TestKind::Lrt, 0.0514),
            (TestKind::MaxD, 0.0511),
            (TestKind::MinD, 0.0499),
        ],
    )
}

fn size_normal_moderate() -> Option<Outcome> {
    let spec = SimulationSpec::new(vec![1.0; 4], vec![2.0; 4], vec![20, 15, 35, 25], 2000, SEED + 5);
    size_cell(
        &spec,
        &[(TestKind::Lrt, 0.05), (TestKind::MaxD, 0.05), (TestKind::MinD, 0.05)],
    )
}

fn size_laplace() -> Option<Outcome> {
    let mut spec = SimulationSpec::new(vec![1.0; 3], vec![64.0, 100.0, 144.0], vec![50, 50, 50], 2000, SEED + 6);
    spec.distribution = DistributionSpec::Laplace {
        location: 0.0,
        scale: 1.0,
    };
    spec.tests = vec![TestKind::Lrt];
    size_cell(&spec, &[(TestKind::Lrt, 0.0502)])
}

fn power_monotone() -> Option<Outcome> {
    let mut spec = SimulationSpec::new(
        vec![1.0, 1.3, 1.6],
        vec![2.0, 3.0, 4.0],
        vec![20, 10, 25],
        1000,
        SEED + 7,
    );
    spec.c_grid = Some(vec![1.0, 2.5, 4.0, 6.1]);
    let res = estimate_power(&spec).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for test in TestKind::ALL {
        let curve: Vec<_> = res.points.iter().map(|p| p.rate(test).unwrap()).collect();
        for w in curve.windows(2) {
            let slack = 2.0 * (w[0].mc_se.powi(2) + w[1].mc_se.powi(2)).sqrt();
            pass &= w[1].rejection_rate + slack >= w[0].rejection_rate;
        }
        let last = curve.last().unwrap().rejection_rate;
        if test != TestKind::MinD {
            pass &= last >= 0.9;
        }
        let rates: Vec<String> = curve.iter().map(|r| format!("{:.3}", r.rejection_rate)).collect();
        parts.push(format!("{test} [{}]", rates.join(" ")));
    }
    parts.push(format!("{:.1} s", res.elapsed_secs));
    outcome(pass, parts.join(", "))
}

fn headache_data() -> Option<Outcome> {
    let path = std::env::var_os("TREE_ANOVA_HEADACHE_CSV")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/headache_u_change.csv"));
    if !path.exists() {
        return None;
    }
    let table = ingest_csv(&path, "Control").unwrap();
    let stats = table.data.summarize();
    let published = pain_study_summary();
    let reproduces = stats.n == published.n
        && (0..4).all(|i| {
            (stats.mean[i] - published.mean[i]).abs() <= 5e-7
                && (stats.unbiased_var[i] - published.unbiased_var[i]).abs() <= 5e-6
        });
    if !reproduces {
        return outcome(
            false,
            format!("{} does not reproduce the published summaries", path.display()),
        );
    }
    let boot = BootstrapConfig::new(5000, 0.05, Seed::new(SEED + 8)).unwrap();
    let reports = run_tests(&table.data, &TestKind::ALL, &boot, &ConvergenceConfig::default()).unwrap();
    let lambda = reports[0].statistic;
    let pass = (lambda - 0.0006892).abs() <= 1e-5 && reports.iter().all(|r| r.reject);
    let decisions: Vec<String> = reports
        .iter()
        .map(|r| format!("{} {} (p {:.4})", r.test, r.decision(), r.p_value))
        .collect();
    outcome(pass, format!("lambda {lambda:.7}; {}", decisions.join(", ")))
}

fn cli_bytes(args: &[&str], threads: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_tree-anova"))
        .args(args)
        .env("TREE_ANOVA_THREADS", threads)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism() -> Option<Outcome> {
    let mut spec = SimulationSpec::new(vec![1.0, 1.3, 1.0], vec![3.0, 1.0, 6.0], vec![5, 8, 12], 200, SEED + 9);
    spec.bootstrap = 200;
    spec.c_grid = Some(vec![1.0, 3.0]);
    let sim = |threads| with_threads(threads, || serde_json::to_vec(&estimate_power(&spec).unwrap()).unwrap()).unwrap();
    let lib_sim = sim(1) == sim(4);

    let data = GroupedData::new(vec![
        vec![0.3, -1.2, 0.8, 0.1, 1.9],
        vec![1.1, 0.2, 2.4, 0.9, 1.3, -0.4],
        vec![2.2, 0.7, 1.6, 3.1],
    ])
    .unwrap();
    let boot = BootstrapConfig::new(1000, 0.05, Seed::new(SEED)).unwrap();
    let test = |threads| {
        with_threads(threads, || {
            serde_json::to_vec(&run_tests(&data, &TestKind::ALL, &boot, &ConvergenceConfig::default()).unwrap())
                .unwrap()
        })
        .unwrap()
    };
    let lib_test = test(1) == test(4);

    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let csv = fixtures.join("h0_synthetic.csv");
    let test_args = [
        "test",
        "--input",
        csv.to_str().unwrap(),
        "--control",
        "Placebo",
        "--bootstrap",
        "1000",
        "--seed",
        "9",
        "--format",
        "json",
    ];
    let cli_test = cli_bytes(&test_args, "1") == cli_bytes(&test_args, "4");
    let cell = fixtures.join("cell_small.json");
    let sim_args = ["simulate", "--config", cell.to_str().unwrap(), "--seed", "9"];
    let cli_sim = cli_bytes(&sim_args, "1") == cli_bytes(&sim_args, "4");

    outcome(
        lib_sim && lib_test && cli_test && cli_sim,
        format!(
            "1 vs 4 workers identical: simulate(lib) {lib_sim}, test(lib) {lib_test}, test(cli) {cli_test}, simulate(cli) {cli_sim}"
        ),
    )
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("published pain-study statistics", pain_study_statistics),
        ("isotonic oracle equivalence", isotonic_oracle),
        ("likelihood monotonicity and nesting", likelihood_monotonicity),
        ("size, k=2 n=(5,5,5) sigma2=(1,2,5)", size_normal_small),
        ("size, k=3 n=(20,15,35,25) sigma2=(2,2,2,2)", size_normal_moderate),
        ("size, Laplace n=(50,50,50) sigma=(8,10,12)", size_laplace),
        ("power monotone in c", power_monotone),
        ("LRT on the pain-threshold data", headache_data),
        ("determinism across worker counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Some(o) => {
                println!(
                    "[{}] {}. {name}: {}",
                    if o.pass { "PASS" } else { "FAIL" },
                    i + 1,
                    o.detail
                );
                failed += !o.pass as usize;
            }
            None => println!(
                "[SKIP] {}. {name}: dataset not found (set TREE_ANOVA_HEADACHE_CSV)",
                i + 1
            ),
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
