//! CSV ingest, reports and the `tree-anova` subcommands.
//!
//! Input files are long format with the header `group,value`:
//!
//! ```text
//! group,value
//! Control,-0.41
//! T1,0.23
//! ```
//!
//! The control group is named on the command line and always becomes group
//! 0. Treatments keep the order in which they first appear.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::{check_condition1, Condition1Report, ConvergenceConfig, GroupedData, SummaryStats};
use crate::seed::Seed;
use crate::simulation::{self, run_grid, SimulationResult, SimulationSpec};
use crate::testing::{run_tests, BootstrapConfig, TestKind, TestReport};

/// Env var capping the number of worker threads.
pub const THREADS_ENV: &str = "TREE_ANOVA_THREADS";

/// Ingested long-format data with labels in group order.
#[derive(Debug, Clone, PartialEq)]
pub struct InputTable {
    pub labels: Vec<String>,
    pub data: GroupedData,
}

pub fn ingest_csv(path: impl AsRef<Path>, control: &str) -> Result<InputTable> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let ingest = |row: usize, message: String| Error::Ingest {
        path: shown.clone(),
        row,
        message,
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(File::open(path)?);

    let mut labels: Vec<String> = Vec::new();
    let mut first_row: Vec<usize> = Vec::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    let mut last_row = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(i + 1, |p| p.line() as usize);
            ingest(row, e.to_string())
        })?;
        let row = record.position().map_or(i + 1, |p| p.line() as usize);
        last_row = row;
        if i == 0 {
            if record.len() != 2 || &record[0] != "group" || &record[1] != "value" {
                return Err(ingest(row, "header must be `group,value`".into()));
            }
            continue;
        }
        if record.len() != 2 {
            return Err(ingest(row, format!("expected 2 fields, found {}", record.len())));
        }
        let label = &record[0];
        if label.is_empty() {
            return Err(ingest(row, "empty group label".into()));
        }
        let value: f64 = record[1]
            .parse()
            .map_err(|_| ingest(row, format!("non-numeric value '{}'", &record[1])))?;
        if !value.is_finite() {
            return Err(ingest(row, format!("non-finite value '{}'", &record[1])));
        }
        let g = match labels.iter().position(|l| l == label) {
            Some(g) => g,
            None => {
                labels.push(label.to_string());
                first_row.push(row);
                groups.push(Vec::new());
                labels.len() - 1
            }
        };
        groups[g].push(value);
    }
    if last_row == 0 {
        return Err(ingest(1, "empty file: header `group,value` expected".into()));
    }

    let Some(c) = labels.iter().position(|l| l == control) else {
        return Err(ingest(last_row, format!("control group '{control}' not found")));
    };
    if labels.len() < 2 {
        return Err(ingest(
            last_row,
            "need at least one treatment group besides the control (k >= 1)".into(),
        ));
    }
    if let Some(g) = groups.iter().position(|g| g.len() < 2) {
        return Err(ingest(
            first_row[g],
            format!(
                "group '{}' has {} row(s), at least 2 needed",
                labels[g],
                groups[g].len()
            ),
        ));
    }
    let label = labels.remove(c);
    labels.insert(0, label);
    let group = groups.remove(c);
    groups.insert(0, group);
    Ok(InputTable {
        labels,
        data: GroupedData::new(groups)?,
    })
}

/// Writes `table` back in long format with shortest round-trip floats.
pub fn write_long_csv<W: Write>(table: &InputTable, out: W) -> Result<()> {
    let mut w = io::BufWriter::new(out);
    writeln!(w, "group,value")?;
    for (label, group) in table.labels.iter().zip(table.data.groups()) {
        for v in group {
            writeln!(w, "{label},{v}")?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "tree-anova",
    version,
    about = "Bootstrap tests of equal means against the tree order mu_0 <= mu_i"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the LRT, Max-D and Min-D tests on a long-format CSV.
    Test(TestArgs),
    /// Estimate size or power for one study cell given as JSON.
    Simulate(SimulateArgs),
    /// Run a JSON list of study cells.
    Grid(GridArgs),
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub control: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long = "bootstrap", value_name = "M", default_value_t = 5000)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "lrt,maxd,mind")]
    pub tests: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// MLE stopping tolerance 10^-p.
    #[arg(long = "convergence-p", value_name = "P", default_value_t = 6)]
    pub convergence_p: u32,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// JSON study cell.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Overrides the cell's bootstrap size (default 1000).
    #[arg(long = "bootstrap", value_name = "M")]
    pub bootstrap: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub tests: Option<Vec<String>>,
    #[arg(long = "convergence-p", value_name = "P")]
    pub convergence_p: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// JSON array of study cells.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses a comma list such as `lrt,maxd`.
pub fn parse_tests<S: AsRef<str>>(names: &[S]) -> Result<Vec<TestKind>> {
    let mut tests = Vec::new();
    for name in names {
        let t: TestKind = name.as_ref().parse()?;
        if tests.contains(&t) {
            return Err(Error::Config(format!("test {t} listed twice")));
        }
        tests.push(t);
    }
    if tests.is_empty() {
        return Err(Error::Config("no tests selected".into()));
    }
    Ok(tests)
}

/// Worker count from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got '{v}'"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Structured `test` output.
#[derive(Debug, Clone, Serialize)]
pub struct TestOutput {
    pub groups: Vec<String>,
    pub summary: SummaryStats,
    pub condition1: Condition1Report,
    pub reports: Vec<TestReport>,
}

pub fn cmd_test(args: &TestArgs) -> Result<TestOutput> {
    let tests = parse_tests(&args.tests)?;
    let boot = BootstrapConfig::new(args.bootstrap, args.alpha, Seed::new(args.seed))?;
    let cfg = ConvergenceConfig::new(args.convergence_p, 10_000)?;
    let table = ingest_csv(&args.input, &args.control)?;
    let summary = table.data.summarize();
    let condition1 = check_condition1(&summary);
    let reports = run_tests(&table.data, &tests, &boot, &cfg)?;
    Ok(TestOutput {
        groups: table.labels,
        summary,
        condition1,
        reports,
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<SimulationResult> {
    let mut spec: SimulationSpec = read_json(&args.config)?;
    if let Some(a) = args.alpha {
        spec.alpha = a;
    }
    if let Some(m) = args.bootstrap {
        spec.bootstrap = m;
    }
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    if let Some(t) = &args.tests {
        spec.tests = parse_tests(t)?;
    }
    if let Some(p) = args.convergence_p {
        spec.convergence_p = p;
    }
    let mut cells = run_grid(std::slice::from_ref(&spec))?;
    cells.remove(0).result
}

#[derive(Debug)]
pub struct GridOutput {
    pub results: Vec<SimulationResult>,
    /// Failed cells by index.
    pub failed: Vec<(usize, Error)>,
}

pub fn cmd_grid(args: &GridArgs) -> Result<GridOutput> {
    let specs: Vec<SimulationSpec> = read_json(&args.config)?;
    let mut out = GridOutput {
        results: Vec::new(),
        failed: Vec::new(),
    };
    for cell in run_grid(&specs)? {
        match cell.result {
            Ok(r) => out.results.push(r),
            Err(e) => out.failed.push((cell.index, e)),
        }
    }
    Ok(out)
}

pub fn render_test_text(out: &TestOutput) -> String {
    let mut s = String::new();
    let width = out.groups.iter().map(String::len).max().unwrap_or(5).max(5);
    let st = &out.summary;
    let _ = writeln!(
        s,
        "{:<width$}  {:>5}  {:>12}  {:>12}  {:>12}",
        "group", "n", "mean", "s2 (1/n)", "S2 (1/(n-1))"
    );
    for (i, label) in out.groups.iter().enumerate() {
        let _ = writeln!(
            s,
            "{:<width$}  {:>5}  {:>12.7}  {:>12.7}  {:>12.7}",
            label, st.n[i], st.mean[i], st.biased_var[i], st.unbiased_var[i]
        );
    }
    for g in out.condition1.failing_groups() {
        let _ = writeln!(
            s,
            "warning: Condition 1 fails for group '{}'; the tree-order MLE may not be unique",
            out.groups[g]
        );
    }
    for r in &out.reports {
        let _ = writeln!(s);
        let _ = writeln!(s, "{}", r.test);
        let _ = writeln!(s, "  statistic       {:.7}", r.statistic);
        let _ = writeln!(s, "  critical value  {:.7}", r.critical_value);
        let _ = writeln!(s, "  p-value         {:.7}", r.p_value);
        let _ = writeln!(s, "  decision        {} at alpha = {}", r.decision(), r.alpha);
        let _ = writeln!(
            s,
            "  resamples       {} used, {} failed, {} redrawn",
            r.draws, r.failed_resamples, r.redrawn_resamples
        );
        if let Some(d) = &r.per_treatment_d {
            for (j, v) in d.iter().enumerate() {
                let _ = writeln!(s, "  D[{}]  {:.7}", out.groups[j + 1], v);
            }
        }
        if let Some(ci) = &r.ci_lower {
            for (j, lb) in ci.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "  mu[{}] - mu[{}] in ({:.7}, inf)",
                    out.groups[j + 1],
                    out.groups[0],
                    lb
                );
            }
        }
    }
    s
}

pub fn render_test_csv(out: &TestOutput) -> Result<String> {
    #[derive(Serialize)]
    struct Row<'a> {
        test: &'a str,
        statistic: f64,
        critical_value: f64,
        p_value: f64,
        reject: bool,
        alpha: f64,
        draws: usize,
        failed_resamples: usize,
        redrawn_resamples: usize,
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &out.reports {
        w.serialize(Row {
            test: r.test.id(),
            statistic: r.statistic,
            critical_value: r.critical_value,
            p_value: r.p_value,
            reject: r.reject,
            alpha: r.alpha,
            draws: r.draws,
            failed_resamples: r.failed_resamples,
            redrawn_resamples: r.redrawn_resamples,
        })
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn render_simulation(results: &[SimulationResult], format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            simulation::write_csv(results, &mut buf)?;
            Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
        }
        Format::Json => Ok(to_json(&results)),
        Format::Text => {
            let mut s = String::new();
            for res in results {
                let spec = &res.spec;
                let _ = writeln!(
                    s,
                    "mu = {:?}, sigma2 = {:?}, n = {:?}, {}, P = {}, M = {}",
                    spec.mu, spec.sigma2, spec.n, spec.distribution, spec.replications, spec.bootstrap
                );
                for p in &res.points {
                    for r in &p.rates {
                        let _ = writeln!(
                            s,
                            "  c = {:<6} {:<6} rate {:.4} (se {:.4}, {} failed)",
                            p.c, r.test, r.rejection_rate, r.mc_se, r.failed
                        );
                    }
                }
            }
            Ok(s)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Test(args) => {
            let out = cmd_test(args)?;
            let text = match args.format {
                Format::Text => render_test_text(&out),
                Format::Json => to_json(&out),
                Format::Csv => render_test_csv(&out)?,
            };
            emit(&text, args.out.as_deref())
        }
        Command::Simulate(args) => {
            let res = cmd_simulate(args)?;
            eprintln!("simulated in {:.1} s", res.elapsed_secs);
            emit(
                &render_simulation(std::slice::from_ref(&res), args.format)?,
                args.out.as_deref(),
            )
        }
        Command::Grid(args) => {
            let grid = cmd_grid(args)?;
            emit(&render_simulation(&grid.results, args.format)?, args.out.as_deref())?;
            for (index, e) in &grid.failed {
                eprintln!("cell {index}: {e}");
            }
            match grid.failed.into_iter().next() {
                Some((_, e)) => Err(e),
                None => Ok(()),
            }
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = threads_from_env().and_then(|threads| match threads {
        Some(n) => simulation::with_threads(n, || execute(&cli))?,
        None => execute(&cli),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
