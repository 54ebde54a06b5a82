//! `softedge`: limit laws, exact finite-n values, expansions, Monte Carlo
//! checks and the acceptance suite from the command line.
//!
//! Tabular output is CSV (`#` lines echo the configuration, then a header
//! row) or JSON (`{"config", "columns", "rows"}`). Columns are stable and
//! versioned by `SCHEMA`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use softedge::expansion::{
    derive_table, read_table, shipped_table, write_table, DeriveConfig, ExpansionCurve, Ladder,
    Quantity, TableHeader,
};
use softedge::finiten::{gram, kth_largest_finite_cdf, unitary_scaling};
use softedge::fredholm::{kth_largest_limit_cdf, limit_f_beta};
use softedge::mc::{
    figure1_harness, ks_critical, ks_statistic, sample_with_workers,
    superposition_decimation_check, thinning_check, write_binary, write_csv, TabulatedCdf,
};
use softedge::painleve::{solve_q, total_integral, DEFAULT_L_MINUS, DEFAULT_L_PLUS};
use softedge::symbolic::CoefficientTable;
use softedge::validation::{run_criterion, CRITERIA};
use softedge::{Beta, EnsembleSpec, Error, Result};

/// Version of the column layout.
const SCHEMA: u32 = 1;
/// Default Monte Carlo worker count; part of the reproducibility contract.
const DEFAULT_WORKERS: usize = 8;

#[derive(Parser, Debug)]
#[command(
    name = "softedge",
    version,
    about = "Soft-edge gap probabilities of random-matrix ensembles"
)]
struct Cli {
    /// Output format for tables and reports.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, env = "SOFTEDGE_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Limit laws F_beta(s; xi) or k-th largest limit CDFs on a grid.
    Limit(LimitArgs),
    /// Exact beta = 2 finite-n generating function on a scaled grid.
    Finite(FiniteArgs),
    /// Expansion partial sums and densities for m = 0..=M.
    Expand(ExpandArgs),
    /// Painlevé II solution q and the total-integral check.
    Painleve(PainleveArgs),
    /// Extract, reconstruct and transfer; writes a coefficient table.
    Derive(DeriveArgs),
    /// Sampling and Monte Carlo checks.
    Mc(McArgs),
    /// Run the acceptance suite; JSON report, nonzero exit on failure.
    Validate(ValidateArgs),
}

/// A grid `lo:hi:step`.
#[derive(Clone, Debug, Serialize)]
struct Grid {
    lo: f64,
    hi: f64,
    step: f64,
}

impl Grid {
    fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + self.step * i as f64).collect()
    }
}

fn parse_grid(text: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [lo, hi, step] if step > 0.0 && hi >= lo => Ok(Grid { lo, hi, step }),
        _ => Err("expected lo:hi:step with step > 0 and hi >= lo".into()),
    }
}

#[derive(Args, Debug, Serialize)]
struct EnsembleArgs {
    /// Dyson index 1, 2 or 4.
    #[arg(long, default_value_t = 2)]
    beta: u32,
    /// Gaussian ensemble (default).
    #[arg(long, conflicts_with = "laguerre")]
    gaussian: bool,
    /// Laguerre ensemble; needs -p.
    #[arg(long, requires = "p")]
    laguerre: bool,
    /// Matrix dimension.
    #[arg(short, long)]
    n: usize,
    /// Laguerre parameter p > n - 1.
    #[arg(short, long)]
    p: Option<f64>,
}

impl EnsembleArgs {
    fn spec(&self) -> Result<EnsembleSpec> {
        let beta = Beta::new(self.beta)?;
        if self.laguerre {
            let p = self
                .p
                .ok_or_else(|| Error::InvalidEnsemble("--laguerre needs -p".into()))?;
            EnsembleSpec::laguerre(beta, self.n, p)
        } else {
            EnsembleSpec::gaussian(beta, self.n)
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct LimitArgs {
    #[arg(long, default_value_t = 2)]
    beta: u32,
    /// Generating-function variable (default 1).
    #[arg(long, conflicts_with = "k")]
    xi: Option<f64>,
    /// 1-based rank from the top; emits the k-th largest limit CDF.
    #[arg(short, long)]
    k: Option<usize>,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Grid,
}

#[derive(Args, Debug, Serialize)]
struct FiniteArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, conflicts_with = "k")]
    xi: Option<f64>,
    /// 1-based rank from the top; emits the k-th largest CDF.
    #[arg(short, long)]
    k: Option<usize>,
    /// Grid in the scaled variable s, x = mu + sigma s.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Grid,
}

#[derive(Args, Debug, Serialize)]
struct ExpandArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, conflicts_with = "k")]
    xi: Option<f64>,
    /// 1-based rank from the top.
    #[arg(short, long)]
    k: Option<usize>,
    /// Highest correction order.
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Grid,
    /// Coefficient table (default: the shipped one).
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct PainleveArgs {
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Grid,
}

#[derive(Args, Debug, Serialize)]
struct DeriveArgs {
    /// Highest order (1 or 2).
    #[arg(long, default_value_t = 2)]
    j_max: u32,
    /// Values of xi fitted jointly.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    xis: Vec<f64>,
    /// Laguerre ratios p / n for the tau grid.
    #[arg(long, value_delimiter = ',', default_value = "4,9,16,36")]
    ratios: Vec<f64>,
    /// Commit recorded in the table header.
    #[arg(long, default_value = "")]
    commit: String,
}

#[derive(Args, Debug, Serialize)]
struct McArgs {
    #[command(subcommand)]
    mode: McMode,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_WORKERS)]
    workers: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum McMode {
    /// Draw spectra; CSV rows or the binary batch format (`--binary`).
    Sample {
        #[command(flatten)]
        draw: SampleArgs,
        #[arg(long)]
        binary: bool,
    },
    /// KS test of the sampled k-th largest level against the exact beta = 2 CDF.
    Ks {
        #[command(flatten)]
        draw: SampleArgs,
        #[arg(short, long, default_value_t = 1)]
        k: usize,
    },
    /// Superposition and decimation relations (two-sample KS).
    Decimation {
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 50_000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Thinned maximum against the exact beta = 2 generating function.
    Thinning {
        #[command(flatten)]
        draw: SampleArgs,
        #[arg(long, default_value_t = 0.5)]
        xi: f64,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Grid,
    },
    /// Histogram of the k-th largest level against expansion densities.
    Figure1 {
        #[command(flatten)]
        draw: SampleArgs,
        #[arg(short, long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        m: u32,
    },
}

#[derive(Args, Debug, Serialize)]
struct ValidateArgs {
    /// Subset of criteria (default: all).
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u32>,
}

/// A column table with an echoed configuration.
struct Table {
    config: Value,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn emit_table(t: &Table, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "# softedge schema {SCHEMA}")?;
            if let Value::Object(map) = &t.config {
                for (k, v) in map {
                    writeln!(out, "# {k} = {v}")?;
                }
            }
            writeln!(out, "{}", t.columns.join(","))?;
            for r in &t.rows {
                let cells: Vec<String> = r.iter().map(|v| format!("{v:.17e}")).collect();
                writeln!(out, "{}", cells.join(","))?;
            }
            Ok(())
        }
        Format::Json => {
            let v = json!({
                "schema": SCHEMA,
                "config": t.config,
                "columns": t.columns,
                "rows": t.rows,
            });
            serde_json::to_writer_pretty(&mut *out, &v)?;
            writeln!(out)
        }
    }
}

/// Flat configuration echo: the command with its arguments.
fn config_of(cli: &Cli) -> Value {
    let mut flat = serde_json::Map::new();
    flatten(
        "",
        &serde_json::to_value(&cli.command).unwrap_or(Value::Null),
        &mut flat,
    );
    flat.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    Value::Object(flat)
}

fn flatten(prefix: &str, v: &Value, out: &mut serde_json::Map<String, Value>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

fn rank(k: usize) -> Result<usize> {
    k.checked_sub(1)
        .ok_or_else(|| Error::Input("ranks are 1-based".into()))
}

fn load_table(path: &Option<PathBuf>) -> Result<CoefficientTable> {
    match path {
        None => Ok(shipped_table().clone()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(e.to_string()))?;
            Ok(read_table(&text)?.0)
        }
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        None => Box::new(BufWriter::new(io::stdout())),
        Some(p) => Box::new(BufWriter::new(create(p)?)),
    })
}

fn create(p: &Path) -> Result<File> {
    File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn io_err(e: io::Error) -> Error {
    Error::Io(e.to_string())
}

/// What a command produced.
enum Outcome {
    Table(Table),
    /// Already written; exit status.
    Done(bool),
}

fn run(cli: &Cli) -> Result<Outcome> {
    let config = config_of(cli);
    match &cli.command {
        Command::Limit(a) => {
            let beta = Beta::new(a.beta)?;
            let rows = a
                .grid
                .points()
                .into_iter()
                .map(|s| {
                    let v = match a.k {
                        Some(k) => kth_largest_limit_cdf(beta, rank(k)?, s)?,
                        None => limit_f_beta(beta, s, a.xi.unwrap_or(1.0))?,
                    };
                    Ok(vec![s, v])
                })
                .collect::<Result<_>>()?;
            Ok(Outcome::Table(Table {
                config,
                columns: vec!["s".into(), "value".into()],
                rows,
            }))
        }
        Command::Finite(a) => {
            let spec = a.ensemble.spec()?;
            if spec.beta != Beta::Unitary {
                return Err(Error::Input(
                    "exact finite-n values exist for beta = 2 only".into(),
                ));
            }
            let sc = unitary_scaling(&spec)?;
            let rows = a
                .grid
                .points()
                .into_iter()
                .map(|s| {
                    let x = sc.level(s);
                    let v = match a.k {
                        Some(k) => kth_largest_finite_cdf(&spec, rank(k)?, x)?,
                        None => gram(&spec, x, None)?.e2n(a.xi.unwrap_or(1.0)),
                    };
                    Ok(vec![s, x, v])
                })
                .collect::<Result<_>>()?;
            Ok(Outcome::Table(Table {
                config,
                columns: vec!["s".into(), "x".into(), "value".into()],
                rows,
            }))
        }
        Command::Expand(a) => {
            let spec = a.ensemble.spec()?;
            let table = load_table(&a.table)?;
            let quantity = match a.k {
                Some(k) => Quantity::KthLargest { k: rank(k)? },
                None => Quantity::Generating {
                    xi: a.xi.unwrap_or(1.0),
                },
            };
            let curve = ExpansionCurve::new(&table, &spec, &quantity, a.m, (a.grid.lo, a.grid.hi))?;
            let mut columns = vec!["s".to_string()];
            columns.extend((0..=a.m).map(|m| format!("cdf_m{m}")));
            columns.extend((0..=a.m).map(|m| format!("density_m{m}")));
            let rows = a
                .grid
                .points()
                .into_iter()
                .map(|s| {
                    let mut r = vec![s];
                    r.extend(curve.partial_sums(s)?);
                    r.extend(curve.density_partial_sums(s)?);
                    Ok(r)
                })
                .collect::<Result<_>>()?;
            let mut config = config;
            config["h"] = json!(curve.scaling.h);
            config["tau"] = json!(curve.scaling.tau);
            Ok(Outcome::Table(Table {
                config,
                columns,
                rows,
            }))
        }
        Command::Painleve(a) => {
            let sol = solve_q(a.xi, DEFAULT_L_MINUS, DEFAULT_L_PLUS)?;
            let rows = a
                .grid
                .points()
                .into_iter()
                .map(|s| Ok(vec![s, sol.q(s)?, sol.q_prime(s)?, sol.log_f2(s)?]))
                .collect::<Result<_>>()?;
            let mut config = config;
            if a.xi > 0.0 && a.xi < 1.0 {
                let t = total_integral(a.xi)?;
                config["total_integral"] = json!(t.value);
                config["artanh_sqrt_xi"] = json!(t.exact);
            }
            Ok(Outcome::Table(Table {
                config,
                columns: vec!["s".into(), "q".into(), "q_prime".into(), "log_f2".into()],
                rows,
            }))
        }
        Command::Derive(a) => {
            let cfg = DeriveConfig {
                j_max: a.j_max,
                xis: a.xis.clone(),
                ratios: a.ratios.clone(),
                ladder: Ladder::default(),
                ..DeriveConfig::default()
            };
            let (table, recs) = derive_table(&cfg)?;
            for r in &recs {
                eprintln!(
                    "order {}: certificate {:.2e}, {}",
                    r.j,
                    r.certificate,
                    r.provenance().tag()
                );
            }
            let header = TableHeader {
                commit: a.commit.clone(),
                generator: format!("softedge {} derive", env!("CARGO_PKG_VERSION")),
            };
            let text = write_table(&table, &header)?;
            let mut out = open_output(&cli.output)?;
            out.write_all(text.as_bytes()).map_err(io_err)?;
            out.flush().map_err(io_err)?;
            Ok(Outcome::Done(recs.iter().all(|r| r.rounded)))
        }
        Command::Mc(a) => run_mc(cli, &a.mode, config),
        Command::Validate(a) => {
            let ids: Vec<u32> = if a.criteria.is_empty() {
                (1..=CRITERIA).collect()
            } else {
                a.criteria.clone()
            };
            let reports: Vec<_> = ids
                .iter()
                .map(|&id| {
                    let r = run_criterion(id);
                    eprintln!("{}", r.line());
                    r
                })
                .collect();
            let passed = reports.iter().all(|r| r.passed);
            let v = json!({ "schema": SCHEMA, "passed": passed, "criteria": reports });
            let mut out = open_output(&cli.output)?;
            serde_json::to_writer_pretty(&mut out, &v).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(out).map_err(io_err)?;
            out.flush().map_err(io_err)?;
            Ok(Outcome::Done(passed))
        }
    }
}

fn run_mc(cli: &Cli, mode: &McMode, config: Value) -> Result<Outcome> {
    let draw = |d: &SampleArgs| {
        let spec = d.ensemble.spec()?;
        Ok::<_, Error>((
            spec,
            sample_with_workers(&spec, d.count, d.seed, d.workers)?,
        ))
    };
    match mode {
        McMode::Sample { draw: d, binary } => {
            let (_, batch) = draw(d)?;
            let mut out = open_output(&cli.output)?;
            if *binary {
                write_binary(&batch, &mut out)?;
            } else {
                write_csv(&batch, &mut out)?;
            }
            out.flush().map_err(io_err)?;
            Ok(Outcome::Done(true))
        }
        McMode::Ks { draw: d, k } => {
            let (spec, batch) = draw(d)?;
            if spec.beta != Beta::Unitary {
                return Err(Error::Input(
                    "the exact reference exists for beta = 2 only".into(),
                ));
            }
            let k = rank(*k)?;
            let sc = unitary_scaling(&spec)?;
            let cdf = TabulatedCdf::new(sc.level(-9.0), sc.level(6.0), 160, |x| {
                kth_largest_finite_cdf(&spec, k, x)
            })?;
            let stat = ks_statistic(&batch.kth_largest(k)?, |x| cdf.eval(x));
            let c5 = ks_critical(d.count, 0.05);
            let c1 = ks_critical(d.count, 0.01);
            Ok(Outcome::Table(Table {
                config,
                columns: vec![
                    "statistic".into(),
                    "critical_5pct".into(),
                    "critical_1pct".into(),
                ],
                rows: vec![vec![stat, c5, c1]],
            }))
        }
        McMode::Decimation { n, count, seed } => {
            let entries = superposition_decimation_check(*n, *count, *seed)?;
            let mut config = config;
            config["labels"] = json!(entries.iter().map(|e| e.label.clone()).collect::<Vec<_>>());
            Ok(Outcome::Table(Table {
                config,
                columns: vec!["index".into(), "statistic".into(), "p_value".into()],
                rows: entries
                    .iter()
                    .enumerate()
                    .map(|(i, e)| vec![i as f64, e.statistic, e.p_value])
                    .collect(),
            }))
        }
        McMode::Thinning { draw: d, xi, grid } => {
            let (spec, batch) = draw(d)?;
            if spec.beta != Beta::Unitary {
                return Err(Error::Input(
                    "the exact reference exists for beta = 2 only".into(),
                ));
            }
            let sc = unitary_scaling(&spec)?;
            let xs: Vec<f64> = grid.points().into_iter().map(|s| sc.level(s)).collect();
            let pts = thinning_check(&batch, *xi, &xs, d.seed ^ 0x5eed, |x| {
                Ok(gram(&spec, x, None)?.e2n(*xi))
            })?;
            Ok(Outcome::Table(Table {
                config,
                columns: vec![
                    "s".into(),
                    "x".into(),
                    "empirical".into(),
                    "exact".into(),
                    "std_error".into(),
                ],
                rows: pts
                    .iter()
                    .map(|p| vec![sc.scaled(p.x), p.x, p.empirical, p.reference, p.std_error])
                    .collect(),
            }))
        }
        McMode::Figure1 { draw: d, k, m } => {
            let spec = d.ensemble.spec()?;
            let r = figure1_harness(shipped_table(), &spec, rank(*k)?, *m, d.count, d.seed)?;
            let mut config = config;
            config["distances"] = json!(r.distances);
            config["noise_floor"] = json!(r.noise_floor);
            config["improves"] = json!(r.improves(2.0));
            let mut columns = vec!["lo".into(), "hi".into(), "histogram".into()];
            columns.extend((0..=*m).map(|i| format!("density_m{i}")));
            let rows = (0..r.histogram.len())
                .map(|i| {
                    let mut row = vec![r.edges[i], r.edges[i + 1], r.histogram[i]];
                    row.extend(r.densities.iter().map(|d| d[i]));
                    row
                })
                .collect();
            Ok(Outcome::Table(Table {
                config,
                columns,
                rows,
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        // Only fails if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    let result = run(&cli).and_then(|outcome| match outcome {
        Outcome::Table(t) => {
            let mut out = open_output(&cli.output)?;
            match emit_table(&t, cli.format, &mut out).and_then(|_| out.flush()) {
                // A closed downstream pipe is not an error.
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(io_err(e)),
                _ => Ok(true),
            }
        }
        Outcome::Done(ok) => Ok(ok),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let record = json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } });
            eprintln!("{record}");
            ExitCode::from(2)
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidBeta(_) | Error::InvalidEnsemble(_) | Error::NonPositiveIndex(_) => {
            "ensemble"
        }
        Error::OutOfRange { .. } | Error::IndexOutOfRange { .. } | Error::WindowCoverage(_) => {
            "range"
        }
        Error::Table(_) | Error::MissingEntry { .. } => "table",
        Error::Io(_) | Error::Format(_) => "io",
        Error::Input(_) => "input",
        _ => "numerical",
    }
}
