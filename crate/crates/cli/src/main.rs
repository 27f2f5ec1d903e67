use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mtlab::analysis::{
    bias_bound_report, grid_for, interior_variance_ratios, theorem_sweep, tradeoff_study, Check,
    TradeoffConfig, DEFAULT_GRID_FACTOR,
};
use mtlab::estimator::{multitaper, periodogram, tapered_periodogram, SampleRecord};
use mtlab::prolate::{compute_dpss, compute_dpss_with, DpssMethod, ProlateParams, SIGN_CONVENTION};
use mtlab::synth::{generate, true_spectrum, ProcessModel, RNG_ALGORITHM};
use mtlab::table::{format_number, read_record, Format, Table};
use mtlab::window::{spectral_window, split_leakage};
use mtlab::{Error, FrequencyGrid};

const EXIT_PARAMETER: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "mtlab", version, about = "Multitaper spectral estimation with Slepian tapers")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for the numerical kernels.
    #[arg(long, global = true, env = "MTLAB_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Discrete prolate spheroidal sequences and their eigenvalues.
    Dpss(DpssArgs),
    /// The averaged spectral window next to the ideal band kernel.
    Window(WindowArgs),
    /// Spectrum estimate of a record read from a file or simulated.
    Estimate(EstimateArgs),
    /// Leakage scaling sweep with PASS/FAIL per invariant.
    Verify(VerifyArgs),
    /// Monte Carlo bias, variance and MSE of the multitaper estimate.
    Tradeoff(TradeoffArgs),
}

#[derive(Debug, Args)]
struct DpssArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    w: f64,
    /// Number of sequences; defaults to floor(2nw).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value_t = Solver::Tridiagonal)]
    method: Solver,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Solver {
    Dense,
    Tridiagonal,
}

#[derive(Debug, Args)]
struct WindowArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    w: f64,
    #[arg(long)]
    k: Option<usize>,
    /// Grid size; defaults to 64n.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Record file: one value per line, or a CSV table (see --column).
    #[arg(long, conflicts_with = "model")]
    input: Option<PathBuf>,
    #[arg(long, requires = "input")]
    column: Option<String>,
    /// Simulate a record from this model instead, e.g. `ar:1.372,-0.7`.
    #[arg(long, requires = "n")]
    model: Option<String>,
    /// Record length when simulating.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Method::Multitaper)]
    method: Method,
    #[arg(long, default_value_t = 0.1)]
    w: f64,
    /// Number of tapers; defaults to floor(2nw).
    #[arg(long)]
    k: Option<usize>,
    /// Taper index for `--method tapered`.
    #[arg(long, default_value_t = 0)]
    taper: usize,
    /// Grid size; defaults to 4n.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Periodogram,
    Tapered,
    Multitaper,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_delimiter = ',', default_value = "64,128,256,512,1024")]
    sweep: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    w: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_FACTOR)]
    grid_factor: usize,
}

#[derive(Debug, Args)]
struct TradeoffArgs {
    #[arg(long, default_value = "white")]
    model: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    w: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid size; defaults to 4n.
    #[arg(long)]
    m: Option<usize>,
    /// Emit per-frequency columns instead of the per-K summary.
    #[arg(long)]
    pointwise: bool,
}

/// A failed run: the exit code and the message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Json(_) | Error::Format(_) => EXIT_IO,
            Error::NoConvergence { .. } | Error::InvariantViolated(_) => EXIT_VERIFICATION,
            _ => EXIT_PARAMETER,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn parameter(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_PARAMETER,
        message: message.into(),
    }
}

/// What a subcommand produced: a table, plus PASS/FAIL lines for `verify`.
struct Outcome {
    table: Table,
    checks: Vec<Check>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome {
            table,
            checks: Vec::new(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_PARAMETER)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(parameter("invalid parameter `threads`: need threads >= 1"));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| parameter(e.to_string()))?;
    let format = Format::from(cli.format);

    let outcome = pool.install(|| match &cli.command {
        Command::Dpss(a) => cmd_dpss(a).map(Outcome::from),
        Command::Window(a) => cmd_window(a).map(Outcome::from),
        Command::Estimate(a) => cmd_estimate(a).map(Outcome::from),
        Command::Verify(a) => cmd_verify(a),
        Command::Tradeoff(a) => cmd_tradeoff(a).map(Outcome::from),
    })?;

    let text = outcome.table.render(format)?;
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure {
            code: EXIT_IO,
            message: format!("cannot write {}: {e}", path.display()),
        })?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Ok(()) => {}
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                Err(e) => {
                    return Err(Failure {
                        code: EXIT_IO,
                        message: format!("cannot write to stdout: {e}"),
                    })
                }
            }
        }
    }

    for check in &outcome.checks {
        eprintln!("{check}");
    }
    if outcome.checks.iter().all(|c| c.passed) {
        Ok(0)
    } else {
        Ok(EXIT_VERIFICATION)
    }
}

fn prolate_params(n: usize, w: f64, k: Option<usize>) -> Result<ProlateParams, Failure> {
    let params = match k {
        Some(k) => ProlateParams::new(n, w, k)?,
        None => ProlateParams::with_default_k(n, w)?,
    };
    if params.below_resolution() {
        eprintln!("warning: w = {w} <= 1/(2n); no sequence is well concentrated");
    }
    Ok(params)
}

fn grid(m: Option<usize>, n: usize, factor: usize) -> Result<FrequencyGrid, Failure> {
    Ok(match m {
        Some(m) => FrequencyGrid::new(m)?,
        None => grid_for(n, factor)?,
    })
}

fn cmd_dpss(a: &DpssArgs) -> Result<Table, Failure> {
    let params = prolate_params(a.n, a.w, a.k)?;
    let method = match a.method {
        Solver::Dense => DpssMethod::Dense,
        Solver::Tridiagonal => DpssMethod::Tridiagonal,
    };
    let basis = compute_dpss_with(&params, method)?;

    let mut columns = vec!["index".to_string(), "eigenvalue".to_string()];
    columns.extend((0..params.n()).map(|t| format!("t{t}")));
    let mut table = Table::new(columns)
        .with_meta("n", params.n())
        .with_meta("w", params.w())
        .with_meta("k", params.k())
        .with_meta("big_k", params.big_k())
        .with_meta("shannon_number", format_number(params.shannon_number()))
        .with_meta("trace", format_number(basis.full_eigenvalue_sum()))
        .with_meta("sign_convention", SIGN_CONVENTION)
        .with_meta("gram_deviation", format_number(basis.gram_deviation()));
    if let Some(all) = basis.all_eigenvalues() {
        table.set_meta("eigenvalue_sum", format_number(all.iter().sum()));
    }
    for (j, (seq, lambda)) in basis.sequences().zip(basis.eigenvalues()).enumerate() {
        let mut row = vec![j as f64, *lambda];
        row.extend_from_slice(seq);
        table.push_row(row)?;
    }
    Ok(table)
}

fn cmd_window(a: &WindowArgs) -> Result<Table, Failure> {
    let params = prolate_params(a.n, a.w, a.k)?;
    let grid = grid(a.m, a.n, DEFAULT_GRID_FACTOR)?;
    grid.require(2 * a.n)?;
    let basis = compute_dpss(&params)?;
    let window = spectral_window(&basis, params.k(), &grid)?;
    let split = split_leakage(&window)?;
    let ideal = window.ideal_values();
    let weighted: Vec<f64> = window.values().iter().zip(grid.weights()).map(|(v, h)| v * h).collect();

    let mut table = Table::from_columns(&[
        ("xi", grid.points()),
        ("window", window.values()),
        ("ideal", &ideal),
        ("integral", &weighted),
    ])?;
    table.meta = [
        ("n", params.n().to_string()),
        ("w", params.w().to_string()),
        ("k", params.k().to_string()),
        ("m", grid.len().to_string()),
        ("window_integral", format_number(window.integral())),
        ("l1_distance", format_number(split.total())),
        ("narrow_band", format_number(split.narrow_band)),
        ("broad_band", format_number(split.broad_band)),
        ("broad_band_from_eigenvalues", format_number(split.broad_band_from_eigenvalues)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    Ok(table)
}

fn cmd_estimate(a: &EstimateArgs) -> Result<Table, Failure> {
    let (record, model) = match (&a.input, &a.model) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure {
                code: EXIT_IO,
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            (SampleRecord::new(read_record(&text, a.column.as_deref())?)?, None)
        }
        (None, Some(spec)) => {
            let model: ProcessModel = spec.parse()?;
            let n = a.n.ok_or_else(|| parameter("--model needs --n"))?;
            ProlateParams::new(n, a.w, 1)?;
            (generate(&model, n, a.seed)?, Some(model))
        }
        _ => return Err(parameter("give exactly one of --input or --model")),
    };
    let n = record.len();
    let grid = grid(a.m, n, 4)?;

    let estimate = match a.method {
        Method::Periodogram => periodogram(&record, &grid)?,
        Method::Tapered => {
            let params = ProlateParams::new(n, a.w, a.taper + 1)?;
            let basis = compute_dpss(&params)?;
            tapered_periodogram(&record, basis.sequence(a.taper), &grid)?
        }
        Method::Multitaper => {
            let params = prolate_params(n, a.w, a.k)?;
            let basis = compute_dpss(&params)?;
            multitaper(&record, &basis, params.k(), &grid)?
        }
    };

    let mut table = Table::from_columns(&[("xi", grid.points()), ("estimate", &estimate.values)])?
        .with_meta("n", n)
        .with_meta("m", grid.len())
        .with_meta("method", estimate.method);
    if let Some(w) = estimate.w {
        table.set_meta("w", w);
    }
    if let Some(model) = model {
        table.set_meta("model", model.description());
        table.set_meta("seed", a.seed);
        table.set_meta("rng", RNG_ALGORITHM);
        table.columns.push("true_spectrum".into());
        for (row, s) in table.rows.iter_mut().zip(true_spectrum(&model, &grid)) {
            row.push(s);
        }
    }
    Ok(table)
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, Failure> {
    let sweep = theorem_sweep(&a.sweep, a.w, a.grid_factor)?;
    let columns = [
        "n",
        "big_k",
        "l1_distance",
        "narrow_band",
        "broad_band",
        "broad_band_from_eigenvalues",
        "eigen_defect",
        "fejer_defect",
        "trace",
        "eigenvalue_sum",
        "trace_sq",
        "spectrum_defect",
        "l1_ratio",
        "fejer_ratio",
        "spectrum_defect_ratio",
    ];
    let mut table = Table::new(columns)
        .with_meta("w", a.w)
        .with_meta("grid_factor", a.grid_factor);
    for r in &sweep.rows {
        table.push_row(vec![
            r.n as f64,
            r.big_k as f64,
            r.l1_distance,
            r.narrow_band,
            r.broad_band,
            r.broad_band_from_eigenvalues,
            r.eigen_defect,
            r.fejer_defect,
            r.trace,
            r.eigenvalue_sum,
            r.trace_sq,
            r.spectrum_defect,
            r.l1_ratio(),
            r.fejer_ratio(),
            r.spectrum_defect_ratio(),
        ])?;
    }
    let checks = sweep.checks();
    table.set_meta("checks_passed", checks.iter().filter(|c| c.passed).count());
    table.set_meta("checks_total", checks.len());
    Ok(Outcome { table, checks })
}

fn cmd_tradeoff(a: &TradeoffArgs) -> Result<Table, Failure> {
    let model: ProcessModel = a.model.parse()?;
    ProlateParams::new(a.n, a.w, 1)?;
    let m = a.m.unwrap_or(4 * a.n);
    let config = TradeoffConfig {
        n: a.n,
        w: a.w,
        k_list: a.k.clone(),
        trials: a.trials,
        seed: a.seed,
        grid_points: m,
    };
    let reports = tradeoff_study(&model, &config)?;
    let first = &reports[0];

    let mut table = if a.pointwise {
        let mut columns = vec!["xi".to_string(), "true_spectrum".to_string()];
        for r in &reports {
            for name in ["mean", "expected", "bias", "variance", "standard_error", "mse"] {
                columns.push(format!("{name}_k{}", r.big_k));
            }
        }
        let mut table = Table::new(columns);
        for i in 0..first.grid.len() {
            let mut row = vec![first.grid.points()[i], first.true_spectrum[i]];
            for r in &reports {
                row.extend([
                    r.mean[i],
                    r.expected[i],
                    r.pointwise_bias[i],
                    r.pointwise_variance[i],
                    r.standard_errors[i],
                    r.pointwise_mse[i],
                ]);
            }
            table.push_row(row)?;
        }
        table
    } else {
        let mut table = Table::new([
            "k",
            "l1_distance",
            "mse",
            "bias_sq_plus_variance",
            "mean_abs_bias",
            "mean_standard_error",
            "mean_variance",
            "mean_variance_se",
            "fraction_within_3se",
            "leakage_gap",
            "leakage_bound",
            "smoothing_term",
            "w_squared",
            "log_n_over_k",
            "inv_k",
        ]);
        for r in &reports {
            let b = bias_bound_report(r)?;
            table.push_row(vec![
                r.big_k as f64,
                r.l1_distance,
                r.mse_summary,
                r.bias_variance_summary,
                r.mean_abs_bias(),
                r.mean_standard_error(),
                r.mean_variance,
                r.mean_variance_se,
                r.fraction_within(3.0),
                b.leakage_gap,
                b.leakage_bound,
                b.smoothing_term,
                b.bound_terms.w_squared,
                b.bound_terms.log_n_over_k,
                b.bound_terms.inv_k,
            ])?;
        }
        table
    };

    table.set_meta("model", first.model.as_str());
    table.set_meta("n", a.n);
    table.set_meta("w", a.w);
    table.set_meta("m", m);
    table.set_meta("trials", a.trials);
    table.set_meta("seed", a.seed);
    table.set_meta("rng", RNG_ALGORITHM);
    if reports.len() >= 2 {
        let last = &reports[reports.len() - 1];
        let ratios = interior_variance_ratios(first, last)?;
        if !ratios.is_empty() {
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            table.set_meta(
                format!("variance_ratio_k{}_k{}", first.big_k, last.big_k),
                format_number(mean),
            );
        }
    }
    Ok(table)
}
