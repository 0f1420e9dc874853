//! Command-line runner comparing the one-step-back iteration with Jacobi and
//! Gauss-Seidel on a builtin example or a Matrix Market problem.
//!
//! Exit codes: 0 success, 2 usage, 3 numerical divergence, 4 I/O.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use osb::bench::{
    compare, export_csv, format_g17, write_csv, Budget, ComparisonConfig, Method, MetricKind,
};
use osb::error::{MatrixMarketError, TraceIoError};
use osb::operators::matrix_market::load_matrix_market;
use osb::strategies::StrategyKind;
use osb::{Example3, Problem, ProblemError};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "osb",
    version,
    about = "Compare one-step-back, Jacobi and Gauss-Seidel convergence"
)]
struct Cli {
    /// Builtin problem.
    #[arg(long, value_name = "NAME", value_parser = ["example3"], conflicts_with = "matrix")]
    problem: Option<String>,

    /// Matrix Market file (coordinate real general) defining X -> P X.
    #[arg(long, value_name = "PATH")]
    matrix: Option<PathBuf>,

    /// Initial vector: `zeros`, `fixed-point` (example3 only), an inline
    /// comma-separated list, or a file with one value per line.
    #[arg(long, value_name = "SPEC")]
    x0: Option<String>,

    /// Comma-separated subset of osb, jacobi, gauss-seidel.
    #[arg(long, value_name = "LIST", default_value = "osb,jacobi,gauss-seidel")]
    methods: String,

    /// Coordinate schedule for osb.
    #[arg(long, value_name = "NAME", default_value = "greedy")]
    strategy: StrategyKind,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Stop once the residual sup-norm is at most this.
    #[arg(long = "tol", value_name = "TOL", default_value_t = 1e-12)]
    tolerance: f64,

    /// Budget in normalized iterations (N coordinate updates or one sweep each).
    #[arg(long = "max-iters", value_name = "ITERS", default_value_t = 50.0)]
    max_iterations: f64,

    /// auto, distance or residual.
    #[arg(long, default_value = "auto")]
    metric: MetricKind,

    /// CSV output path; `-` or absent for standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum X0Source {
    /// The problem's own default (example3's `(4.2, 1, 1.5)`).
    Builtin,
    Zeros,
    FixedPoint,
    Inline(Vec<f64>),
    File(PathBuf),
}

impl X0Source {
    fn parse(spec: &str) -> Self {
        match spec {
            "zeros" => X0Source::Zeros,
            "fixed-point" => X0Source::FixedPoint,
            _ => {
                let values: Result<Vec<f64>, _> =
                    spec.split(',').map(|v| v.trim().parse()).collect();
                match values {
                    Ok(v) => X0Source::Inline(v),
                    Err(_) => X0Source::File(PathBuf::from(spec)),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    Example3,
    MatrixMarket(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Stdout,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSource,
    pub x0: X0Source,
    pub methods: Vec<Method>,
    pub strategy: StrategyKind,
    pub seed: u64,
    pub tolerance: f64,
    pub max_iterations: f64,
    pub metric: MetricKind,
    pub output: Output,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("numerical divergence: {0}")]
    Divergence(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Divergence(_) => EXIT_DIVERGENCE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;

    let problem = match cli.matrix {
        Some(path) => ProblemSource::MatrixMarket(path),
        None => ProblemSource::Example3,
    };
    let x0 = match (&problem, cli.x0.as_deref()) {
        (_, Some(spec)) => X0Source::parse(spec),
        (ProblemSource::Example3, None) => X0Source::Builtin,
        (ProblemSource::MatrixMarket(_), None) => {
            return Err(CliError::Usage("--matrix requires --x0".into()));
        }
    };
    if matches!(problem, ProblemSource::MatrixMarket(_)) && x0 == X0Source::FixedPoint {
        return Err(CliError::Usage(
            "--x0 fixed-point is only available for --problem example3".into(),
        ));
    }

    let mut methods = Vec::new();
    for name in cli.methods.split(',').map(str::trim) {
        let m: Method = name
            .parse()
            .map_err(|e: String| CliError::Usage(format!("--methods: {e}")))?;
        if methods.contains(&m) {
            return Err(CliError::Usage(format!("--methods: `{name}` listed twice")));
        }
        methods.push(m);
    }

    if !(cli.tolerance > 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            cli.tolerance
        )));
    }
    if !(cli.max_iterations > 0.0 && cli.max_iterations.is_finite()) {
        return Err(CliError::Usage(format!(
            "--max-iters must be positive, got {}",
            cli.max_iterations
        )));
    }

    let output = match cli.out {
        Some(p) if p.as_os_str() != "-" => Output::File(p),
        _ => Output::Stdout,
    };

    Ok(RunConfig {
        problem,
        x0,
        methods,
        strategy: cli.strategy,
        seed: cli.seed,
        tolerance: cli.tolerance,
        max_iterations: cli.max_iterations,
        metric: cli.metric,
        output,
    })
}

fn read_x0_file(path: &PathBuf) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading --x0 file {}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with(['%', '#']))
        .map(|(k, l)| {
            l.trim().parse().map_err(|_| {
                CliError::Usage(format!(
                    "{}:{}: invalid value `{}`",
                    path.display(),
                    k + 1,
                    l.trim()
                ))
            })
        })
        .collect()
}

fn problem_error(e: ProblemError) -> CliError {
    CliError::Usage(e.to_string())
}

/// Builds the problem described by `config`.
pub fn build_problem(config: &RunConfig) -> Result<Problem, CliError> {
    let explicit = |n: usize| -> Result<Option<Vec<f64>>, CliError> {
        Ok(match &config.x0 {
            X0Source::Builtin | X0Source::FixedPoint => None,
            X0Source::Zeros => Some(vec![0.0; n]),
            X0Source::Inline(v) => Some(v.clone()),
            X0Source::File(p) => Some(read_x0_file(p)?),
        })
    };
    match &config.problem {
        ProblemSource::Example3 => {
            let base = match config.x0 {
                X0Source::FixedPoint => Problem::example3_from(Example3::fixed_point()),
                _ => Problem::example3(),
            };
            match explicit(3)? {
                Some(x0) => base.with_initial(x0).map_err(problem_error),
                None => Ok(base),
            }
        }
        ProblemSource::MatrixMarket(path) => {
            let op = load_matrix_market(path).map_err(|e| match e {
                MatrixMarketError::Io(e) => CliError::Io(format!("{}: {e}", path.display())),
                other => CliError::Usage(format!("{}: {other}", path.display())),
            })?;
            let n = osb::Operator::dim(&op);
            let x0 = explicit(n)?.expect("matrix problems always carry an explicit x0");
            Problem::new(op, x0).map_err(problem_error)
        }
    }
}

fn summary_line(outcome: &osb::bench::MethodOutcome) -> String {
    let status = match (&outcome.error, outcome.converged) {
        (Some(e), _) => format!("diverged: {e}"),
        (None, true) => "converged".to_string(),
        (None, false) => "budget exhausted".to_string(),
    };
    let error = outcome
        .final_error()
        .map_or_else(|| "n/a".to_string(), format_g17);
    format!(
        "{:<13} iteration {:<10} error {:<24} {}",
        outcome.method.label(),
        format_g17(outcome.final_iteration()),
        error,
        status
    )
}

fn trace_io(e: TraceIoError) -> CliError {
    CliError::Io(e.to_string())
}

/// Runs every requested method, writes the CSV and prints one summary line
/// per method. Returns the process exit code.
pub fn run_comparison(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match try_run(config, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "osb: {e}");
            e.exit_code()
        }
    }
}

fn try_run(
    config: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let problem = build_problem(config)?;
    config
        .metric
        .resolve(&problem)
        .map_err(|e| CliError::Usage(format!("--metric: {e}")))?;

    let comparison = ComparisonConfig {
        methods: config.methods.clone(),
        strategy: config.strategy,
        seed: config.seed,
        budget: Budget {
            tolerance: config.tolerance,
            max_iterations: config.max_iterations,
        },
        metric: config.metric,
    };
    let outcomes = compare(&problem, &comparison);
    let traces: Vec<_> = outcomes.iter().map(|o| o.trace.clone()).collect();

    let summary: &mut dyn Write = match &config.output {
        Output::Stdout => {
            write_csv(&traces, &mut *stdout).map_err(trace_io)?;
            stderr
        }
        Output::File(path) => {
            export_csv(&traces, path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            stdout
        }
    };
    for o in &outcomes {
        writeln!(summary, "{}", summary_line(o)).map_err(|e| CliError::Io(e.to_string()))?;
    }

    if outcomes.iter().any(|o| o.error.is_some()) {
        Ok(EXIT_DIVERGENCE)
    } else {
        Ok(EXIT_OK)
    }
}

/// Parses `argv` and runs; the body of the `osb` binary.
pub fn main_with_args<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv) {
        Ok(config) => run_comparison(&config, stdout, stderr),
        Err(CliError::Clap(e)) => {
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            e.exit_code()
        }
        Err(e) => {
            let _ = writeln!(stderr, "osb: {e}");
            e.exit_code()
        }
    }
}
