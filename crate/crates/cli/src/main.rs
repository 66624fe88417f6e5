//! `fracsl`: solve, study, or validate the fractional Sturm-Liouville
//! boundary-value problem from the command line.

mod output;
mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fracsl::convergence::{run_study_with, ProbeFraction, StudyError};
use fracsl::oracle::analytic_alpha1;
use fracsl::{parse_potential, solve_with, ProblemSpec, SolveError, SolveOptions};

#[derive(Debug, Parser)]
#[command(name = "fracsl", version, about = "Fractional Sturm-Liouville boundary-value solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve on one grid and print t, f for every node.
    Solve(SolveArgs),
    /// Solve on a doubling ladder of grids and estimate convergence rates at probe nodes.
    Study(StudyArgs),
    /// Run operator and solver spot checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProblemArgs {
    /// Fractional order in (0, 1].
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Spectral parameter.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Potential q(t), e.g. "0", "t^2", "sin(pi*t)".
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub q: String,
    /// Domain length.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub b: f64,
    /// Right boundary value f(b).
    #[arg(long = "L", default_value_t = 1.0, allow_negative_numbers = true)]
    #[serde(rename = "L")]
    pub l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Decimal places for CSV values.
    #[arg(long, default_value_t = 8)]
    pub precision: usize,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Number of grid intervals.
    #[arg(long)]
    n: usize,
    /// Apply one step of iterative refinement (off for reproduction runs).
    #[arg(long)]
    refine: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct StudyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Strictly doubling grid sizes, e.g. 256,512,1024,2048.
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Probe locations as fractions of b.
    #[arg(long, value_delimiter = ',', default_value = "1/4,1/2,3/4")]
    probes: Vec<ProbeFraction>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Number of grid intervals for the checks.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Test integrand for the operator checks.
    #[arg(long, default_value = "cos(t)", allow_hyphen_values = true)]
    pub phi: String,
}

/// Failure with its exit code: 1 for domain errors, 2 for numerical ones.
#[derive(Debug)]
pub enum CliError {
    Domain(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Domain(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(err: SolveError) -> Self {
        match err {
            SolveError::Linear(_) => CliError::Numerical(err.to_string()),
            SolveError::Domain(_) | SolveError::Assembly(_) => CliError::Domain(err.to_string()),
        }
    }
}

impl From<StudyError> for CliError {
    fn from(err: StudyError) -> Self {
        match err {
            StudyError::Solve { n, source } => match CliError::from(source) {
                CliError::Domain(m) => CliError::Domain(format!("n = {n}: {m}")),
                CliError::Numerical(m) => CliError::Numerical(format!("n = {n}: {m}")),
            },
            StudyError::Rate { .. } => CliError::Numerical(err.to_string()),
            StudyError::EmptyLadder | StudyError::NotDoubling { .. } | StudyError::ProbeOffGrid { .. } => {
                CliError::Domain(err.to_string())
            }
        }
    }
}

impl ProblemArgs {
    pub fn to_spec(&self) -> Result<ProblemSpec, CliError> {
        let potential = parse_potential(&self.q).map_err(|e| CliError::Domain(format!("--q: {e}")))?;
        let spec = ProblemSpec::new(self.alpha, self.lambda, potential, self.b, self.l)
            .map_err(|e| CliError::Domain(e.to_string()))?;
        if spec.alpha() == 1.0 && spec.lambda() < 0.0 && spec.potential().is_literal_zero() {
            analytic_alpha1(spec.lambda(), spec.b(), spec.right_value(), 0.0)
                .map_err(|e| CliError::Domain(e.to_string()))?;
        }
        Ok(spec)
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| CliError::Domain(format!("cannot create {}: {e}", p.display()))),
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn io_error(err: io::Error) -> CliError {
    CliError::Domain(format!("write failed: {err}"))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("FRACSL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| CliError::Domain(format!("FRACSL_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Domain(format!("thread pool: {e}")))
}

fn run_solve(args: &SolveArgs) -> Result<(), CliError> {
    let spec = args.problem.to_spec()?;
    let solution = solve_with(&spec, args.n, SolveOptions { refine: args.refine })?;
    let mut out = open_output(&args.out.output)?;
    match args.out.format {
        Format::Csv => output::write_solution_csv(&mut out, &solution, args.out.precision),
        Format::Json => {
            let config = output::SolveConfig::new(&args.problem, args.n, args.refine, &args.out);
            output::write_solution_json(&mut out, &config, &solution)
        }
    }
    .and_then(|_| out.flush())
    .map_err(io_error)
}

fn run_study(args: &StudyArgs) -> Result<(), CliError> {
    let spec = args.problem.to_spec()?;
    let records = run_study_with(&spec, &args.n_list, &args.probes, SolveOptions::default())?;
    let mut out = open_output(&args.out.output)?;
    match args.out.format {
        Format::Csv => output::write_study_csv(&mut out, &records, args.out.precision),
        Format::Json => {
            let config = output::StudyConfig::new(&args.problem, &args.n_list, &args.probes, &args.out);
            output::write_study_json(&mut out, &config, spec.b(), &records)
        }
    }
    .and_then(|_| out.flush())
    .map_err(io_error)
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Solve(args) => run_solve(&args),
        Command::Study(args) => run_study(&args),
        Command::Validate(args) => validate::run(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("fracsl: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
