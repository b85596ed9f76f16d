//! `circulant`: tables of partition functions, kernels, gap probabilities and
//! samples for circulant L-ensembles.
//!
//! Exit status: 0 on success, 1 on invalid input, 2 on numerical failure,
//! 3 when `verify` finds a failing check.

mod commands;
mod config;
mod table;

use std::io::Write;
use std::process::ExitCode;

use circulant_core::verify::{run_suite, SuiteOptions, DEFAULT_HOLE_REPS, DEFAULT_SAMPLER_REPS};
use clap::{Parser, Subcommand};

use config::{Format, Params};
use table::{Cell, Table};

/// Environment variable holding the default worker-thread cap.
const THREADS_ENV: &str = "CIRCULANT_THREADS";

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Numerical(String),
}

impl From<circulant_core::Error> for CliError {
    fn from(e: circulant_core::Error) -> Self {
        if e.is_validation() {
            CliError::Invalid(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(name = "circulant", version, about = "Circulant L-ensembles: exact, limiting and sampled quantities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Circulant eigenvalues or the limiting spectral density
    Spectrum(Params),
    /// Dimensionless pressure βP
    Pressure(Params),
    /// Mean density
    Density(Params),
    /// Correlation kernel on a grid of separations
    Kernel(Params),
    /// Fredholm determinant det(I − ξK) on an interval
    Gap(Params),
    /// Particle-count distribution on an interval
    Counting(Params),
    /// Exact samples of the periodic lattice ensemble
    Sample(Params),
    /// Hole probabilities of a two-dimensional lattice against βP
    Hole(Params),
    /// Run verification checks and print the report
    Verify(Params),
}

impl Command {
    fn split(self) -> (&'static str, Params) {
        match self {
            Command::Spectrum(p) => ("spectrum", p),
            Command::Pressure(p) => ("pressure", p),
            Command::Density(p) => ("density", p),
            Command::Kernel(p) => ("kernel", p),
            Command::Gap(p) => ("gap", p),
            Command::Counting(p) => ("counting", p),
            Command::Sample(p) => ("sample", p),
            Command::Hole(p) => ("hole", p),
            Command::Verify(p) => ("verify", p),
        }
    }
}

fn configure_threads(p: &Params) -> Result<(), CliError> {
    let n = match p.threads {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.parse::<usize>()
                    .ok()
                    .filter(|n| *n > 0)
                    .ok_or_else(|| CliError::Invalid(format!("{THREADS_ENV} must be a positive integer")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn emit(p: &Params, text: &str) -> Result<(), CliError> {
    match &p.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Invalid(e.to_string()))
        }
    }
}

fn render(p: &Params, t: &Table) -> String {
    match p.format.unwrap_or(Format::Csv) {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json(),
    }
}

/// Returns whether every check passed.
fn verify(p: &Params) -> Result<bool, CliError> {
    let seed = p.require_seed()?;
    let names = p.suite.clone().unwrap_or_else(|| vec!["all".into()]);
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let options = SuiteOptions {
        seed,
        strict: p.strict,
        sampler_reps: p.reps.unwrap_or(DEFAULT_SAMPLER_REPS),
        hole_reps: p.reps.map_or(DEFAULT_HOLE_REPS, |r| r.min(DEFAULT_HOLE_REPS)),
    };
    let mut report = run_suite(&names, &options);
    if p.omit_timing {
        report = report.without_timing();
    }
    let text = match p.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut t = Table::new(&["id", "error", "tol", "pass", "seconds"]);
            for e in &report.entries {
                t.push(vec![
                    Cell::Text(e.id.clone()),
                    e.error.unwrap_or(f64::NAN).into(),
                    e.tol.into(),
                    e.pass.into(),
                    e.seconds.into(),
                ]);
            }
            t.to_csv()
        }
    };
    emit(p, &text)?;
    Ok(report.pass)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let (name, params) = cli.command.split();
    let p = params.resolve(name)?;
    configure_threads(&p)?;
    let table = match name {
        "spectrum" => commands::spectrum(&p)?,
        "pressure" => commands::pressure(&p)?,
        "density" => commands::density(&p)?,
        "kernel" => commands::kernel(&p)?,
        "gap" => commands::gap(&p)?,
        "counting" => commands::counting(&p)?,
        "sample" => commands::sample(&p)?,
        "hole" => commands::hole(&p)?,
        _ => return Ok(if verify(&p)? { ExitCode::SUCCESS } else { ExitCode::from(3) }),
    };
    emit(&p, &render(&p, &table))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
