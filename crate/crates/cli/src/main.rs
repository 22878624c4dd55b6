//! `fracrbf` experiment runner. Every subcommand writes one CSV table to `--out` or stdout.

mod commands;
mod config;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Config;
use crate::settings::Settings;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(fracrbf::Error),
    #[error("output failed: {0}")]
    Output(String),
}

impl From<fracrbf::Error> for CliError {
    fn from(e: fracrbf::Error) -> Self {
        match e {
            fracrbf::Error::InvalidParameter(_) | fracrbf::Error::DimensionMismatch { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Output(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fracrbf", version, about = "Gaussian RBF collocation for the fractional Poisson problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Solve a test problem: N, h, c_star, alpha, rms_error, condition, iterations, wall_time
    Solve,
    /// RMS error against N for several shape parameters: c_star, N, rms
    Sweep,
    /// Saturation coefficients |a_alpha| / alpha! of the quasi-interpolant: alpha_index, value
    Saturation,
    /// Collocation and Galerkin Fourier symbols on a frequency grid: xi, E_C, E_G, gap
    Symbols,
    /// Dense against FFT matrix-vector product time: N, h, dense_seconds, fft_seconds
    Bench,
}

/// Lists are comma separated; reals may be written as fractions such as 1/32.
#[derive(Debug, Default, Clone, Args)]
pub struct Flags {
    /// Test problem: ex1 (or ex1:<s>), ex2, ex3, ex4, ex5
    #[arg(long, global = true)]
    problem: Option<String>,
    /// Fractional order(s) alpha in (0, 2)
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Shape parameter(s) c* = eps h
    #[arg(long, global = true)]
    cstar: Option<String>,
    /// Lattice points per axis
    #[arg(long, global = true, conflicts_with = "h")]
    n: Option<String>,
    /// Lattice spacing(s)
    #[arg(long, global = true)]
    h: Option<String>,
    /// Bench domain: interval:a,b | cube:a,b,dim | disk:r | disk:cx,cy,r
    #[arg(long, global = true)]
    domain: Option<String>,
    /// Evaluation grid refinement for the RMS error
    #[arg(long, global = true)]
    refine: Option<String>,
    /// Relative residual tolerance of the linear solve
    #[arg(long, global = true)]
    tol: Option<String>,
    /// auto | direct | cg
    #[arg(long, global = true)]
    solver: Option<String>,
    /// Output file; stdout when absent or '-'
    #[arg(long, global = true)]
    out: Option<String>,
    /// Flat key = value file; flags take precedence over its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Condition number: auto | exact | estimate | none
    #[arg(long, global = true)]
    condition: Option<String>,
    /// Leave timing columns empty so that output is byte-for-byte reproducible
    #[arg(long, global = true)]
    no_wall_time: bool,
    /// gamma = (eps h)^2 for saturation and symbols
    #[arg(long, global = true)]
    gamma: Option<String>,
    /// Evaluation point in lattice units (saturation)
    #[arg(long, global = true)]
    x: Option<String>,
    /// Derivative order beta (saturation)
    #[arg(long, global = true)]
    beta: Option<String>,
    /// Largest coefficient index (saturation)
    #[arg(long, global = true)]
    alpha_max: Option<String>,
    /// Dimension (symbols)
    #[arg(long, global = true)]
    dim: Option<String>,
    /// Number of frequencies in [-pi, pi] (symbols)
    #[arg(long, global = true)]
    points: Option<String>,
    /// Timing repetitions; the minimum is reported (bench)
    #[arg(long, global = true)]
    repeats: Option<String>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.flags.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let settings = Settings::new(cli.flags, config);
    let out = settings.out()?;
    let table = match cli.command {
        Command::Solve => commands::solve(&settings)?,
        Command::Sweep => commands::sweep(&settings)?,
        Command::Saturation => commands::saturation(&settings)?,
        Command::Symbols => commands::symbols(&settings)?,
        Command::Bench => commands::bench(&settings)?,
    };
    table.write(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracrbf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
