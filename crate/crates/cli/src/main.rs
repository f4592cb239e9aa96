//! `orbidr`: double ramification cycles for `B Z_m` targets from the command
//! line.
//!
//! Exit codes: 0 success, 1 internal error or failed self-test, 2 invalid
//! input, 3 the `r` samples do not lie on a polynomial.

mod commands;
mod problem;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orbidr_core::{EngineConfig, Error};

use problem::BranchChoice;

#[derive(Parser)]
#[command(name = "orbidr", version, about = "Double ramification cycles with cyclic orbifold targets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the DR cycle of a problem file.
    Dr {
        problem: PathBuf,
        #[arg(long, value_enum)]
        branch: Option<BranchChoice>,
        /// Include per-term coefficients as polynomials in r.
        #[arg(long)]
        emit_rpoly: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-term polynomials in r of the graph sum up to a degree.
    Poly {
        problem: PathBuf,
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long, value_enum)]
        branch: Option<BranchChoice>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the stable graphs of genus g with n legs.
    Graphs {
        g: u32,
        n: usize,
        #[arg(long)]
        max_edges: Option<usize>,
    },
    /// Count weight functions on every decorated graph of a problem.
    Weights {
        problem: PathBuf,
        #[arg(long)]
        r: u64,
        #[arg(long, value_enum)]
        branch: Option<BranchChoice>,
    },
    /// A ψ intersection number; exponents separated by commas or spaces.
    Psi {
        g: u32,
        exponents: Vec<String>,
    },
    /// Run built-in consistency checks.
    Selftest,
}

/// A command failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: String) -> Self {
        Failure { code: 2, message }
    }

    pub fn internal(message: String) -> Self {
        Failure { code: 1, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotPolynomial { .. } => 3,
            Error::NonNilpotentInput | Error::NotDivisible => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn env_config() -> Result<EngineConfig, Failure> {
    let mut config = EngineConfig::default();
    if let Ok(v) = std::env::var("ORBIDR_RBOUND_FACTOR") {
        config.rbound_factor = v
            .parse()
            .ok()
            .filter(|&f| f > 0)
            .ok_or_else(|| Failure::input(format!("ORBIDR_RBOUND_FACTOR must be a positive integer, got {v:?}")))?;
    }
    if let Ok(v) = std::env::var("ORBIDR_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::input(format!("ORBIDR_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::internal(format!("thread pool: {e}")))?;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = env_config()?;
    match cli.command {
        Command::Dr { problem, branch, emit_rpoly, out } => {
            commands::dr(&problem, branch, emit_rpoly, out.as_deref(), &config)
        }
        Command::Poly { problem, degree, branch, out } => {
            commands::poly(&problem, degree, branch, out.as_deref(), &config)
        }
        Command::Graphs { g, n, max_edges } => commands::graphs(g, n, max_edges),
        Command::Weights { problem, r, branch } => commands::weights(&problem, r, branch),
        Command::Psi { g, exponents } => commands::psi(g, &exponents),
        Command::Selftest => commands::selftest(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
