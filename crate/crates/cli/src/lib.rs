//! Library half of the `qws` binary: argument parsing, command dispatch and
//! file emission. Kept as a library so integration tests can drive it in-process.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID_COIN: i32 = 2;
pub const EXIT_PROPERTY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qws", version, about = "Scattering computations for two-dimensional quantum walks")]
pub struct Cli {
    /// Output directory; overrides the config's `out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Gate tolerance for the command's primary check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomized property suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check unitarity and the chirality-minor conditions of the coin.
    Validate { config: PathBuf },
    /// Scattering matrix over a sweep of quasi-energies.
    Smatrix {
        config: PathBuf,
        /// Use `N` equispaced quasi-energies instead of the config's list.
        #[arg(long)]
        theta_grid: Option<usize>,
        /// Transverse range of the block; defaults to `n0 + 2`.
        #[arg(long)]
        m: Option<i64>,
        /// Also write an SVG of the diagonal moduli against θ.
        #[arg(long)]
        svg: bool,
    },
    /// Materialize a generalized eigenfunction on the window.
    Eigenfunction {
        config: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, allow_negative_numbers = true)]
        row: i64,
        /// One of L, R, D, U.
        #[arg(long)]
        chirality: String,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        /// Also write PGM and SVG heatmaps.
        #[arg(long)]
        figures: bool,
    },
    /// Run the walk for a number of steps on the window.
    Evolve {
        config: PathBuf,
        #[arg(long)]
        steps: usize,
        /// Initial field as CSV; defaults to a point mass at the origin in chirality L.
        #[arg(long)]
        initial: Option<PathBuf>,
    },
    /// Run property suites and report machine-readable verdicts.
    Verify {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = verify::Suite::All)]
        suite: verify::Suite,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Combinatorial,
    Resolvent,
    Both,
}

/// An error carrying the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_USAGE,
            error: error.into(),
        }
    }

    pub fn with_code(code: i32, msg: impl fmt::Display) -> Self {
        Failure {
            code,
            error: anyhow::anyhow!("{msg}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure::usage(error)
    }
}

impl From<qwscatter::Error> for Failure {
    fn from(error: qwscatter::Error) -> Self {
        Failure::usage(error)
    }
}

pub type CmdResult = std::result::Result<(), Failure>;

fn configure_threads() {
    if let Some(n) = std::env::var("QWS_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a second call in the same process finds the pool already built
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    match commands::dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("qws: {:#}", f.error);
            f.code
        }
    }
}
