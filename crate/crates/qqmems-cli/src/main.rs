//! `qqmems`: deterministic CSV/JSON artifacts for the 2x3 negativity curves,
//! dual certificates, TGX and ACS searches.
//!
//! Settings resolve as flag > QQMEMS_* environment variable > default.
//! Exit codes: 0 success, 1 usage, 2 failed check, 3 I/O.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Check(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<qqmems::Error> for CliError {
    fn from(e: qqmems::Error) -> Self {
        match e {
            qqmems::Error::Domain { .. } | qqmems::Error::InvalidSpectrum(_) | qqmems::Error::InvalidParams(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Check(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qqmems", version, about = "Maximal negativity of qubit-qutrit states")]
pub struct Cli {
    /// Output file; "-" writes to stdout.
    #[arg(long, short, global = true, env = "QQMEMS_OUTPUT", default_value = "-")]
    pub output: PathBuf,
    /// Base RNG seed.
    #[arg(long, global = true, env = "QQMEMS_SEED", default_value_t = 20_240_601)]
    pub seed: u64,
    /// Run restarts and sweeps on one thread.
    #[arg(long, global = true, env = "QQMEMS_SEQUENTIAL")]
    pub sequential: bool,
    /// Tolerance for re-validating emitted negativities against the trace norm.
    #[arg(long, global = true, env = "QQMEMS_VALIDATE_TOL", default_value_t = 1e-10)]
    pub validate_tol: f64,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// N2, N3, Ndeg over a purity grid.
    Curves(CurvesArgs),
    /// Ndeg against the Hedemann comparison curve.
    Gap(GridArgs),
    /// Verify the dual certificates (JSON report).
    Certify(CertifyArgs),
    /// Maximize the rank-2 TGX family over a purity grid.
    Tgx2(TgxArgs),
    /// Maximize the rank-3 TGX family over a purity grid.
    Tgx3(TgxArgs),
    /// Alternate convex search from random states.
    Acs(AcsArgs),
    /// Fuzz the optimal eigenvalue assignment against brute force.
    Prop1(Prop1Args),
    /// Emit a constructed state as JSON.
    State(StateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, env = "QQMEMS_P_MIN")]
    pub p_min: Option<f64>,
    #[arg(long, env = "QQMEMS_P_MAX")]
    pub p_max: Option<f64>,
    /// Number of grid points (endpoints included).
    #[arg(long, env = "QQMEMS_P_STEPS")]
    pub p_steps: Option<usize>,
    /// Explicit comma-separated purities; overrides the range.
    #[arg(long, env = "QQMEMS_POINTS", value_delimiter = ',')]
    pub points: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CurvesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// Extra points strictly inside (1/3, 3/8).
    #[arg(long, env = "QQMEMS_INSET_STEPS", default_value_t = 0)]
    pub inset_steps: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CertifyArgs {
    /// rank2, rank3, deg or all.
    #[arg(long, env = "QQMEMS_THEOREM", default_value = "all")]
    pub theorem: String,
    /// Grid points per theorem.
    #[arg(long, env = "QQMEMS_CERT_POINTS", default_value_t = 50)]
    pub grid_points: usize,
    /// Single purity instead of a grid.
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TgxArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long, env = "QQMEMS_RESTARTS", default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, env = "QQMEMS_XTOL", default_value_t = 1e-10)]
    pub xtol: f64,
    #[arg(long, env = "QQMEMS_MAX_ITER", default_value_t = 2000)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AcsArgs {
    /// Number of purities drawn uniformly from (p_min, p_max).
    #[arg(long, env = "QQMEMS_RUNS", default_value_t = 100)]
    pub runs: usize,
    #[arg(long, env = "QQMEMS_SAMPLES_PER_P", default_value_t = 1)]
    pub samples_per_p: usize,
    #[arg(long, env = "QQMEMS_P_MIN", default_value_t = 0.2)]
    pub p_min: f64,
    #[arg(long, env = "QQMEMS_P_MAX", default_value_t = 1.0)]
    pub p_max: f64,
    /// Explicit comma-separated purities; overrides the random draw.
    #[arg(long, env = "QQMEMS_POINTS", value_delimiter = ',')]
    pub points: Option<Vec<f64>>,
    #[arg(long, env = "QQMEMS_MAX_ROUNDS", default_value_t = 200)]
    pub max_rounds: usize,
    /// noisy-pure or fixed-purity-spectrum.
    #[arg(long, env = "QQMEMS_ENSEMBLE", default_value = "noisy-pure")]
    pub ensemble: String,
    /// Also write per-round values of selected runs here.
    #[arg(long, env = "QQMEMS_TRACE_OUTPUT")]
    pub trace_output: Option<PathBuf>,
    /// Run indices to include in the trace dump.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub trace_runs: Vec<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Prop1Args {
    #[arg(long, env = "QQMEMS_SPECTRA", default_value_t = 10_000)]
    pub spectra: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StateArgs {
    /// rank2, rank3, deg or spectrum.
    #[arg(long, default_value = "deg")]
    pub kind: String,
    #[arg(long)]
    pub p: Option<f64>,
    /// Six comma-separated eigenvalues (kind = spectrum).
    #[arg(long, value_delimiter = ',')]
    pub spectrum: Option<Vec<f64>>,
}

fn run() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if cli.print_config {
        return commands::print_config(&cli);
    }
    let Some(cmd) = cli.command.clone() else {
        return Err(CliError::Usage("a subcommand is required (see --help)".into()));
    };
    commands::dispatch(&cli, &cmd)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qqmems: {e}");
            ExitCode::from(e.code())
        }
    }
}
