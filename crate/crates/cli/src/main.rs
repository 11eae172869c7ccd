//! `pegstress` command-line driver.
//!
//! Exit codes: 0 success, 1 computation failure, 2 input or configuration
//! error. Failures print one `error[<kind>]: <message>` line to stderr.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pegstress::analysis::SweepParameter;
use pegstress::ErrorKind;

pub const CONFIG_ENV: &str = "PEGSTRESS_CONFIG";

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn computation(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn kind(&self) -> &'static str {
        if self.code == 2 {
            "input"
        } else {
            "computation"
        }
    }
}

impl From<pegstress::Error> for CliError {
    fn from(e: pegstress::Error) -> Self {
        match e.kind() {
            ErrorKind::Input => CliError::input(e.to_string()),
            ErrorKind::Computation => CliError::computation(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pegstress", version, about = "Stablecoin peg statistics and paired Monte Carlo stress tests")]
pub struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true, env = CONFIG_ENV, default_value = "pegstress.json")]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Simulation seed; overrides `simulation.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for simulations. Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct CoinArgs {
    /// Comma-separated coin ids; defaults to the configured coins.
    #[arg(long = "coins", alias = "coin", value_delimiter = ',')]
    pub coins: Vec<String>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct SimArgs {
    #[command(flatten)]
    pub coins: CoinArgs,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub days: Option<usize>,
    /// Extreme-day failure multiplier M.
    #[arg(long)]
    pub multiplier: Option<f64>,
    /// Calibration file; defaults to `<out>/calibration.json`.
    #[arg(long)]
    pub calibration: Option<PathBuf>,
    /// Disable the Gaussian noise term.
    #[arg(long)]
    pub no_noise: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// Swept fraction; repeat or comma-separate. Defaults to all three.
    #[arg(long = "param", value_delimiter = ',')]
    pub params: Vec<SweepParameter>,
    /// Comma-separated multipliers; defaults to the configured list.
    #[arg(long = "m-values", value_delimiter = ',')]
    pub m_values: Vec<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Descriptive statistics of price, market cap and volume.
    Stats(CoinArgs),
    /// Peg deviation statistics and rolling volatility.
    Peg(CoinArgs),
    /// Augmented Dickey-Fuller tests on price series.
    Adf(CoinArgs),
    /// Lagged OLS model of daily peg deviation.
    Regress(CoinArgs),
    /// Derive simulation parameters from data.
    Calibrate(CoinArgs),
    /// Paired current-vs-hybrid Monte Carlo run.
    Simulate(SimArgs),
    /// One-dimensional sweeps over the hybrid fractions.
    Sweep(SweepArgs),
    /// Text tables and SVG figures from data and simulation outputs.
    Report(CoinArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {}", w.replace('\n', " "));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind(), e.message.replace('\n', " "));
            ExitCode::from(e.code)
        }
    }
}
