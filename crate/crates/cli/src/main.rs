//! `regbench` command-line tool.
//!
//! Exit status is 0 on success, 1 when the work itself fails and 2 for
//! malformed invocations. `REGBENCH_OUT` overrides `--out`.

mod commands;
mod config;
mod data;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use regbench::advisor::{Objective, SparsityPrior};
use regbench::harness::Preset;
use regbench::{BetaDist, Dispersion, Hyperparameter};

#[derive(Parser, Debug)]
#[command(name = "regbench", version, about = "Regularization simulation workbench")]
pub struct Cli {
    /// TOML file with defaults for the flags below and grid overrides.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overridden by REGBENCH_OUT).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Root seed of every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Comma-separated penalty grid replacing the default.
    #[arg(long, global = true, value_parser = config::parse_alpha_grid)]
    pub alpha_grid: Option<config::AlphaGrid>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate one data set and write it as CSV.
    Generate(SimArgs),
    /// Run (or resume) a simulation sweep into the result store.
    Run {
        #[arg(long)]
        preset: Option<Preset>,
    },
    /// Per-method summary of one metric from the result store.
    Analyze {
        #[arg(long, default_value = "f1")]
        metric: String,
        /// Comma-separated hyperparameters to group by.
        #[arg(long, value_delimiter = ',')]
        group_by: Vec<Hyperparameter>,
    },
    /// Knockoff filter on a simulated data set with known covariance.
    Knockoff {
        #[command(flatten)]
        sim: SimArgs,
        /// Target false discovery rate.
        #[arg(long, default_value_t = 0.2)]
        q: f64,
    },
    /// Stability selection on a CSV data set.
    Stability {
        data: PathBuf,
        #[arg(long)]
        response: Option<String>,
        #[arg(long, default_value_t = 0.6)]
        pi_thr: f64,
        #[arg(long, default_value_t = 50)]
        m_iters: usize,
    },
    /// Recommend a regularization method for a CSV data set.
    Advise {
        data: PathBuf,
        #[arg(long, default_value = "prediction")]
        objective: Objective,
        #[arg(long, default_value = "unknown")]
        prior: SparsityPrior,
        #[arg(long)]
        response: Option<String>,
    },
    /// Effect-size tables and timing summaries from the result store.
    Report {
        #[arg(long, value_enum, default_value = "all")]
        table: ReportTable,
        #[arg(long, default_value_t = 3)]
        top: usize,
    },
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportTable {
    F1,
    L2,
    Rmse,
    Timing,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    #[arg(long, default_value_t = 16)]
    pub p: usize,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub rank_ratio: f64,
    #[arg(long, default_value = "low")]
    pub dispersion: Dispersion,
    #[arg(long, default_value = "uniform")]
    pub beta: BetaDist,
    #[arg(long, default_value_t = 0.15)]
    pub sparsity: f64,
    #[arg(long, default_value_t = 1.0)]
    pub snr: f64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
