//! `cglmp`: Bell-violation thresholds of filtered qudit mixtures.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cglmp_core::{Functional, StateKind};

#[derive(Debug, Parser)]
#[command(name = "cglmp", version, about = "CGLMP/CHSH violation of qudit mixtures before and after local filtering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format (`region` and `tables` default to csv, others to json).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Bound the worker pool.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Accepted and ignored: every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StateArgs {
    /// Local dimension.
    #[arg(long)]
    pub d: usize,
    /// max-entangled or max-violating.
    #[arg(long, default_value = "max-entangled")]
    pub state: StateKind,
    /// cglmp or chsh-optimal (default: chsh-optimal for d=2, cglmp otherwise).
    #[arg(long)]
    pub functional: Option<Functional>,
    /// Largest d evaluated through explicit density matrices.
    #[arg(long, default_value_t = cglmp_core::search::DEFAULT_ORACLE_CAP)]
    pub oracle_cap: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bell value at one point.
    Value {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        filtered: bool,
        #[arg(long)]
        xi: Option<f64>,
    },
    /// Mixing parameter above which the Bell value exceeds 2.
    Threshold {
        #[command(flatten)]
        state: StateArgs,
        /// Apply coupled local filters (optimizing ξ unless --xi is given).
        #[arg(long)]
        filtered: bool,
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Filter strength minimizing the filtered threshold.
    Optimize {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Schmidt coefficients maximizing the pure-state CGLMP value.
    Gammas {
        #[arg(long)]
        d: usize,
        /// Extra cosine-bump restarts after the uniform and reference seeds.
        #[arg(long, default_value_t = 2)]
        restarts: usize,
        /// Search only mirror-symmetric coefficients.
        #[arg(long)]
        symmetric: bool,
    },
    /// Bell values on a (q, ξ) grid for plotting.
    Region {
        #[command(flatten)]
        state: StateArgs,
        /// `start:stop:n`, n evenly spaced points inclusive.
        #[arg(long, default_value = "0.4:1:61")]
        q_grid: commands::GridSpec,
        #[arg(long, default_value = "0.01:1:100")]
        xi_grid: commands::GridSpec,
    },
    /// Recompute the threshold tables (1: maximally entangled, 2: maximally violating).
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
    },
    /// Run the cross-check suite; exits 3 if any check fails.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.seed;
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli.command, cli.format, cli.output.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
