// SPDX-License-Identifier: Apache-2.0

//! `xtalk`: crosstalk noise estimation from JSON configs.
//!
//! Exit status is 0 on success, 1 for input errors and 2 for numerical
//! failures. Diagnostics go to stderr; stdout carries only the artifact.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_COUNT: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "xtalk", version, about = "Crosstalk noise models for coupled RC and RLC interconnects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two-pi RC model: closed-form peak noise, width and delays as JSON.
    AnalyzeRc(CommonArgs),
    /// Coupled RLC pair: decoupled modes and time-of-flight peak noise as JSON.
    AnalyzeRlc(CommonArgs),
    /// Reference ladder transient of the configured circuit as CSV.
    Simulate(CommonArgs),
    /// Random corpus of model-vs-simulator comparisons as JSON error statistics.
    Validate(ValidateArgs),
    /// Model and simulator peaks over a parameter grid as CSV.
    Sweep(SweepArgs),
}

/// Overrides shared by every subcommand. Times are in ps, lengths in µm.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Maximum number of waveform samples to emit.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Simulation time step (ps).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Simulation end time (ps).
    #[arg(long)]
    pub tstop: Option<f64>,
    /// Ladder segment length (µm).
    #[arg(long = "segment-um")]
    pub segment_um: Option<f64>,
    /// Evaluate RLC mode lines with the traveling-wave fast path.
    #[arg(long)]
    pub twa: bool,
    /// Use the alternative effective coupling capacitance formula.
    #[arg(long = "ccprime-printed")]
    pub ccprime_printed: bool,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config file.
    pub config: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Optional JSON config with a `corpus` section and sim settings.
    pub config: Option<PathBuf>,
    /// Corpus kind: rc or rlc.
    #[arg(long)]
    pub kind: Option<String>,
    /// Corpus seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of cases.
    #[arg(long)]
    pub count: Option<usize>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON config holding the fixed point (`geometry` or `normalized`).
    pub config: PathBuf,
    /// Swept parameter: zeta, ct, rt, kl, kc, tr or coupling_position.
    #[arg(long)]
    pub param: Option<String>,
    /// Comma-separated grid values (tr in ps, the rest dimensionless).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub grid: Option<Vec<f64>>,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Marks an error as a numerical failure rather than bad input.
#[derive(Debug)]
pub struct NumericalFailure(pub String);

impl std::fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalFailure {}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err.chain().any(|c| {
        c.downcast_ref::<NumericalFailure>().is_some()
            || c.downcast_ref::<xtalk_core::Error>().is_some_and(xtalk_core::Error::is_numerical)
    });
    if numerical {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::AnalyzeRc(a) => commands::analyze_rc(&a),
        Command::AnalyzeRlc(a) => commands::analyze_rlc(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Validate(a) => commands::validate(&a),
        Command::Sweep(a) => commands::sweep(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
