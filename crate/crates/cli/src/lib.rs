// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: drive and probability time series as CSV, oracle
//! verification, infinite-time limits and parameter sweeps.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{execute, Command};
use crate::config::{RawConfig, RunConfig};
use crate::error::{exit, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "twolevel",
    version,
    about = "Reverse-engineered drives for two-level systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Write Υ(τ)/ω and the denominator √(1 − Φ² − Φ'²) on a τ grid.
    Synthesize(Options),
    /// Write the transition probability P₊₋(τ) on a τ grid.
    Probability(Options),
    /// Compare the closed-form probability with direct integration.
    Verify(Options),
    /// Estimate P₊₋(∞) and compare with the asymptotic formula.
    Limit(Options),
    /// Sweep one parameter and report P₊₋(τ_max) against the prediction.
    Sweep(Options),
}

/// Every option also exists as a config-file key of the same name.
#[derive(Debug, Args)]
struct Options {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// rational-power (ex1), essential-singularity (ex2), gaussian-modulated (ex3) or rabi.
    #[arg(long)]
    family: Option<String>,
    /// Φ(∞), in [0, 1).
    #[arg(long = "phi-inf", allow_hyphen_values = true)]
    phi_inf: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Constant Υ/ω for the rabi family.
    #[arg(long, allow_hyphen_values = true)]
    upsilon: Option<String>,
    /// First nonzero τ of a log grid.
    #[arg(long = "tau-min", allow_hyphen_values = true)]
    tau_min: Option<String>,
    #[arg(long = "tau-max", allow_hyphen_values = true)]
    tau_max: Option<String>,
    /// Grid size (default 2001 linear, 50 per decade log).
    #[arg(long)]
    points: Option<String>,
    /// linear or log.
    #[arg(long)]
    grid: Option<String>,
    /// Integrator tolerance (verify) or convergence tolerance (limit).
    #[arg(long, allow_hyphen_values = true)]
    tolerance: Option<String>,
    /// Largest accepted verification error.
    #[arg(long, allow_hyphen_values = true)]
    threshold: Option<String>,
    #[arg(long = "sweep-param")]
    sweep_param: Option<String>,
    #[arg(long = "sweep-from", allow_hyphen_values = true)]
    sweep_from: Option<String>,
    #[arg(long = "sweep-to", allow_hyphen_values = true)]
    sweep_to: Option<String>,
    #[arg(long = "sweep-points")]
    sweep_points: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<String>,
}

impl Options {
    fn into_raw(self) -> CliResult<RawConfig> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::load(path)?,
            None => RawConfig::default(),
        };
        let overrides = [
            ("family", self.family),
            ("phi-inf", self.phi_inf),
            ("gamma", self.gamma),
            ("eta", self.eta),
            ("beta", self.beta),
            ("upsilon", self.upsilon),
            ("tau-min", self.tau_min),
            ("tau-max", self.tau_max),
            ("points", self.points),
            ("grid", self.grid),
            ("tolerance", self.tolerance),
            ("threshold", self.threshold),
            ("sweep-param", self.sweep_param),
            ("sweep-from", self.sweep_from),
            ("sweep-to", self.sweep_to),
            ("sweep-points", self.sweep_points),
            ("out", self.out),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                raw.set(key, v)?;
            }
        }
        Ok(raw)
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let (command, options) = match cli.command {
        Sub::Synthesize(o) => (Command::Synthesize, o),
        Sub::Probability(o) => (Command::Probability, o),
        Sub::Verify(o) => (Command::Verify, o),
        Sub::Limit(o) => (Command::Limit, o),
        Sub::Sweep(o) => (Command::Sweep, o),
    };
    let cfg = RunConfig::resolve(&options.into_raw()?)?;
    let outcome = execute(command, &cfg)?;
    output::emit(&outcome.table.render(), cfg.out.as_deref(), stdout)?;
    for line in &outcome.summary {
        let _ = writeln!(stderr, "{line}");
    }
    outcome.failure.map_or(Ok(()), Err)
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return exit::CONFIG;
            }
            let _ = write!(stdout, "{}", e.render());
            return exit::OK;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(stderr, "twolevel: {e}");
            e.exit_code()
        }
    }
}
