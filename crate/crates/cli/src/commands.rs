// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use rayon::prelude::*;
use twolevel::{
    asymptotic_probability, estimate_infinite_time_limit, probability_at, sample_drive,
    verify_closed_form, PulseFamily, SystemParams,
};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{short, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Synthesize,
    Probability,
    Verify,
    Limit,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Synthesize => "synthesize",
            Command::Probability => "probability",
            Command::Verify => "verify",
            Command::Limit => "limit",
            Command::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The table to write, lines for the terminal, and an error to report after
/// the table has been written (a failed verification still emits its data).
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub summary: Vec<String>,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self {
            table,
            summary: Vec::new(),
            failure: None,
        }
    }
}

fn table(command: Command, cfg: &RunConfig, header: &[&'static str]) -> Table {
    let mut t = Table::new(header);
    t.meta("tool", concat!("twolevel ", env!("CARGO_PKG_VERSION")))
        .meta("command", command)
        .meta("family", cfg.shape_params.family);
    for (k, v) in cfg.shape_params.entries() {
        t.meta(k, short(v));
    }
    t
}

fn with_grid(t: &mut Table, cfg: &RunConfig) {
    t.meta("grid", cfg.grid)
        .meta("tau-max", short(cfg.tau_max))
        .meta("points", cfg.points);
    if cfg.grid == twolevel::grid::GridKind::Log {
        t.meta("tau-min", short(cfg.tau_min));
    }
}

pub fn execute(command: Command, cfg: &RunConfig) -> CliResult<Outcome> {
    match command {
        Command::Synthesize => synthesize(cfg),
        Command::Probability => probability(cfg),
        Command::Verify => verify(cfg),
        Command::Limit => limit(cfg),
        Command::Sweep => sweep(cfg),
    }
}

/// Rows `(tau, upsilon_over_omega, denominator)`.
pub fn synthesize(cfg: &RunConfig) -> CliResult<Outcome> {
    let params = SystemParams::default();
    let drive = sample_drive(&cfg.shape, &cfg.taus()?, &params)?;
    let mut t = table(
        Command::Synthesize,
        cfg,
        &["tau", "upsilon_over_omega", "denominator"],
    );
    with_grid(&mut t, cfg);
    for s in &drive.samples {
        t.push(vec![s.tau, s.upsilon_over_omega, s.denominator]);
    }
    Ok(Outcome::ok(t))
}

/// Rows `(tau, probability)`.
pub fn probability(cfg: &RunConfig) -> CliResult<Outcome> {
    let mut t = table(Command::Probability, cfg, &["tau", "probability"]);
    with_grid(&mut t, cfg);
    for tau in cfg.taus()? {
        t.push(vec![tau, probability_at(&cfg.shape, tau)?.p_plus_to_minus]);
    }
    Ok(Outcome::ok(t))
}

/// Closed form against the Schrödinger oracle on a linear grid.
pub fn verify(cfg: &RunConfig) -> CliResult<Outcome> {
    if cfg.grid != twolevel::grid::GridKind::Linear {
        return Err(CliError::config(
            "verify samples a linear grid; drop grid = log",
        ));
    }
    let r = verify_closed_form(
        &cfg.shape,
        cfg.tau_max,
        cfg.points,
        cfg.tolerance,
        &SystemParams::default(),
    )?;
    let passed = r.max_abs_error <= cfg.threshold;
    let mut t = table(
        Command::Verify,
        cfg,
        &["tau", "closed_form", "oracle", "difference"],
    );
    with_grid(&mut t, cfg);
    t.meta("tolerance", short(cfg.tolerance))
        .meta("threshold", short(cfg.threshold))
        .meta("max-abs-error", short(r.max_abs_error))
        .meta("tau-of-max", short(r.tau_of_max))
        .meta("norm-drift", short(r.norm_drift))
        .meta("steps", r.steps_taken)
        .meta("status", if passed { "pass" } else { "fail" });
    for p in &r.pointwise {
        t.push(vec![p.tau, p.closed_form, p.oracle, p.diff]);
    }
    let summary = vec![format!(
        "verify {}: max |P_closed - P_oracle| = {:.3e} at tau = {} (threshold {:e}, norm drift {:.3e}, {} steps): {}",
        cfg.shape.name(),
        r.max_abs_error,
        r.tau_of_max,
        cfg.threshold,
        r.norm_drift,
        r.steps_taken,
        if passed { "PASS" } else { "FAIL" },
    )];
    let failure = (!passed).then_some(CliError::Verification {
        max_abs_error: r.max_abs_error,
        tau: r.tau_of_max,
        threshold: cfg.threshold,
    });
    Ok(Outcome {
        table: t,
        summary,
        failure,
    })
}

fn predicted_limit(cfg_shape: &impl PulseFamily) -> CliResult<f64> {
    let u = cfg_shape
        .upsilon_inf()
        .ok_or_else(|| CliError::config("shape has no asymptotic drive"))?;
    Ok(asymptotic_probability(u)?)
}

/// One row `(extrapolated, predicted, difference)`.
pub fn limit(cfg: &RunConfig) -> CliResult<Outcome> {
    let predicted = predicted_limit(&cfg.shape)?;
    let extrapolated = estimate_infinite_time_limit(&cfg.shape, cfg.tolerance)?;
    let difference = extrapolated - predicted;
    let mut t = table(
        Command::Limit,
        cfg,
        &["extrapolated", "predicted", "difference"],
    );
    t.meta("tolerance", short(cfg.tolerance));
    t.push(vec![extrapolated, predicted, difference]);
    let summary = vec![format!(
        "limit {}: extrapolated {extrapolated:.15}, predicted {predicted:.15}, difference {difference:.3e}",
        cfg.shape.name()
    )];
    Ok(Outcome {
        table: t,
        summary,
        failure: None,
    })
}

/// One row per swept value: `P(tau_max)` next to the asymptotic prediction.
pub fn sweep(cfg: &RunConfig) -> CliResult<Outcome> {
    let spec = cfg.sweep.ok_or_else(|| {
        CliError::config("sweep needs --sweep-param, --sweep-from and --sweep-to")
    })?;
    let rows = spec
        .values()
        .into_par_iter()
        .map(|v| -> CliResult<Vec<f64>> {
            let shape = cfg.shape_params.with(spec.param, v).build()?;
            let p = probability_at(&shape, cfg.tau_max)?.p_plus_to_minus;
            let predicted = predicted_limit(&shape)?;
            Ok(vec![v, p, predicted, p - predicted])
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut t = table(
        Command::Sweep,
        cfg,
        &[
            spec.param.key(),
            "probability_at_tau_max",
            "predicted_limit",
            "difference",
        ],
    );
    t.meta("tau-max", short(cfg.tau_max))
        .meta("sweep-param", spec.param.key())
        .meta("sweep-from", short(spec.from))
        .meta("sweep-to", short(spec.to))
        .meta("sweep-points", spec.points);
    for row in rows {
        t.push(row);
    }
    Ok(Outcome::ok(t))
}
