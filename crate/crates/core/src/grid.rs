// SPDX-License-Identifier: Apache-2.0

//! Time grids in `τ = ωt`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridKind {
    #[default]
    Linear,
    /// `τ = 0` followed by log-spaced points.
    Log,
}

impl GridKind {
    pub fn name(self) -> &'static str {
        match self {
            GridKind::Linear => "linear",
            GridKind::Log => "log",
        }
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GridKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(GridKind::Linear),
            "log" | "logarithmic" => Ok(GridKind::Log),
            other => Err(format!("unknown grid '{other}' (expected linear or log)")),
        }
    }
}

/// `n` evenly spaced points on `[0, tau_max]`, endpoints included exactly.
pub fn linear(tau_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(tau_max.is_finite() && tau_max > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "tau_max must be > 0, got {tau_max}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 points, got {n}"
        )));
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i + 1 == n {
                tau_max
            } else {
                tau_max * i as f64 / last
            }
        })
        .collect())
}

/// `τ = 0` followed by `n − 1` log-spaced points on `[tau_min, tau_max]`.
pub fn log(tau_min: f64, tau_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(tau_min > 0.0 && tau_max.is_finite() && tau_max > tau_min) {
        return Err(Error::InvalidGrid(format!(
            "log grid needs 0 < tau_min < tau_max, got [{tau_min}, {tau_max}]"
        )));
    }
    if n < 3 {
        return Err(Error::InvalidGrid(format!(
            "log grid needs at least 3 points, got {n}"
        )));
    }
    let (lo, hi) = (tau_min.ln(), tau_max.ln());
    let m = (n - 2) as f64;
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    out.extend((0..n - 1).map(|i| match i {
        0 => tau_min,
        i if i == n - 2 => tau_max,
        i => (lo + (hi - lo) * i as f64 / m).exp(),
    }));
    Ok(out)
}

/// Point count for a log grid with `per_decade` points per decade, plus the origin.
pub fn log_points(tau_min: f64, tau_max: f64, per_decade: usize) -> usize {
    let decades = (tau_max / tau_min).log10().max(0.0);
    (decades * per_decade as f64).ceil() as usize + 2
}

pub fn build(kind: GridKind, tau_min: f64, tau_max: f64, n: usize) -> Result<Vec<f64>> {
    match kind {
        GridKind::Linear => linear(tau_max, n),
        GridKind::Log => log(tau_min, tau_max, n),
    }
}
