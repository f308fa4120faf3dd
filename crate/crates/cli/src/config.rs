// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` run configuration with command-line overrides.
//!
//! Keys mirror the long flags one-to-one (`phi-inf` ⇔ `--phi-inf`); `_` is
//! accepted in place of `-`. Lines starting with `#` are comments.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use twolevel::grid::{self, GridKind};
use twolevel::{Family, PulseShape};

use crate::error::{CliError, CliResult};

/// Every key a config file or flag may set, in metadata order.
pub const KEYS: [&str; 17] = [
    "family",
    "phi-inf",
    "gamma",
    "eta",
    "beta",
    "upsilon",
    "tau-min",
    "tau-max",
    "points",
    "grid",
    "tolerance",
    "threshold",
    "sweep-param",
    "sweep-from",
    "sweep-to",
    "sweep-points",
    "out",
];

pub const DEFAULT_TAU_MAX: f64 = 100.0;
pub const DEFAULT_TAU_MIN: f64 = 1e-2;
pub const DEFAULT_LINEAR_POINTS: usize = 2001;
pub const DEFAULT_POINTS_PER_DECADE: usize = 50;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_SWEEP_POINTS: usize = 11;

/// Unvalidated key/value settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<&'static str, String>,
}

fn canonical_key(key: &str) -> Option<&'static str> {
    let k = key.trim().to_ascii_lowercase().replace('_', "-");
    KEYS.iter().copied().find(|&known| known == k)
}

impl RawConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    i + 1
                ))
            })?;
            let canonical = canonical_key(key).ok_or_else(|| {
                CliError::config(format!("line {}: unknown key `{}`", i + 1, key.trim()))
            })?;
            if cfg
                .values
                .insert(canonical, value.trim().to_string())
                .is_some()
            {
                return Err(CliError::config(format!(
                    "line {}: key `{canonical}` given twice",
                    i + 1
                )));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Sets `key`, replacing any earlier value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> CliResult<()> {
        let canonical =
            canonical_key(key).ok_or_else(|| CliError::config(format!("unknown key `{key}`")))?;
        self.values.insert(canonical, value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &'static str) -> CliResult<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::config(format!("{key} = `{v}`: {e}")))
            })
            .transpose()
    }
}

/// Parameters a shape may take; which ones apply depends on the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeParams {
    pub family: Family,
    pub phi_inf: f64,
    pub gamma: f64,
    pub eta: f64,
    pub beta: f64,
    pub upsilon: f64,
}

/// A scalar parameter that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    PhiInf,
    Gamma,
    Eta,
    Beta,
    Upsilon,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::PhiInf => "phi-inf",
            SweepParam::Gamma => "gamma",
            SweepParam::Eta => "eta",
            SweepParam::Beta => "beta",
            SweepParam::Upsilon => "upsilon",
        }
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match canonical_key(s) {
            Some("phi-inf") => Ok(SweepParam::PhiInf),
            Some("gamma") => Ok(SweepParam::Gamma),
            Some("eta") => Ok(SweepParam::Eta),
            Some("beta") => Ok(SweepParam::Beta),
            Some("upsilon") => Ok(SweepParam::Upsilon),
            _ => Err(format!(
                "cannot sweep `{s}` (expected phi-inf, gamma, eta, beta or upsilon)"
            )),
        }
    }
}

fn applicable(family: Family) -> &'static [&'static str] {
    match family {
        Family::RationalPower => &["phi-inf", "gamma", "eta"],
        Family::EssentialSingularity => &["phi-inf", "gamma"],
        Family::GaussianModulated => &["phi-inf", "gamma", "beta"],
        Family::Rabi => &["upsilon"],
    }
}

impl ShapeParams {
    pub fn build(&self) -> twolevel::Result<PulseShape> {
        match self.family {
            Family::RationalPower => PulseShape::rational_power(self.phi_inf, self.gamma, self.eta),
            Family::EssentialSingularity => {
                PulseShape::essential_singularity(self.phi_inf, self.gamma)
            }
            Family::GaussianModulated => {
                PulseShape::gaussian_modulated(self.phi_inf, self.gamma, self.beta)
            }
            Family::Rabi => PulseShape::rabi(self.upsilon),
        }
    }

    pub fn with(mut self, param: SweepParam, value: f64) -> Self {
        match param {
            SweepParam::PhiInf => self.phi_inf = value,
            SweepParam::Gamma => self.gamma = value,
            SweepParam::Eta => self.eta = value,
            SweepParam::Beta => self.beta = value,
            SweepParam::Upsilon => self.upsilon = value,
        }
        self
    }

    /// `(key, value)` for the parameters the family uses.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        applicable(self.family)
            .iter()
            .map(|&k| {
                let v = match k {
                    "phi-inf" => self.phi_inf,
                    "gamma" => self.gamma,
                    "eta" => self.eta,
                    "beta" => self.beta,
                    _ => self.upsilon,
                };
                (k, v)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl SweepSpec {
    /// Evenly spaced values, endpoints included exactly.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / last
                }
            })
            .collect()
    }
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub shape_params: ShapeParams,
    pub shape: PulseShape,
    pub tau_min: f64,
    pub tau_max: f64,
    pub points: usize,
    pub grid: GridKind,
    pub tolerance: f64,
    pub threshold: f64,
    pub sweep: Option<SweepSpec>,
    pub out: Option<PathBuf>,
}

fn positive(key: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(format!(
            "{key} must be finite and > 0, got {v}"
        )))
    }
}

impl RunConfig {
    pub fn resolve(raw: &RawConfig) -> CliResult<Self> {
        let family: Family = raw
            .parsed("family")?
            .ok_or_else(|| CliError::config("no pulse family given (--family)"))?;
        let allowed = applicable(family);
        for key in ["phi-inf", "gamma", "eta", "beta", "upsilon"] {
            if raw.get(key).is_some() && !allowed.contains(&key) {
                return Err(CliError::config(format!(
                    "{key} does not apply to the {family} family"
                )));
            }
        }
        let required = |key: &'static str| -> CliResult<f64> {
            raw.parsed(key)?
                .ok_or_else(|| CliError::config(format!("{family} needs --{key}")))
        };
        let shape_params = ShapeParams {
            family,
            phi_inf: if family == Family::Rabi {
                0.0
            } else {
                required("phi-inf")?
            },
            gamma: raw.parsed("gamma")?.unwrap_or(1.0),
            eta: raw.parsed("eta")?.unwrap_or(2.0),
            beta: raw.parsed("beta")?.unwrap_or(0.0),
            upsilon: if family == Family::Rabi {
                required("upsilon")?
            } else {
                0.0
            },
        };
        let shape = shape_params.build()?;

        let grid: GridKind = raw.parsed("grid")?.unwrap_or_default();
        let tau_max = positive("tau-max", raw.parsed("tau-max")?.unwrap_or(DEFAULT_TAU_MAX))?;
        let tau_min = positive("tau-min", raw.parsed("tau-min")?.unwrap_or(DEFAULT_TAU_MIN))?;
        if grid == GridKind::Log && tau_min >= tau_max {
            return Err(CliError::config(format!(
                "tau-min ({tau_min}) must be below tau-max ({tau_max})"
            )));
        }
        let points = match raw.parsed::<usize>("points")? {
            Some(n) => n,
            None => match grid {
                GridKind::Linear => DEFAULT_LINEAR_POINTS,
                GridKind::Log => grid::log_points(tau_min, tau_max, DEFAULT_POINTS_PER_DECADE),
            },
        };
        if points < 2 {
            return Err(CliError::config(format!(
                "points must be >= 2, got {points}"
            )));
        }
        let tolerance = positive(
            "tolerance",
            raw.parsed("tolerance")?.unwrap_or(DEFAULT_TOLERANCE),
        )?;
        let threshold = positive(
            "threshold",
            raw.parsed("threshold")?.unwrap_or(DEFAULT_THRESHOLD),
        )?;

        let sweep = match raw.parsed::<SweepParam>("sweep-param")? {
            None => {
                for key in ["sweep-from", "sweep-to", "sweep-points"] {
                    if raw.get(key).is_some() {
                        return Err(CliError::config(format!("{key} given without sweep-param")));
                    }
                }
                None
            }
            Some(param) => {
                if !allowed.contains(&param.key()) {
                    return Err(CliError::config(format!(
                        "cannot sweep {} for the {family} family",
                        param.key()
                    )));
                }
                let need = |key: &'static str| -> CliResult<f64> {
                    raw.parsed(key)?
                        .ok_or_else(|| CliError::config(format!("sweep needs --{key}")))
                };
                let spec = SweepSpec {
                    param,
                    from: need("sweep-from")?,
                    to: need("sweep-to")?,
                    points: raw.parsed("sweep-points")?.unwrap_or(DEFAULT_SWEEP_POINTS),
                };
                if spec.points == 0 {
                    return Err(CliError::config("sweep-points must be >= 1"));
                }
                for v in [spec.from, spec.to] {
                    shape_params.with(param, v).build()?;
                }
                Some(spec)
            }
        };

        Ok(RunConfig {
            shape_params,
            shape,
            tau_min,
            tau_max,
            points,
            grid,
            tolerance,
            threshold,
            sweep,
            out: raw.get("out").filter(|s| !s.is_empty()).map(PathBuf::from),
        })
    }

    pub fn taus(&self) -> twolevel::Result<Vec<f64>> {
        grid::build(self.grid, self.tau_min, self.tau_max, self.points)
    }
}
