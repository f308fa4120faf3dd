// SPDX-License-Identifier: Apache-2.0

//! Drive synthesis: the `σ_z` coefficient `Υ(τ)/ω` that realizes a pulse shape.
//!
//! The generic route is
//!
//! ```text
//! Υ/ω = (Φ'' + Φ) / √(1 − Φ² − Φ'²)
//! ```
//!
//! and is authoritative. The three `closed_form_upsilon_ex*` functions are
//! the expanded numerator/denominator forms for the built-in families and
//! exist as an independent algebraic route for cross-checking.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::pulse::{eval_phi, EssentialSingularity, PulseFamily, PulseShape};

/// `Υ/ω` at one instant together with `D = √(1 − Φ² − Φ'²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSample {
    pub tau: f64,
    pub upsilon_over_omega: f64,
    pub denominator: f64,
}

impl DriveSample {
    /// Transition probability `½ − ½D` at the same instant.
    pub fn probability(&self) -> f64 {
        0.5 - 0.5 * self.denominator
    }
}

/// Drive samples over a time grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DriveTrajectory {
    pub samples: Vec<DriveSample>,
}

impl DriveTrajectory {
    pub fn taus(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.tau)
    }

    pub fn upsilon(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.upsilon_over_omega)
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(DriveSample::probability)
    }
}

fn checked_denominator(tau: f64, disc: f64, params: &SystemParams) -> Result<f64> {
    let floor = params.tol_denominator() * params.tol_denominator();
    if disc.is_nan() || disc <= floor {
        return Err(Error::NearSingular { tau, value: disc });
    }
    Ok(disc.sqrt())
}

/// `Υ/ω = (Φ'' + Φ)/√(1 − Φ² − Φ'²)` at `τ`.
pub fn synthesize_upsilon<S: PulseFamily + ?Sized>(
    shape: &S,
    tau: f64,
    params: &SystemParams,
) -> Result<DriveSample> {
    let e = eval_phi(shape, tau)?;
    let denominator = checked_denominator(tau, e.discriminant(), params)?;
    let upsilon_over_omega = (e.d2phi_dtau2 + e.phi) / denominator;
    if !upsilon_over_omega.is_finite() {
        return Err(Error::NonFinite { tau });
    }
    Ok(DriveSample {
        tau,
        upsilon_over_omega,
        denominator,
    })
}

/// Samples the drive on a grid, stopping at the first inadmissible point.
pub fn sample_drive<S: PulseFamily + ?Sized>(
    shape: &S,
    taus: &[f64],
    params: &SystemParams,
) -> Result<DriveTrajectory> {
    let samples = taus
        .iter()
        .map(|&tau| synthesize_upsilon(shape, tau, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(DriveTrajectory { samples })
}

fn finish(tau: f64, numerator: f64, disc: f64, params: &SystemParams) -> Result<f64> {
    let d = checked_denominator(tau, disc, params)?;
    let value = numerator / d;
    if !value.is_finite() {
        return Err(Error::NonFinite { tau });
    }
    Ok(value)
}

/// `N₁/D₁` for [`PulseShape::RationalPower`].
///
/// The expanded form has `1/τ²` terms; `τ = 0` falls back to the generic
/// route, whose limit is finite.
pub fn closed_form_upsilon_ex1(shape: &PulseShape, tau: f64, params: &SystemParams) -> Result<f64> {
    let PulseShape::RationalPower(s) = shape else {
        return Err(Error::FamilyMismatch {
            expected: "rational-power",
            found: shape.name(),
        });
    };
    crate::pulse::check_tau(tau)?;
    if tau == 0.0 {
        return synthesize_upsilon(shape, tau, params).map(|d| d.upsilon_over_omega);
    }
    let p = s.phi_inf().unwrap_or_default();
    let (g2, eta) = (s.gamma() * s.gamma(), s.eta());
    let t = tau;
    let q = t * t * (g2 + t) * (g2 + t);
    let phi = p * (t / (g2 + t)).powf(eta);
    let n1 = (1.0 + eta * g2 * ((eta - 1.0) * g2 - 2.0 * t) / q) * phi;
    let d1_sq = 1.0 - (1.0 + eta * eta * g2 * g2 / q) * phi * phi;
    finish(tau, n1, d1_sq, params)
}

/// `N₂/D₂` for [`PulseShape::EssentialSingularity`]; zero at `τ = 0` by continuity.
pub fn closed_form_upsilon_ex2(shape: &PulseShape, tau: f64, params: &SystemParams) -> Result<f64> {
    let PulseShape::EssentialSingularity(s) = shape else {
        return Err(Error::FamilyMismatch {
            expected: "essential-singularity",
            found: shape.name(),
        });
    };
    crate::pulse::check_tau(tau)?;
    let g = s.gamma();
    if tau == 0.0 || g / tau > EssentialSingularity::UNDERFLOW_EXPONENT {
        return Ok(0.0);
    }
    let p = s.phi_inf().unwrap_or_default();
    let t = tau;
    let t3 = t * t * t;
    let t4 = t3 * t;
    let n2 = p * (g * g / t4 - 2.0 * g / t3 + 1.0) * (-g / t).exp();
    let d2_sq = 1.0 - p * p * (1.0 + g * g / t4) * (-2.0 * g / t).exp();
    finish(tau, n2, d2_sq, params)
}

/// `N₃/D₃` for [`PulseShape::GaussianModulated`].
///
/// The cross term in `N₃` is `4γβτ sin(2βτ)`.
pub fn closed_form_upsilon_ex3(shape: &PulseShape, tau: f64, params: &SystemParams) -> Result<f64> {
    let PulseShape::GaussianModulated(s) = shape else {
        return Err(Error::FamilyMismatch {
            expected: "gaussian-modulated",
            found: shape.name(),
        });
    };
    crate::pulse::check_tau(tau)?;
    let p = s.phi_inf().unwrap_or_default();
    let (g, b, t) = (s.gamma(), s.beta(), tau);
    let c = (b * t).cos();
    let cos2 = c * c;
    let sin_2bt = (2.0 * b * t).sin();
    let cos_2bt = (2.0 * b * t).cos();
    let gauss = (-g * t * t).exp();
    let n3 = p
        * (1.0
            - ((1.0 + 4.0 * g * g * t * t - 2.0 * g) * cos2 + 4.0 * g * b * t * sin_2bt
                - 2.0 * b * b * cos_2bt)
                * gauss);
    let rise = 1.0 - cos2 * gauss;
    let slope = 2.0 * g * t * cos2 + b * sin_2bt;
    let d3_sq = 1.0 - p * p * (rise * rise + slope * slope * gauss * gauss);
    finish(tau, n3, d3_sq, params)
}

/// `Υ(∞)/ω = Φ(∞)/√(1 − Φ(∞)²)`.
pub fn upsilon_asymptote(phi_inf: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&phi_inf) {
        return Err(Error::InvalidParameter {
            name: "phi_inf",
            value: phi_inf,
            reason: "must satisfy 0 <= phi_inf < 1",
        });
    }
    Ok(phi_inf / (1.0 - phi_inf * phi_inf).sqrt())
}

/// Inverse of [`upsilon_asymptote`]: `Φ(∞) = u/√(1 + u²)`.
pub fn phi_from_upsilon(upsilon_inf_over_omega: f64) -> Result<f64> {
    let u = upsilon_inf_over_omega;
    if !(u.is_finite() && u >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "upsilon_inf",
            value: u,
            reason: "must be finite and >= 0",
        });
    }
    Ok(u / (1.0 + u * u).sqrt())
}

/// How `|Υ(τ) − Υ(∞)|` decays over the probed range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Fitted `c/τ^p`.
    PowerLaw { exponent: f64, coefficient: f64 },
    /// Residual drops to round-off inside the probed range.
    FasterThanPolynomial,
    /// No time dependence at all.
    Constant,
    /// No asymptote, or too few usable points for a fit.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    pub upsilon_inf: Option<f64>,
    pub decay: Decay,
    /// `(τ, |Υ(τ)/ω − Υ(∞)/ω|)` at each probe.
    pub residuals: Vec<(f64, f64)>,
    /// Approaches its limit at least as fast as `1/τ` and is not constant.
    pub in_class: bool,
}

/// Residuals at or below this are treated as round-off and left out of the fit.
const RESIDUAL_FLOOR: f64 = 1e-13;
/// Fitted exponents down to `1 − 0.1` still count as `1/τ` decay.
const MIN_EXPONENT: f64 = 0.9;

/// Estimates how the drive approaches `Υ(∞)` on the probe points.
///
/// A log-log least-squares fit of the residual gives the power-law exponent.
/// When the residual is already at round-off on the probes, the drive is
/// scanned at shorter times to tell a Gaussian-fast approach from a drive
/// that never varied.
pub fn classify_asymptotics<S: PulseFamily + ?Sized>(
    shape: &S,
    tau_probe: &[f64],
    params: &SystemParams,
) -> Result<AsymptoticsReport> {
    if tau_probe.len() < 2 {
        return Err(Error::InvalidGrid("need at least two probe points".into()));
    }
    if tau_probe[0] <= 0.0
        || tau_probe
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(Ordering::Greater))
    {
        return Err(Error::InvalidGrid(
            "probe points must be positive and strictly ascending".into(),
        ));
    }
    let Some(upsilon_inf) = shape.upsilon_inf() else {
        return Ok(AsymptoticsReport {
            upsilon_inf: None,
            decay: Decay::Indeterminate,
            residuals: Vec::new(),
            in_class: false,
        });
    };

    let residual = |tau: f64| -> Result<f64> {
        synthesize_upsilon(shape, tau, params).map(|d| (d.upsilon_over_omega - upsilon_inf).abs())
    };
    let residuals = tau_probe
        .iter()
        .map(|&tau| residual(tau).map(|r| (tau, r)))
        .collect::<Result<Vec<_>>>()?;

    let last_above = residuals.iter().rposition(|&(_, r)| r > RESIDUAL_FLOOR);
    let decay = match last_above {
        None => {
            // Nothing left on the probes; look for time dependence earlier on.
            let start = 1e-2_f64.min(tau_probe[0]);
            let span = (tau_probe[0] / start).ln();
            let mut varies = false;
            for i in 0..=200 {
                let tau = start * (span * i as f64 / 200.0).exp();
                if residual(tau)? > 1e-9 {
                    varies = true;
                    break;
                }
            }
            if varies {
                Decay::FasterThanPolynomial
            } else {
                Decay::Constant
            }
        }
        Some(i) if i + 1 < residuals.len() => Decay::FasterThanPolynomial,
        Some(_) => {
            let pts: Vec<(f64, f64)> = residuals
                .iter()
                .filter(|&&(_, r)| r > RESIDUAL_FLOOR)
                .map(|&(t, r)| (t.ln(), r.ln()))
                .collect();
            match fit_line(&pts) {
                Some((slope, intercept)) => Decay::PowerLaw {
                    exponent: -slope,
                    coefficient: intercept.exp(),
                },
                None => Decay::Indeterminate,
            }
        }
    };
    let in_class = match decay {
        Decay::PowerLaw { exponent, .. } => exponent >= MIN_EXPONENT,
        Decay::FasterThanPolynomial => true,
        Decay::Constant | Decay::Indeterminate => false,
    };
    Ok(AsymptoticsReport {
        upsilon_inf: Some(upsilon_inf),
        decay,
        residuals,
        in_class,
    })
}

/// Ordinary least squares `y = slope·x + intercept`.
fn fit_line(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
