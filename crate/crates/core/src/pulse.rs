// SPDX-License-Identifier: Apache-2.0

//! Auxiliary pulse shapes `Φ(τ)`.
//!
//! A shape determines everything else: the drive through
//! `Υ/ω = (Φ'' + Φ)/√(1 − Φ² − Φ'²)` and the probability through
//! `P = ½ − ½√(1 − Φ² − Φ'²)`. A usable shape starts at rest,
//! `Φ(0) = Φ'(0) = 0`, and stays inside the admissible region
//! `0 ≤ Φ < 1`, `Φ² + Φ'² < 1`.
//!
//! Four families are built in, each with closed-form derivatives:
//!
//! | family                 | `Φ(τ)`                                     |
//! |------------------------|--------------------------------------------|
//! | [`RationalPower`]        | `Φ∞ (τ/(γ² + τ))^η`                         |
//! | [`EssentialSingularity`] | `Φ∞ exp(−γ/τ)`                              |
//! | [`GaussianModulated`]    | `Φ∞ (1 − exp(−γτ²) cos²(βτ))`               |
//! | [`Rabi`]                 | `(2u/(1+u²)) sin²(√(1+u²) τ/2)`, constant drive `u` |
//!
//! Additional families plug in by implementing [`PulseFamily`].

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// `Φ` and its first two derivatives with respect to `τ = ωt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiEval {
    pub phi: f64,
    pub dphi_dtau: f64,
    pub d2phi_dtau2: f64,
}

impl PhiEval {
    pub const ZERO: PhiEval = PhiEval {
        phi: 0.0,
        dphi_dtau: 0.0,
        d2phi_dtau2: 0.0,
    };

    /// `1 − Φ² − Φ'²`; strictly positive inside the admissible region.
    pub fn discriminant(&self) -> f64 {
        1.0 - self.phi * self.phi - self.dphi_dtau * self.dphi_dtau
    }
}

/// How the infinite-time limit of `P(τ)` should be estimated for a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extrapolation {
    /// Corrections fall off as powers of `1/τ`; extrapolate in `1/τ`.
    Richardson,
    /// The limit is reached faster than any power; plain convergence suffices.
    Plain,
}

/// A family of auxiliary pulse shapes.
pub trait PulseFamily: Send + Sync {
    fn name(&self) -> &'static str;

    /// Checks the family's parameter invariants.
    fn check(&self) -> Result<()> {
        Ok(())
    }

    /// Analytic `Φ, Φ', Φ''` at `τ ≥ 0`. Callers go through [`eval_phi`],
    /// which validates `τ` and the parameters first.
    fn eval_unchecked(&self, tau: f64) -> PhiEval;

    /// `Φ(∞)`, or `None` when `Φ` has no limit.
    fn phi_inf(&self) -> Option<f64>;

    /// `Υ(∞)/ω` implied by the shape.
    fn upsilon_inf(&self) -> Option<f64> {
        self.phi_inf().map(|p| p / (1.0 - p * p).sqrt())
    }

    fn extrapolation(&self) -> Extrapolation {
        Extrapolation::Richardson
    }
}

fn check_phi_inf(phi_inf: f64) -> Result<()> {
    if !(0.0..1.0).contains(&phi_inf) {
        return Err(Error::InvalidParameter {
            name: "phi_inf",
            value: phi_inf,
            reason: "must satisfy 0 <= phi_inf < 1",
        });
    }
    Ok(())
}

/// `Φ∞ (τ/(γ² + τ))^η` with `γ ≥ 1`, `η ≥ 2`.
///
/// Approaches `Φ∞ (1 − ηγ²/τ)` for large `τ`; `Φ''(0) = 2Φ∞/γ⁴` when `η = 2`
/// and vanishes for `η > 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalPower {
    phi_inf: f64,
    gamma: f64,
    eta: f64,
}

impl RationalPower {
    pub fn new(phi_inf: f64, gamma: f64, eta: f64) -> Result<Self> {
        let shape = Self {
            phi_inf,
            gamma,
            eta,
        };
        shape.check()?;
        Ok(shape)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

impl PulseFamily for RationalPower {
    fn name(&self) -> &'static str {
        "rational-power"
    }

    fn check(&self) -> Result<()> {
        check_phi_inf(self.phi_inf)?;
        if !(self.gamma.is_finite() && self.gamma >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: self.gamma,
                reason: "rational-power requires gamma >= 1",
            });
        }
        if !(self.eta.is_finite() && self.eta >= 2.0) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: self.eta,
                reason: "rational-power requires eta >= 2",
            });
        }
        Ok(())
    }

    fn eval_unchecked(&self, tau: f64) -> PhiEval {
        let g2 = self.gamma * self.gamma;
        let eta = self.eta;
        let s = g2 + tau;
        let x = tau / s;
        let dx = g2 / (s * s);
        let d2x = -2.0 * g2 / (s * s * s);
        // powf(0, 0) = 1 keeps Φ''(0) right for η = 2.
        let x_em2 = x.powf(eta - 2.0);
        let x_em1 = x_em2 * x;
        PhiEval {
            phi: self.phi_inf * x_em1 * x,
            dphi_dtau: self.phi_inf * eta * x_em1 * dx,
            d2phi_dtau2: self.phi_inf * eta * ((eta - 1.0) * x_em2 * dx * dx + x_em1 * d2x),
        }
    }

    fn phi_inf(&self) -> Option<f64> {
        Some(self.phi_inf)
    }
}

/// `Φ∞ exp(−γ/τ)` with `γ ≥ 1`; every derivative vanishes at `τ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssentialSingularity {
    phi_inf: f64,
    gamma: f64,
}

impl EssentialSingularity {
    /// Beyond this `γ/τ` the exponential underflows and `(Φ, Φ', Φ'')` is
    /// returned as exact zero.
    pub(crate) const UNDERFLOW_EXPONENT: f64 = 700.0;

    pub fn new(phi_inf: f64, gamma: f64) -> Result<Self> {
        let shape = Self { phi_inf, gamma };
        shape.check()?;
        Ok(shape)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl PulseFamily for EssentialSingularity {
    fn name(&self) -> &'static str {
        "essential-singularity"
    }

    fn check(&self) -> Result<()> {
        check_phi_inf(self.phi_inf)?;
        if !(self.gamma.is_finite() && self.gamma >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: self.gamma,
                reason: "essential-singularity requires gamma >= 1",
            });
        }
        Ok(())
    }

    fn eval_unchecked(&self, tau: f64) -> PhiEval {
        if tau <= 0.0 || self.gamma / tau > Self::UNDERFLOW_EXPONENT {
            return PhiEval::ZERO;
        }
        let g = self.gamma;
        let inv = 1.0 / tau;
        let phi = self.phi_inf * (-g * inv).exp();
        let inv2 = inv * inv;
        PhiEval {
            phi,
            dphi_dtau: phi * g * inv2,
            d2phi_dtau2: phi * (g * g * inv2 * inv2 - 2.0 * g * inv2 * inv),
        }
    }

    fn phi_inf(&self) -> Option<f64> {
        Some(self.phi_inf)
    }
}

/// `Φ∞ (1 − exp(−γτ²) cos²(βτ))` with `0 < γ ≤ 1`, `0 ≤ β < ¼`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModulated {
    phi_inf: f64,
    gamma: f64,
    beta: f64,
}

impl GaussianModulated {
    pub fn new(phi_inf: f64, gamma: f64, beta: f64) -> Result<Self> {
        let shape = Self {
            phi_inf,
            gamma,
            beta,
        };
        shape.check()?;
        Ok(shape)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl PulseFamily for GaussianModulated {
    fn name(&self) -> &'static str {
        "gaussian-modulated"
    }

    fn check(&self) -> Result<()> {
        check_phi_inf(self.phi_inf)?;
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: self.gamma,
                reason: "gaussian-modulated requires 0 < gamma <= 1",
            });
        }
        if !(0.0..0.25).contains(&self.beta) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: self.beta,
                reason: "gaussian-modulated requires 0 <= beta < 1/4",
            });
        }
        Ok(())
    }

    fn eval_unchecked(&self, tau: f64) -> PhiEval {
        let (g, b) = (self.gamma, self.beta);
        let envelope = (-g * tau * tau).exp();
        let c = (b * tau).cos();
        let cos2 = c * c;
        let (sin_2bt, cos_2bt) = (2.0 * b * tau).sin_cos();
        PhiEval {
            phi: self.phi_inf * (1.0 - envelope * cos2),
            dphi_dtau: self.phi_inf * envelope * (2.0 * g * tau * cos2 + b * sin_2bt),
            d2phi_dtau2: -self.phi_inf
                * envelope
                * ((4.0 * g * g * tau * tau - 2.0 * g) * cos2 + 4.0 * g * b * tau * sin_2bt
                    - 2.0 * b * b * cos_2bt),
        }
    }

    fn phi_inf(&self) -> Option<f64> {
        Some(self.phi_inf)
    }

    fn extrapolation(&self) -> Extrapolation {
        Extrapolation::Plain
    }
}

/// Shape reproducing a constant drive `Υ/ω = u` (the Rabi problem).
///
/// `Φ = (2u/(1+u²)) sin²(√(1+u²) τ/2)`. The shape is admissible everywhere
/// only for `0 ≤ u < 1`; at `u = 1` it touches `Φ = 1`, and for `u > 1`
/// the square root in the drive relation changes branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rabi {
    upsilon_over_omega: f64,
}

impl Rabi {
    pub fn new(upsilon_over_omega: f64) -> Result<Self> {
        let shape = Self { upsilon_over_omega };
        shape.check()?;
        Ok(shape)
    }

    pub fn upsilon_over_omega(&self) -> f64 {
        self.upsilon_over_omega
    }

    /// Generalized Rabi frequency `√(1 + u²)` in units of `ω`.
    pub fn rabi_frequency(&self) -> f64 {
        (1.0 + self.upsilon_over_omega * self.upsilon_over_omega).sqrt()
    }

    /// Period of `P(τ)`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.rabi_frequency()
    }
}

impl PulseFamily for Rabi {
    fn name(&self) -> &'static str {
        "rabi"
    }

    fn check(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.upsilon_over_omega) {
            return Err(Error::InvalidParameter {
                name: "upsilon",
                value: self.upsilon_over_omega,
                reason: "rabi shape requires 0 <= upsilon/omega < 1",
            });
        }
        Ok(())
    }

    fn eval_unchecked(&self, tau: f64) -> PhiEval {
        let u = self.upsilon_over_omega;
        let amp = 2.0 * u / (1.0 + u * u);
        let freq = self.rabi_frequency();
        let half = 0.5 * freq * tau;
        let s = half.sin();
        let (sin_ft, cos_ft) = (freq * tau).sin_cos();
        PhiEval {
            phi: amp * s * s,
            dphi_dtau: 0.5 * amp * freq * sin_ft,
            d2phi_dtau2: 0.5 * amp * freq * freq * cos_ft,
        }
    }

    fn phi_inf(&self) -> Option<f64> {
        None
    }

    fn upsilon_inf(&self) -> Option<f64> {
        Some(self.upsilon_over_omega)
    }
}

/// Built-in family tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    RationalPower,
    EssentialSingularity,
    GaussianModulated,
    Rabi,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::RationalPower,
        Family::EssentialSingularity,
        Family::GaussianModulated,
        Family::Rabi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::RationalPower => "rational-power",
            Family::EssentialSingularity => "essential-singularity",
            Family::GaussianModulated => "gaussian-modulated",
            Family::Rabi => "rabi",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rational-power" | "rational_power" | "ex1" | "example1" => Ok(Family::RationalPower),
            "essential-singularity" | "essential_singularity" | "ex2" | "example2" => {
                Ok(Family::EssentialSingularity)
            }
            "gaussian-modulated" | "gaussian_modulated" | "ex3" | "example3" => {
                Ok(Family::GaussianModulated)
            }
            "rabi" => Ok(Family::Rabi),
            other => Err(format!("unknown pulse family '{other}'")),
        }
    }
}

/// One of the built-in families with validated parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseShape {
    RationalPower(RationalPower),
    EssentialSingularity(EssentialSingularity),
    GaussianModulated(GaussianModulated),
    Rabi(Rabi),
}

impl PulseShape {
    pub fn rational_power(phi_inf: f64, gamma: f64, eta: f64) -> Result<Self> {
        RationalPower::new(phi_inf, gamma, eta).map(Self::RationalPower)
    }

    pub fn essential_singularity(phi_inf: f64, gamma: f64) -> Result<Self> {
        EssentialSingularity::new(phi_inf, gamma).map(Self::EssentialSingularity)
    }

    pub fn gaussian_modulated(phi_inf: f64, gamma: f64, beta: f64) -> Result<Self> {
        GaussianModulated::new(phi_inf, gamma, beta).map(Self::GaussianModulated)
    }

    pub fn rabi(upsilon_over_omega: f64) -> Result<Self> {
        Rabi::new(upsilon_over_omega).map(Self::Rabi)
    }

    pub fn family(&self) -> Family {
        match self {
            Self::RationalPower(_) => Family::RationalPower,
            Self::EssentialSingularity(_) => Family::EssentialSingularity,
            Self::GaussianModulated(_) => Family::GaussianModulated,
            Self::Rabi(_) => Family::Rabi,
        }
    }

    fn inner(&self) -> &dyn PulseFamily {
        match self {
            Self::RationalPower(s) => s,
            Self::EssentialSingularity(s) => s,
            Self::GaussianModulated(s) => s,
            Self::Rabi(s) => s,
        }
    }
}

impl PulseFamily for PulseShape {
    fn name(&self) -> &'static str {
        self.inner().name()
    }

    fn check(&self) -> Result<()> {
        self.inner().check()
    }

    fn eval_unchecked(&self, tau: f64) -> PhiEval {
        self.inner().eval_unchecked(tau)
    }

    fn phi_inf(&self) -> Option<f64> {
        self.inner().phi_inf()
    }

    fn upsilon_inf(&self) -> Option<f64> {
        self.inner().upsilon_inf()
    }

    fn extrapolation(&self) -> Extrapolation {
        self.inner().extrapolation()
    }
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::NegativeTime(tau));
    }
    Ok(())
}

/// Evaluates `Φ, Φ', Φ''` analytically at `τ ≥ 0`.
pub fn eval_phi<S: PulseFamily + ?Sized>(shape: &S, tau: f64) -> Result<PhiEval> {
    check_tau(tau)?;
    shape.check()?;
    Ok(shape.eval_unchecked(tau))
}

/// Admissibility of a shape at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCheck {
    pub tau: f64,
    pub phi: f64,
    /// `Φ² + Φ'²`.
    pub magnitude: f64,
    /// `0 ≤ Φ < 1`.
    pub in_range: bool,
    /// `Φ² + Φ'² < 1`.
    pub admissible: bool,
}

impl PointCheck {
    pub fn ok(&self) -> bool {
        self.in_range && self.admissible
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationResult {
    pub points: Vec<PointCheck>,
    /// `Φ(0) = 0` and `Φ'(0) = 0` within `1e-12`.
    pub starts_at_rest: bool,
    pub passed: bool,
}

impl ValidationResult {
    pub fn first_violation(&self) -> Option<&PointCheck> {
        self.points.iter().find(|p| !p.ok())
    }
}

/// Checks the admissibility constraints of `shape` on a grid starting at 0.
///
/// Violations are reported per point; only a malformed grid or invalid
/// parameters produce an error.
pub fn validate_shape<S: PulseFamily + ?Sized>(
    shape: &S,
    tau_grid: &[f64],
) -> Result<ValidationResult> {
    shape.check()?;
    match tau_grid.first() {
        None => return Err(Error::InvalidGrid("empty grid".into())),
        Some(&t0) if t0 != 0.0 => {
            return Err(Error::InvalidGrid(format!(
                "grid must start at 0, got {t0}"
            )))
        }
        _ => {}
    }
    if tau_grid
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(Ordering::Greater))
    {
        return Err(Error::InvalidGrid("grid must be strictly ascending".into()));
    }

    let points: Vec<PointCheck> = tau_grid
        .iter()
        .map(|&tau| {
            let e = shape.eval_unchecked(tau);
            let magnitude = e.phi * e.phi + e.dphi_dtau * e.dphi_dtau;
            PointCheck {
                tau,
                phi: e.phi,
                magnitude,
                in_range: e.phi >= 0.0 && e.phi < 1.0,
                admissible: magnitude < 1.0,
            }
        })
        .collect();

    let start = shape.eval_unchecked(0.0);
    let starts_at_rest = start.phi.abs() <= 1e-12 && start.dphi_dtau.abs() <= 1e-12;
    let passed = starts_at_rest && points.iter().all(PointCheck::ok);
    Ok(ValidationResult {
        points,
        starts_at_rest,
        passed,
    })
}

/// Relative phase `φ = atan2(Φ', Φ)` in `(−π, π]`.
///
/// Undefined where `Φ` vanishes; values at or below the denominator floor
/// raise [`Error::DegeneratePhase`].
pub fn reconstruct_phase<S: PulseFamily + ?Sized>(
    shape: &S,
    tau: f64,
    params: &SystemParams,
) -> Result<f64> {
    let e = eval_phi(shape, tau)?;
    if tau == 0.0 || e.phi <= params.tol_denominator() {
        return Err(Error::DegeneratePhase { tau, phi: e.phi });
    }
    Ok(e.dphi_dtau.atan2(e.phi))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PHI_INF: f64 = 0.942_809_041_582_063_5; // 2√2/3

    fn fd(shape: &dyn PulseFamily, tau: f64, h: f64) -> (f64, f64) {
        let f = |t: f64| shape.eval_unchecked(t).phi;
        let d1 = (f(tau + h) - f(tau - h)) / (2.0 * h);
        let d2 = (f(tau + h) - 2.0 * f(tau) + f(tau - h)) / (h * h);
        (d1, d2)
    }

    #[test]
    fn phi_inf_constant_matches() {
        assert!((PHI_INF - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-16);
    }

    #[test]
    fn rational_power_second_derivative_at_origin() {
        // Taylor: Φ = Φ∞ τ²/γ⁴ + O(τ³) for η = 2, so Φ''(0) = 2Φ∞/γ⁴.
        let shape = PulseShape::rational_power(PHI_INF, 1.0, 2.0).unwrap();
        let e = eval_phi(&shape, 0.0).unwrap();
        assert_eq!(e.phi, 0.0);
        assert_eq!(e.dphi_dtau, 0.0);
        assert!((e.d2phi_dtau2 - 4.0 * 2f64.sqrt() / 3.0).abs() < 1e-15);

        // One-sided difference from the Taylor series agrees near the origin.
        // The one-sided stencil carries an O(h·Φ''') bias, about 12Φ∞·h here.
        let h = 1e-5;
        let f = |t: f64| shape.eval_unchecked(t).phi;
        let d2_fd = (f(2.0 * h) - 2.0 * f(h) + f(0.0)) / (h * h);
        assert!((d2_fd - e.d2phi_dtau2).abs() < 1e-3);

        let g = PulseShape::rational_power(PHI_INF, 2.0, 2.0).unwrap();
        assert!((eval_phi(&g, 0.0).unwrap().d2phi_dtau2 - 2.0 * PHI_INF / 16.0).abs() < 1e-15);
    }

    #[test]
    fn rational_power_higher_eta_vanishes_at_origin() {
        let shape = PulseShape::rational_power(PHI_INF, 1.0, 3.0).unwrap();
        assert_eq!(eval_phi(&shape, 0.0).unwrap(), PhiEval::ZERO);
    }

    #[test]
    fn essential_singularity_is_flat_at_origin() {
        let shape = PulseShape::essential_singularity(PHI_INF, 1.0).unwrap();
        assert_eq!(eval_phi(&shape, 0.0).unwrap(), PhiEval::ZERO);
        let tiny = eval_phi(&shape, 1e-300).unwrap();
        assert_eq!(tiny, PhiEval::ZERO);
        let small = eval_phi(&shape, 0.01).unwrap();
        assert!(small.phi.is_finite() && small.d2phi_dtau2.is_finite());
    }

    #[test]
    fn gaussian_second_derivative_at_origin() {
        let shape = PulseShape::gaussian_modulated(PHI_INF, 1.0, 0.1).unwrap();
        let e = eval_phi(&shape, 0.0).unwrap();
        assert_eq!(e.phi, 0.0);
        assert_eq!(e.dphi_dtau, 0.0);
        assert!((e.d2phi_dtau2 - 2.0 * PHI_INF * 1.01).abs() < 1e-14);
    }

    #[test]
    fn rabi_starts_at_rest() {
        for u in [0.0, 0.3, 0.9] {
            let shape = PulseShape::rabi(u).unwrap();
            let e = eval_phi(&shape, 0.0).unwrap();
            assert_eq!(e.phi, 0.0);
            assert_eq!(e.dphi_dtau, 0.0);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let shapes = [
            PulseShape::rational_power(PHI_INF, 1.0, 2.0).unwrap(),
            PulseShape::rational_power(0.5, 2.0, 3.5).unwrap(),
            PulseShape::essential_singularity(PHI_INF, 1.0).unwrap(),
            PulseShape::essential_singularity(0.7, 4.0).unwrap(),
            PulseShape::gaussian_modulated(PHI_INF, 1.0, 0.1).unwrap(),
            PulseShape::gaussian_modulated(0.3, 0.2, 0.24).unwrap(),
            PulseShape::rabi(0.6).unwrap(),
        ];
        for shape in &shapes {
            for tau in [0.1, 0.5, 1.0, 2.5, 7.0, 40.0] {
                let e = shape.eval_unchecked(tau);
                let (d1, d2) = fd(shape, tau, 1e-4);
                assert!(
                    (e.dphi_dtau - d1).abs() <= 1e-6 * (1.0 + d1.abs()),
                    "{} tau={tau}: {} vs {d1}",
                    shape.name(),
                    e.dphi_dtau
                );
                assert!(
                    (e.d2phi_dtau2 - d2).abs() <= 1e-4 * (1.0 + d2.abs()),
                    "{} tau={tau}: {} vs {d2}",
                    shape.name(),
                    e.d2phi_dtau2
                );
            }
        }
    }

    #[test]
    fn large_tau_approaches_asymptote() {
        let tau = 1e6;
        for shape in [
            PulseShape::rational_power(PHI_INF, 1.0, 2.0).unwrap(),
            PulseShape::essential_singularity(PHI_INF, 1.0).unwrap(),
        ] {
            let e = eval_phi(&shape, tau).unwrap();
            assert!((e.phi - PHI_INF).abs() <= 10.0 / tau);
            assert!(e.dphi_dtau.abs() <= 10.0 / (tau * tau));
            assert!(e.d2phi_dtau2.abs() <= 10.0 / (tau * tau));
        }
        let g = PulseShape::gaussian_modulated(PHI_INF, 1.0, 0.1).unwrap();
        let e = eval_phi(&g, tau).unwrap();
        assert_eq!(e.phi, PHI_INF);
        assert_eq!(e.dphi_dtau, 0.0);
        assert_eq!(e.d2phi_dtau2, 0.0);
    }

    #[test]
    fn rational_power_subleading_term() {
        // Φ − Φ∞(1 − ηγ²/τ) must fall faster than 1/τ.
        let shape = PulseShape::rational_power(PHI_INF, 1.5, 3.0).unwrap();
        let residual = |tau: f64| {
            let eg2 = 3.0 * 1.5 * 1.5;
            (shape.eval_unchecked(tau).phi - PHI_INF * (1.0 - eg2 / tau)).abs()
        };
        let scaled: Vec<f64> = [1e3, 1e4, 1e5].iter().map(|&t| residual(t) * t).collect();
        assert!(scaled[1] < 0.2 * scaled[0]);
        assert!(scaled[2] < 0.2 * scaled[1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PulseShape::rational_power(1.0, 1.0, 2.0).is_err());
        assert!(PulseShape::rational_power(-0.1, 1.0, 2.0).is_err());
        assert!(PulseShape::rational_power(0.5, 0.9, 2.0).is_err());
        assert!(PulseShape::rational_power(0.5, 1.0, 1.5).is_err());
        assert!(PulseShape::essential_singularity(0.5, 0.5).is_err());
        assert!(PulseShape::gaussian_modulated(0.5, 0.0, 0.1).is_err());
        assert!(PulseShape::gaussian_modulated(0.5, 1.1, 0.1).is_err());
        assert!(PulseShape::gaussian_modulated(0.5, 1.0, 0.25).is_err());
        assert!(PulseShape::rabi(1.0).is_err());
        assert!(PulseShape::rabi(-0.2).is_err());
        assert!(PulseShape::rational_power(f64::NAN, 1.0, 2.0).is_err());
    }

    #[test]
    fn rejects_negative_tau() {
        let shape = PulseShape::rational_power(0.5, 1.0, 2.0).unwrap();
        assert_eq!(eval_phi(&shape, -1.0), Err(Error::NegativeTime(-1.0)));
    }

    #[test]
    fn validate_example_one() {
        let shape = PulseShape::rational_power(PHI_INF, 1.0, 2.0).unwrap();
        let grid: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.05).collect();
        let report = validate_shape(&shape, &grid).unwrap();
        assert!(report.passed);
        assert!(report.starts_at_rest);
        assert_eq!(report.points.len(), grid.len());
    }

    #[test]
    fn validate_zero_pulse() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64).collect();
        for shape in [
            PulseShape::rational_power(0.0, 1.0, 2.0).unwrap(),
            PulseShape::essential_singularity(0.0, 1.0).unwrap(),
            PulseShape::gaussian_modulated(0.0, 1.0, 0.1).unwrap(),
            PulseShape::rabi(0.0).unwrap(),
        ] {
            let report = validate_shape(&shape, &grid).unwrap();
            assert!(report.passed);
            assert!(report.points.iter().all(|p| p.phi == 0.0));
        }
    }

    #[test]
    fn validate_near_edge_gaussian_reports_per_point() {
        let shape = PulseShape::gaussian_modulated(0.999, 1.0, 0.0).unwrap();
        let grid: Vec<f64> = (0..=20_000).map(|i| i as f64 * 5e-4).collect();
        let report = validate_shape(&shape, &grid).unwrap();
        // Independent scan of Φ² + Φ'² = Φ∞²((1 − e)² + 4τ²e²), e = exp(−τ²).
        for p in &report.points {
            let e = (-p.tau * p.tau).exp();
            let scan = 0.999f64.powi(2) * ((1.0 - e).powi(2) + 4.0 * p.tau * p.tau * e * e);
            assert!((scan - p.magnitude).abs() < 1e-12);
            assert_eq!(p.admissible, scan < 1.0);
        }
        assert_eq!(report.passed, report.first_violation().is_none());
    }

    #[test]
    fn validate_rejects_malformed_grid() {
        let shape = PulseShape::rabi(0.5).unwrap();
        assert!(matches!(
            validate_shape(&shape, &[]),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            validate_shape(&shape, &[0.5, 1.0]),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            validate_shape(&shape, &[0.0, 2.0, 1.0]),
            Err(Error::InvalidGrid(_))
        ));
    }

    struct Overshoot;

    impl PulseFamily for Overshoot {
        fn name(&self) -> &'static str {
            "overshoot"
        }
        fn eval_unchecked(&self, tau: f64) -> PhiEval {
            // 1.2 τ²/(1+τ²) leaves the admissible region once Φ ≥ 1.
            let d = 1.0 + tau * tau;
            PhiEval {
                phi: 1.2 * tau * tau / d,
                dphi_dtau: 2.4 * tau / (d * d),
                d2phi_dtau2: 2.4 * (1.0 - 3.0 * tau * tau) / (d * d * d),
            }
        }
        fn phi_inf(&self) -> Option<f64> {
            Some(1.2)
        }
    }

    #[test]
    fn validate_flags_inadmissible_family() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let report = validate_shape(&Overshoot, &grid).unwrap();
        assert!(!report.passed);
        assert!(report.starts_at_rest);
        let first = report.first_violation().unwrap();
        // Φ ≥ 1 once τ² ≥ 5; the magnitude crosses 1 a little earlier.
        assert!(first.tau > 1.0 && first.tau <= 5f64.sqrt() + 0.1);
        assert!(report
            .points
            .iter()
            .filter(|p| p.tau >= 2.3)
            .all(|p| !p.ok()));
    }

    #[test]
    fn phase_vanishes_asymptotically() {
        let shape = PulseShape::rational_power(PHI_INF, 1.0, 2.0).unwrap();
        let phase = reconstruct_phase(&shape, 1e6, &SystemParams::default()).unwrap();
        assert!(phase.abs() < 1e-11);
    }

    #[test]
    fn phase_zero_at_rabi_extremum() {
        let rabi = Rabi::new(0.5).unwrap();
        // Φ peaks at half a Rabi period, where Φ' = 0.
        let tau = 0.5 * rabi.period();
        let phase = reconstruct_phase(&rabi, tau, &SystemParams::default()).unwrap();
        assert!(phase.abs() < 1e-14);
    }

    #[test]
    fn phase_example_one_at_unit_time() {
        let shape = PulseShape::rational_power(PHI_INF, 1.0, 2.0).unwrap();
        let phase = reconstruct_phase(&shape, 1.0, &SystemParams::default()).unwrap();
        // Φ(1) = Φ∞/4 and Φ'(1) = Φ∞/4 exactly, so φ = π/4.
        assert!((phase - PI / 4.0).abs() < 1e-15);
        let (d1, _) = fd(&shape, 1.0, 1e-5);
        let fd_phase = d1.atan2(shape.eval_unchecked(1.0).phi);
        assert!((phase - fd_phase).abs() < 1e-8);
    }

    #[test]
    fn phase_degenerate_where_phi_vanishes() {
        let shape = PulseShape::essential_singularity(PHI_INF, 1.0).unwrap();
        let params = SystemParams::default();
        assert!(matches!(
            reconstruct_phase(&shape, 0.0, &params),
            Err(Error::DegeneratePhase { .. })
        ));
        assert!(matches!(
            reconstruct_phase(&shape, 0.01, &params),
            Err(Error::DegeneratePhase { .. })
        ));
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert_eq!(
            "ex2".parse::<Family>().unwrap(),
            Family::EssentialSingularity
        );
        assert!("sawtooth".parse::<Family>().is_err());
    }
}
