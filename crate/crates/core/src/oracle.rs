// SPDX-License-Identifier: Apache-2.0

//! Numerical ground truth: direct integration of the Schrödinger equation.
//!
//! In the `σ_x` eigenbasis `{|+⟩, |−⟩}` and dimensionless time the equation is
//!
//! ```text
//! dψ/dτ = −i M(τ) ψ,   M(τ) = ½ [[1, u(τ)], [u(τ), −1]],   u = Υ/ω
//! ```
//!
//! so the prepared state `|+⟩` is the basis vector `(1, 0)` and the transition
//! probability is `|c₋|²`. No renormalization is applied; the norm drift is
//! reported as a fidelity metric.

use num_complex::Complex64;

use crate::drive::synthesize_upsilon;
use crate::error::{Error, Result};
use crate::grid;
use crate::ode::DormandPrince;
use crate::params::SystemParams;
use crate::probability::probability_at;
use crate::pulse::{Extrapolation, PulseFamily};

/// Amplitudes on `|+⟩` and `|−⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub c_plus: Complex64,
    pub c_minus: Complex64,
}

impl QubitState {
    /// The prepared state `|+⟩`.
    pub fn plus() -> Self {
        Self {
            c_plus: Complex64::new(1.0, 0.0),
            c_minus: Complex64::new(0.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_plus.norm_sqr() + self.c_minus.norm_sqr()
    }

    /// `|c₋|²`.
    pub fn transition_probability(&self) -> f64 {
        self.c_minus.norm_sqr()
    }

    fn to_real(self) -> [f64; 4] {
        [
            self.c_plus.re,
            self.c_plus.im,
            self.c_minus.re,
            self.c_minus.im,
        ]
    }

    fn from_real(y: &[f64; 4]) -> Self {
        Self {
            c_plus: Complex64::new(y[0], y[1]),
            c_minus: Complex64::new(y[2], y[3]),
        }
    }
}

/// A time-dependent drive `τ ↦ Υ(τ)/ω`.
pub trait Drive {
    fn upsilon_over_omega(&self, tau: f64) -> Result<f64>;
}

impl<F: Fn(f64) -> f64> Drive for F {
    fn upsilon_over_omega(&self, tau: f64) -> Result<f64> {
        let u = self(tau);
        if u.is_finite() {
            Ok(u)
        } else {
            Err(Error::NonFinite { tau })
        }
    }
}

/// The drive synthesized from a pulse shape.
#[derive(Debug, Clone, Copy)]
pub struct ShapeDrive<'a, S: ?Sized> {
    pub shape: &'a S,
    pub params: SystemParams,
}

impl<'a, S: PulseFamily + ?Sized> ShapeDrive<'a, S> {
    pub fn new(shape: &'a S, params: SystemParams) -> Self {
        Self { shape, params }
    }
}

impl<S: PulseFamily + ?Sized> Drive for ShapeDrive<'_, S> {
    fn upsilon_over_omega(&self, tau: f64) -> Result<f64> {
        synthesize_upsilon(self.shape, tau, &self.params).map(|d| d.upsilon_over_omega)
    }
}

/// Direction of propagation for [`propagate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `ψ(0) → ψ(τ_end)`.
    Forward,
    /// `ψ(τ_end) → ψ(0)` under the negated generator.
    Backward,
}

struct Schrodinger<'a, D: ?Sized> {
    drive: &'a D,
    direction: Direction,
    tau_end: f64,
}

impl<D: Drive + ?Sized> Schrodinger<'_, D> {
    fn rhs(&self, s: f64, y: &[f64; 4], dy: &mut [f64; 4]) -> Result<()> {
        let (tau, sign) = match self.direction {
            Direction::Forward => (s, 1.0),
            Direction::Backward => (self.tau_end - s, -1.0),
        };
        let u = self.drive.upsilon_over_omega(tau.max(0.0))?;
        // −i z for z = x + iy is (y, −x).
        let (pr, pi) = (y[0] + u * y[2], y[1] + u * y[3]);
        let (mr, mi) = (u * y[0] - y[2], u * y[1] - y[3]);
        let half = 0.5 * sign;
        dy[0] = half * pi;
        dy[1] = -half * pr;
        dy[2] = half * mi;
        dy[3] = -half * mr;
        Ok(())
    }
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if !(1e-13..=1e-6).contains(&tolerance) {
        return Err(Error::ToleranceOutOfRange(tolerance));
    }
    Ok(())
}

/// Per-step error target for a run of length `span`.
///
/// Local errors accumulate roughly linearly in `τ`, so runs longer than ten
/// time units tighten the per-step target to keep the accumulated error and
/// norm drift near `tolerance`.
fn local_tolerance(tolerance: f64, span: f64) -> f64 {
    (tolerance * (10.0 / span).min(1.0)).max(1e-15)
}

/// Probabilities sampled along one integration run.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTrajectory {
    pub taus: Vec<f64>,
    pub probabilities: Vec<f64>,
    /// `max |‖ψ‖² − 1|` over all accepted steps.
    pub norm_drift: f64,
    pub steps_taken: usize,
    pub tolerance: f64,
    pub final_state: QubitState,
}

/// Integrates from `|+⟩` at `τ = 0` to `tau_end`, recording `|c₋|²` at
/// each of `sample_taus` (ascending, inside `[0, tau_end]`).
pub fn evolve<D: Drive + ?Sized>(
    drive: &D,
    tau_end: f64,
    sample_taus: &[f64],
    tolerance: f64,
) -> Result<OracleTrajectory> {
    check_tolerance(tolerance)?;
    if !(tau_end.is_finite() && tau_end > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "tau_end must be > 0, got {tau_end}"
        )));
    }
    let sys = Schrodinger {
        drive,
        direction: Direction::Forward,
        tau_end,
    };
    let rhs = |t: f64, y: &[f64; 4], dy: &mut [f64; 4]| sys.rhs(t, y, dy);
    let mut probabilities = vec![0.0; sample_taus.len()];
    let mut norm_drift = 0.0_f64;
    let (y, stats) = DormandPrince::new(local_tolerance(tolerance, tau_end)).integrate(
        &rhs,
        0.0,
        QubitState::plus().to_real(),
        tau_end,
        sample_taus,
        |i, y| probabilities[i] = y[2] * y[2] + y[3] * y[3],
        |_, y| {
            let n: f64 = y.iter().map(|v| v * v).sum();
            norm_drift = norm_drift.max((n - 1.0).abs());
        },
    )?;
    Ok(OracleTrajectory {
        taus: sample_taus.to_vec(),
        probabilities,
        norm_drift,
        steps_taken: stats.accepted,
        tolerance,
        final_state: QubitState::from_real(&y),
    })
}

/// Propagates an arbitrary state across `[0, tau_end]` in either direction.
pub fn propagate<D: Drive + ?Sized>(
    drive: &D,
    initial: QubitState,
    tau_end: f64,
    tolerance: f64,
    direction: Direction,
) -> Result<QubitState> {
    check_tolerance(tolerance)?;
    let sys = Schrodinger {
        drive,
        direction,
        tau_end,
    };
    let rhs = |t: f64, y: &[f64; 4], dy: &mut [f64; 4]| sys.rhs(t, y, dy);
    let (y, _) = DormandPrince::new(local_tolerance(tolerance, tau_end)).integrate(
        &rhs,
        0.0,
        initial.to_real(),
        tau_end,
        &[],
        |_, _| {},
        |_, _| {},
    )?;
    Ok(QubitState::from_real(&y))
}

/// Fixed-step integration from `|+⟩`; used for convergence-order studies.
pub fn evolve_fixed_step<D: Drive + ?Sized>(
    drive: &D,
    tau_end: f64,
    n_steps: usize,
) -> Result<QubitState> {
    let sys = Schrodinger {
        drive,
        direction: Direction::Forward,
        tau_end,
    };
    let rhs = |t: f64, y: &[f64; 4], dy: &mut [f64; 4]| sys.rhs(t, y, dy);
    let y = DormandPrince::fixed_step(&rhs, 0.0, QubitState::plus().to_real(), tau_end, n_steps)?;
    Ok(QubitState::from_real(&y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointComparison {
    pub tau: f64,
    pub closed_form: f64,
    pub oracle: f64,
    /// `oracle − closed_form`.
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub max_abs_error: f64,
    pub tau_of_max: f64,
    pub pointwise: Vec<PointComparison>,
    pub norm_drift: f64,
    pub steps_taken: usize,
}

/// Compares `probability_at` with the oracle on `n_samples` uniform points
/// of `[0, tau_end]`, driving the oracle with the synthesized `Υ/ω`.
pub fn verify_closed_form<S: PulseFamily + ?Sized>(
    shape: &S,
    tau_end: f64,
    n_samples: usize,
    tolerance: f64,
    params: &SystemParams,
) -> Result<VerificationReport> {
    let taus = grid::linear(tau_end, n_samples)?;
    let closed = taus
        .iter()
        .map(|&tau| {
            synthesize_upsilon(shape, tau, params)?;
            probability_at(shape, tau).map(|p| p.p_plus_to_minus)
        })
        .collect::<Result<Vec<_>>>()?;
    let traj = evolve(&ShapeDrive::new(shape, *params), tau_end, &taus, tolerance)?;

    let pointwise: Vec<PointComparison> = taus
        .iter()
        .zip(&closed)
        .zip(&traj.probabilities)
        .map(|((&tau, &closed_form), &oracle)| PointComparison {
            tau,
            closed_form,
            oracle,
            diff: oracle - closed_form,
        })
        .collect();
    let (tau_of_max, max_abs_error) = pointwise
        .iter()
        .map(|p| (p.tau, p.diff.abs()))
        .fold((0.0, 0.0), |best, x| if x.1 > best.1 { x } else { best });
    Ok(VerificationReport {
        max_abs_error,
        tau_of_max,
        pointwise,
        norm_drift: traj.norm_drift,
        steps_taken: traj.steps_taken,
    })
}

/// First time at which the limit is sampled; each refinement doubles it.
const LIMIT_BASE_TAU: f64 = 1e3;
const LIMIT_MAX_REFINEMENTS: usize = 40;

/// Estimates `P₊₋(∞)` from the closed form at `τ = 10³·2ᵏ`.
///
/// Families with power-law tails are extrapolated in `1/τ` with three-node
/// Richardson; Gaussian tails are converged directly. Convergence requires two
/// successive changes below `tolerance`. A drive without a limit, such as a
/// constant one, fails with [`Error::NoConvergence`].
pub fn estimate_infinite_time_limit<S: PulseFamily + ?Sized>(
    shape: &S,
    tolerance: f64,
) -> Result<f64> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tolerance",
            value: tolerance,
            reason: "must be finite and > 0",
        });
    }
    let p = |tau: f64| probability_at(shape, tau).map(|pt| pt.p_plus_to_minus);
    let estimate = |k: usize| -> Result<f64> {
        let tau = LIMIT_BASE_TAU * 2f64.powi(k as i32);
        match shape.extrapolation() {
            Extrapolation::Plain => p(tau),
            // Cancels the 1/τ and 1/τ² terms of P(τ).
            Extrapolation::Richardson => {
                Ok(p(tau)? / 3.0 - 2.0 * p(2.0 * tau)? + 8.0 / 3.0 * p(4.0 * tau)?)
            }
        }
    };

    let mut prev = estimate(0)?;
    let mut prev_change = f64::INFINITY;
    let mut last_change = f64::INFINITY;
    for k in 1..=LIMIT_MAX_REFINEMENTS {
        let next = estimate(k)?;
        last_change = (next - prev).abs();
        if last_change < tolerance && prev_change < tolerance {
            return Ok(next);
        }
        prev_change = last_change;
        prev = next;
    }
    Err(Error::NoConvergence {
        iterations: LIMIT_MAX_REFINEMENTS,
        last_change,
    })
}
