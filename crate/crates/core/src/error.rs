// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("time must be nonnegative, got tau = {0}")]
    NegativeTime(f64),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    /// `1 − Φ² − Φ'²` fell to or below the configured floor.
    #[error("near-singular denominator at tau = {tau}: 1 - phi^2 - phi'^2 = {value:e}")]
    NearSingular { tau: f64, value: f64 },

    /// `1 − Φ² − Φ'²` is not positive, so the shape is outside its admissible region.
    #[error("shape inadmissible at tau = {tau}: 1 - phi^2 - phi'^2 = {value:e}")]
    Inadmissible { tau: f64, value: f64 },

    #[error("relative phase undefined at tau = {tau}: phi = {phi:e} is below the floor")]
    DegeneratePhase { tau: f64, phi: f64 },

    #[error("closed form for {expected} requested on a {found} shape")]
    FamilyMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("integrator tolerance {0:e} outside [1e-13, 1e-6]")]
    ToleranceOutOfRange(f64),

    #[error("step size underflow at tau = {tau} (h = {step:e})")]
    StepSizeUnderflow { tau: f64, step: f64 },

    #[error("integrator exceeded {steps} steps at tau = {tau}")]
    StepLimit { tau: f64, steps: usize },

    #[error("non-finite value encountered at tau = {tau}")]
    NonFinite { tau: f64 },

    #[error("infinite-time limit did not converge after {iterations} refinements (last change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },
}
