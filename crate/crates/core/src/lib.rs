// SPDX-License-Identifier: Apache-2.0

//! Driven two-level systems built backwards from an auxiliary pulse shape.
//!
//! The Hamiltonian is `H(t) = (Υ(t)/2) σ_z + (ω/2) σ_x` with `ħ = 1`. Instead of
//! prescribing the drive `Υ(t)` and solving for the dynamics, a pulse shape
//! `Φ(τ)` is chosen first; the drive and the transition probability
//! `P₊₋(τ)` from `|+⟩` to `|−⟩` then follow in closed form:
//!
//! ```text
//! Υ/ω   = (Φ'' + Φ) / √(1 − Φ² − Φ'²)
//! P₊₋   = ½ − ½ √(1 − Φ² − Φ'²)
//! ```
//!
//! All times are dimensionless, `τ = ωt`, primes are `d/dτ`, and drives are
//! reported as `Υ/ω`.
//!
//! * [`pulse`] holds the shape families and admissibility checks.
//! * [`drive`] synthesizes `Υ/ω` from a shape.
//! * [`probability`] evaluates the closed-form probabilities.
//! * [`oracle`] integrates the Schrödinger equation numerically and compares.

pub mod drive;
pub mod error;
pub mod grid;
pub mod ode;
pub mod oracle;
pub mod params;
pub mod probability;
pub mod pulse;

pub use drive::{
    classify_asymptotics, closed_form_upsilon_ex1, closed_form_upsilon_ex2,
    closed_form_upsilon_ex3, phi_from_upsilon, sample_drive, synthesize_upsilon, upsilon_asymptote,
    AsymptoticsReport, Decay, DriveSample, DriveTrajectory,
};
pub use error::{Error, Result};
pub use oracle::{
    estimate_infinite_time_limit, evolve, propagate, verify_closed_form, Direction,
    OracleTrajectory, QubitState, VerificationReport,
};
pub use params::SystemParams;
pub use probability::{
    asymptotic_probability, probability_at, rabi_probability, reconstruct_bloch, BlochAngles,
    ProbabilityPoint,
};
pub use pulse::{
    eval_phi, reconstruct_phase, validate_shape, EssentialSingularity, Extrapolation, Family,
    GaussianModulated, PhiEval, PulseFamily, PulseShape, Rabi, RationalPower, ValidationResult,
};
