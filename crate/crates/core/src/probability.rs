// SPDX-License-Identifier: Apache-2.0

//! Closed-form transition probabilities `P₊₋` from `|+⟩` to `|−⟩`.

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::pulse::{eval_phi, reconstruct_phase, PulseFamily};

/// `P₊₋(τ) = ½ − ½D` with `D = √(1 − Φ² − Φ'²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityPoint {
    pub tau: f64,
    pub p_plus_to_minus: f64,
    pub d_value: f64,
}

/// Mixing angle and relative phase of the state at one instant.
///
/// `theta` is taken on the principal branch, `2θ ∈ [0, π/2]`, which is the
/// branch continuous from `θ(0) = 0` while `D > 0`. `phi_rel` is `None`
/// where `Φ` is too small for the phase to be defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    pub theta: f64,
    pub phi_rel: Option<f64>,
}

fn admissible_d<S: PulseFamily + ?Sized>(shape: &S, tau: f64) -> Result<(f64, f64)> {
    let e = eval_phi(shape, tau)?;
    let disc = e.discriminant();
    if disc.is_nan() || disc <= 0.0 {
        return Err(Error::Inadmissible { tau, value: disc });
    }
    Ok((disc.sqrt(), 1.0 - disc))
}

/// Transition probability at finite `τ`.
pub fn probability_at<S: PulseFamily + ?Sized>(shape: &S, tau: f64) -> Result<ProbabilityPoint> {
    let (d, _) = admissible_d(shape, tau)?;
    Ok(ProbabilityPoint {
        tau,
        p_plus_to_minus: 0.5 - 0.5 * d,
        d_value: d,
    })
}

/// `P₊₋(∞) = ½ − ½/√(1 + u²)` for `u = Υ(∞)/ω ≥ 0`.
pub fn asymptotic_probability(upsilon_inf_over_omega: f64) -> Result<f64> {
    let u = upsilon_inf_over_omega;
    if !(u.is_finite() && u >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "upsilon_inf",
            value: u,
            reason: "must be finite and >= 0",
        });
    }
    let s = 1f64.hypot(u);
    if u <= 1.0 {
        // Same value without the cancellation in 1 − 1/s.
        Ok(u * u / (2.0 * s * (s + 1.0)))
    } else {
        Ok(0.5 - 0.5 / s)
    }
}

/// Constant-drive probability `(u²/(1+u²)) sin²(√(1+u²) τ/2)`.
pub fn rabi_probability(upsilon_over_omega: f64, tau: f64) -> f64 {
    let u2 = upsilon_over_omega * upsilon_over_omega;
    let s = (0.5 * (1.0 + u2).sqrt() * tau).sin();
    u2 / (1.0 + u2) * s * s
}

/// `θ = ½ asin(√(Φ² + Φ'²))` and, where defined, the relative phase.
pub fn reconstruct_bloch<S: PulseFamily + ?Sized>(
    shape: &S,
    tau: f64,
    params: &SystemParams,
) -> Result<BlochAngles> {
    let (_, sin_sq) = admissible_d(shape, tau)?;
    let theta = 0.5 * sin_sq.sqrt().asin();
    let phi_rel = match reconstruct_phase(shape, tau, params) {
        Ok(phase) => Some(phase),
        Err(Error::DegeneratePhase { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(BlochAngles { theta, phi_rel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::PulseShape;
    use std::f64::consts::PI;

    const PHI_INF: f64 = 0.942_809_041_582_063_5;

    fn examples() -> [PulseShape; 3] {
        [
            PulseShape::rational_power(PHI_INF, 1.0, 2.0).unwrap(),
            PulseShape::essential_singularity(PHI_INF, 1.0).unwrap(),
            PulseShape::gaussian_modulated(PHI_INF, 1.0, 0.1).unwrap(),
        ]
    }

    #[test]
    fn starts_at_zero() {
        for shape in examples() {
            let p = probability_at(&shape, 0.0).unwrap();
            assert_eq!(p.p_plus_to_minus, 0.0);
            assert_eq!(p.d_value, 1.0);
        }
    }

    #[test]
    fn zero_pulse_never_transitions() {
        let shape = PulseShape::rational_power(0.0, 2.0, 3.0).unwrap();
        for tau in [0.0, 1.0, 10.0, 1e5] {
            assert_eq!(probability_at(&shape, tau).unwrap().p_plus_to_minus, 0.0);
        }
    }

    #[test]
    fn example_one_far_out() {
        let shape = PulseShape::rational_power(PHI_INF, 1.0, 2.0).unwrap();
        let p = probability_at(&shape, 1e6).unwrap();
        assert!((p.p_plus_to_minus - 1.0 / 3.0).abs() < 3e-6);
        assert!(p.p_plus_to_minus < 1.0 / 3.0);
        assert_eq!(p.p_plus_to_minus, 0.5 - 0.5 * p.d_value);
    }

    #[test]
    fn asymptotic_values() {
        assert!((asymptotic_probability(8f64.sqrt()).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(asymptotic_probability(0.0).unwrap(), 0.0);
        let big = asymptotic_probability(1e6).unwrap();
        assert!((big - 0.499_999_5).abs() < 1e-15);
        assert!(big < 0.5);
        assert!(asymptotic_probability(-1.0).is_err());
        assert!(asymptotic_probability(f64::INFINITY).is_err());
    }

    #[test]
    fn asymptotic_branches_join_continuously() {
        let below = asymptotic_probability(1.0 - 1e-12).unwrap();
        let at = asymptotic_probability(1.0).unwrap();
        let above = asymptotic_probability(1.0 + 1e-12).unwrap();
        assert!(below < at && at < above);
        assert!((at - (0.5 - 0.5 / 2f64.sqrt())).abs() < 1e-16);
    }

    #[test]
    fn rabi_values() {
        let half = PI / 2f64.sqrt();
        assert!((rabi_probability(1.0, half) - 0.5).abs() < 1e-15);
        assert!(rabi_probability(1.0, 2.0 * half).abs() < 1e-15);
        assert_eq!(rabi_probability(3.0, 0.0), 0.0);
    }

    #[test]
    fn rabi_shape_matches_rabi_formula() {
        let u = 0.7;
        let shape = PulseShape::rabi(u).unwrap();
        for i in 0..200 {
            let tau = i as f64 * 0.1;
            let closed = probability_at(&shape, tau).unwrap().p_plus_to_minus;
            assert!((closed - rabi_probability(u, tau)).abs() < 1e-14);
        }
    }

    #[test]
    fn bloch_at_origin() {
        for shape in examples() {
            let b = reconstruct_bloch(&shape, 0.0, &SystemParams::default()).unwrap();
            assert_eq!(b.theta, 0.0);
            assert_eq!(b.phi_rel, None);
        }
    }

    #[test]
    fn bloch_identities() {
        let params = SystemParams::default();
        for shape in examples() {
            for tau in [0.3, 0.9, 1.7, 4.0, 25.0, 300.0] {
                let b = reconstruct_bloch(&shape, tau, &params).unwrap();
                let p = probability_at(&shape, tau).unwrap();
                assert!((b.theta.sin().powi(2) - p.p_plus_to_minus).abs() < 1e-13);
                assert!(b.theta >= 0.0 && b.theta <= PI / 4.0);
                let phi = shape.eval_unchecked(tau).phi;
                let lhs = (2.0 * b.theta).sin() * b.phi_rel.unwrap().cos();
                assert!((lhs - phi).abs() < 1e-12, "{} tau={tau}", shape.name());
            }
        }
    }
}
