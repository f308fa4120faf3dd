// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};

/// Transverse frequency and the numeric floors shared by the evaluators.
///
/// Units are natural (`ħ = 1`). The library works in `τ = ωt` throughout, so
/// `omega` only enters when converting to or from laboratory time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    omega: f64,
    tol_denominator: f64,
    tol_fd: f64,
}

impl SystemParams {
    pub const DEFAULT_TOL_DENOMINATOR: f64 = 1e-9;
    pub const DEFAULT_TOL_FD: f64 = 1e-4;

    pub fn new(omega: f64) -> Result<Self> {
        Self::with_tolerances(omega, Self::DEFAULT_TOL_DENOMINATOR, Self::DEFAULT_TOL_FD)
    }

    pub fn with_tolerances(omega: f64, tol_denominator: f64, tol_fd: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega",
                value: omega,
                reason: "must be finite and > 0",
            });
        }
        if !(tol_denominator > 0.0 && tol_denominator <= 1e-6) {
            return Err(Error::InvalidParameter {
                name: "tol_denominator",
                value: tol_denominator,
                reason: "must lie in (0, 1e-6]",
            });
        }
        if !(tol_fd > 0.0 && tol_fd <= 1e-3) {
            return Err(Error::InvalidParameter {
                name: "tol_fd",
                value: tol_fd,
                reason: "must lie in (0, 1e-3]",
            });
        }
        Ok(Self {
            omega,
            tol_denominator,
            tol_fd,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn tol_denominator(&self) -> f64 {
        self.tol_denominator
    }

    /// Step for finite-difference cross-checks of the analytic derivatives.
    pub fn tol_fd(&self) -> f64 {
        self.tol_fd
    }

    /// Dimensionless time `ωt`.
    pub fn tau(&self, t: f64) -> f64 {
        self.omega * t
    }

    /// Laboratory time for a dimensionless `τ`.
    pub fn time(&self, tau: f64) -> f64 {
        tau / self.omega
    }

    /// Converts a dimensionless drive `Υ/ω` back to `Υ`.
    pub fn upsilon(&self, upsilon_over_omega: f64) -> f64 {
        upsilon_over_omega * self.omega
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            tol_denominator: Self::DEFAULT_TOL_DENOMINATOR,
            tol_fd: Self::DEFAULT_TOL_FD,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_omega() {
        assert!(SystemParams::new(0.0).is_err());
        assert!(SystemParams::new(-2.0).is_err());
        assert!(SystemParams::new(f64::NAN).is_err());
    }

    #[test]
    fn tolerance_ranges() {
        assert!(SystemParams::with_tolerances(1.0, 1e-6, 1e-3).is_ok());
        assert!(SystemParams::with_tolerances(1.0, 2e-6, 1e-4).is_err());
        assert!(SystemParams::with_tolerances(1.0, 0.0, 1e-4).is_err());
        assert!(SystemParams::with_tolerances(1.0, 1e-9, 1e-2).is_err());
    }

    #[test]
    fn time_conversions() {
        let p = SystemParams::new(2.5).unwrap();
        assert_eq!(p.tau(2.0), 5.0);
        assert_eq!(p.time(5.0), 2.0);
        assert_eq!(p.upsilon(2.0), 5.0);
    }
}
