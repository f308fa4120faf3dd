// SPDX-License-Identifier: Apache-2.0

//! Dormand–Prince 5(4) explicit Runge–Kutta pair for small real systems.
//!
//! Adaptive stepping uses the embedded fourth-order solution for the local
//! error estimate and a PI step-size controller; the fifth-order solution is
//! propagated. Requested output times are hit exactly by clipping the step.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Right-hand side `dy/dt = f(t, y)`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]) -> Result<()>;
}

impl<F, const N: usize> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N], &mut [f64; N]) -> Result<()>,
{
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]) -> Result<()> {
        self(t, y, dy)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Nominal order of the propagated solution.
pub const ORDER: u32 = 5;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;
const MIN_SHRINK: f64 = 0.2;
const MAX_GROWTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DormandPrince {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub h_max: f64,
}

impl DormandPrince {
    pub fn new(tolerance: f64) -> Self {
        Self {
            rtol: tolerance,
            atol: tolerance,
            max_steps: 2_000_000,
            h_max: f64::INFINITY,
        }
    }

    fn error_norm<const N: usize>(&self, y: &[f64; N], y_new: &[f64; N], err: &[f64; N]) -> f64 {
        let sum: f64 = (0..N)
            .map(|i| {
                let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                (err[i] / scale).powi(2)
            })
            .sum();
        (sum / N as f64).sqrt()
    }

    /// One step from `(t, y)` with `k1 = f(t, y)`. Returns the fifth-order
    /// solution, the error vector, and `f(t + h, y_new)` for reuse.
    fn step<S: OdeSystem<N>, const N: usize>(
        sys: &S,
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> Result<([f64; N], [f64; N], [f64; N])> {
        let mut tmp = [0.0; N];
        let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
            ([0.0; N], [0.0; N], [0.0; N], [0.0; N], [0.0; N], [0.0; N]);

        for i in 0..N {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        sys.rhs(t + C2 * h, &tmp, &mut k2)?;
        for i in 0..N {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        sys.rhs(t + C3 * h, &tmp, &mut k3)?;
        for i in 0..N {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        sys.rhs(t + C4 * h, &tmp, &mut k4)?;
        for i in 0..N {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        sys.rhs(t + C5 * h, &tmp, &mut k5)?;
        for i in 0..N {
            tmp[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        sys.rhs(t + h, &tmp, &mut k6)?;
        let mut y_new = [0.0; N];
        for i in 0..N {
            y_new[i] =
                y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        sys.rhs(t + h, &y_new, &mut k7)?;
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        Ok((y_new, err, k7))
    }

    fn initial_step<S: OdeSystem<N>, const N: usize>(
        &self,
        sys: &S,
        t0: f64,
        y0: &[f64; N],
        f0: &[f64; N],
        span: f64,
    ) -> Result<f64> {
        let scaled = |v: &[f64; N]| {
            let s: f64 = (0..N)
                .map(|i| (v[i] / (self.atol + self.rtol * y0[i].abs())).powi(2))
                .sum();
            (s / N as f64).sqrt()
        };
        let d0 = scaled(y0);
        let d1 = scaled(f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(span);
        let mut y1 = [0.0; N];
        for i in 0..N {
            y1[i] = y0[i] + h0 * f0[i];
        }
        let mut f1 = [0.0; N];
        sys.rhs(t0 + h0, &y1, &mut f1)?;
        let mut df = [0.0; N];
        for i in 0..N {
            df[i] = f1[i] - f0[i];
        }
        let d2 = scaled(&df) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / ORDER as f64)
        };
        Ok((100.0 * h0).min(h1).min(span).min(self.h_max))
    }

    /// Integrates from `t0` to `t_end > t0`.
    ///
    /// `on_stop(i, y)` fires when the solution reaches `stops[i]`, which must
    /// be ascending and inside `[t0, t_end]`. `on_step(t, y)` fires after
    /// every accepted step.
    #[allow(clippy::too_many_arguments)]
    pub fn integrate<S, const N: usize>(
        &self,
        sys: &S,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        stops: &[f64],
        mut on_stop: impl FnMut(usize, &[f64; N]),
        mut on_step: impl FnMut(f64, &[f64; N]),
    ) -> Result<([f64; N], Stats)>
    where
        S: OdeSystem<N>,
    {
        if t_end.partial_cmp(&t0) != Some(Ordering::Greater) {
            return Err(Error::InvalidGrid(format!(
                "integration interval [{t0}, {t_end}] is empty"
            )));
        }
        if stops.windows(2).any(|w| w[1] < w[0])
            || stops.first().is_some_and(|&s| s < t0)
            || stops.last().is_some_and(|&s| s > t_end)
        {
            return Err(Error::InvalidGrid(
                "output times must be ascending and inside the integration interval".into(),
            ));
        }

        let mut stats = Stats::default();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = [0.0; N];
        sys.rhs(t, &y, &mut k1)?;
        stats.evaluations += 1;

        let mut next_stop = 0;
        while next_stop < stops.len() && stops[next_stop] <= t {
            on_stop(next_stop, &y);
            next_stop += 1;
        }

        let mut h = self.initial_step(sys, t, &y, &k1, t_end - t0)?;
        stats.evaluations += 1;
        let mut err_old = 1e-4_f64;
        let mut last_rejected = false;

        while t < t_end {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::StepLimit {
                    tau: t,
                    steps: self.max_steps,
                });
            }
            let target = stops.get(next_stop).copied().unwrap_or(t_end);
            let h_free = h.min(self.h_max);
            let clipped = t + h_free * (1.0 + 1e-10) >= target;
            let h_try = if clipped { target - t } else { h_free };
            if h_try < 16.0 * f64::EPSILON * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow {
                    tau: t,
                    step: h_try,
                });
            }

            let (y_new, err_vec, k_last) = Self::step(sys, t, &y, &k1, h_try)?;
            stats.evaluations += 6;
            let err = self.error_norm(&y, &y_new, &err_vec);

            if err <= 1.0 {
                stats.accepted += 1;
                let fac11 = err.max(1e-300).powf(ALPHA);
                let fac =
                    (fac11 / err_old.powf(BETA) / SAFETY).clamp(1.0 / MAX_GROWTH, 1.0 / MIN_SHRINK);
                let mut h_next = h_try / fac;
                if last_rejected {
                    h_next = h_next.min(h_try);
                }
                err_old = err.max(1e-4);
                last_rejected = false;

                t = if clipped { target } else { t + h_try };
                y = y_new;
                k1 = k_last;
                on_step(t, &y);
                while next_stop < stops.len() && stops[next_stop] <= t {
                    on_stop(next_stop, &y);
                    next_stop += 1;
                }
                h = if clipped { h_free.max(h_next) } else { h_next };
            } else {
                // NaN errors land here too and shrink the step.
                stats.rejected += 1;
                let fac11 = if err.is_finite() {
                    err.powf(ALPHA)
                } else {
                    1.0 / MIN_SHRINK
                };
                h = h_try / (fac11 / SAFETY).min(1.0 / MIN_SHRINK);
                last_rejected = true;
            }
        }
        Ok((y, stats))
    }

    /// `n_steps` equal fifth-order steps from `t0` to `t_end`, no error control.
    pub fn fixed_step<S: OdeSystem<N>, const N: usize>(
        sys: &S,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        n_steps: usize,
    ) -> Result<[f64; N]> {
        if n_steps == 0 {
            return Err(Error::InvalidGrid(
                "fixed-step integration needs at least one step".into(),
            ));
        }
        let h = (t_end - t0) / n_steps as f64;
        let mut y = y0;
        let mut k1 = [0.0; N];
        for i in 0..n_steps {
            let t = t0 + h * i as f64;
            sys.rhs(t, &y, &mut k1)?;
            let (y_new, _, _) = Self::step(sys, t, &y, &k1, h)?;
            y = y_new;
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_t: f64, y: &[f64; 1], dy: &mut [f64; 1]) -> Result<()> {
        dy[0] = -y[0];
        Ok(())
    }

    fn oscillator(_t: f64, y: &[f64; 2], dy: &mut [f64; 2]) -> Result<()> {
        dy[0] = y[1];
        dy[1] = -y[0];
        Ok(())
    }

    #[test]
    fn exponential_decay() {
        let solver = DormandPrince::new(1e-10);
        let (y, stats) = solver
            .integrate(&decay, 0.0, [1.0], 5.0, &[], |_, _| {}, |_, _| {})
            .unwrap();
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-9);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn hits_output_times_exactly() {
        let solver = DormandPrince::new(1e-11);
        let stops = [0.0, 0.3, 1.0, 2.5, 2.5, 6.0];
        let mut seen = Vec::new();
        solver
            .integrate(
                &oscillator,
                0.0,
                [0.0, 1.0],
                6.0,
                &stops,
                |i, y| seen.push((i, y[0])),
                |_, _| {},
            )
            .unwrap();
        assert_eq!(seen.len(), stops.len());
        for (k, &(i, y0)) in seen.iter().enumerate() {
            assert_eq!(i, k);
            assert!((y0 - stops[i].sin()).abs() < 1e-9, "t={}", stops[i]);
        }
    }

    #[test]
    fn fifth_order_convergence() {
        let err = |n: usize| {
            let y = DormandPrince::fixed_step(&oscillator, 0.0, [0.0, 1.0], 3.0, n).unwrap();
            (y[0] - 3f64.sin()).hypot(y[1] - 3f64.cos())
        };
        let order = (err(20) / err(40)).log2();
        assert!((order - ORDER as f64).abs() < 0.3, "order {order}");
    }

    #[test]
    fn rejects_bad_stops() {
        let solver = DormandPrince::new(1e-8);
        assert!(solver
            .integrate(&decay, 0.0, [1.0], 1.0, &[0.5, 0.2], |_, _| {}, |_, _| {})
            .is_err());
        assert!(solver
            .integrate(&decay, 0.0, [1.0], 1.0, &[2.0], |_, _| {}, |_, _| {})
            .is_err());
        assert!(solver
            .integrate(&decay, 1.0, [1.0], 1.0, &[], |_, _| {}, |_, _| {})
            .is_err());
    }

    #[test]
    fn rhs_errors_propagate() {
        let failing = |t: f64, _y: &[f64; 1], dy: &mut [f64; 1]| -> Result<()> {
            if t > 0.5 {
                return Err(Error::NonFinite { tau: t });
            }
            dy[0] = 1.0;
            Ok(())
        };
        let solver = DormandPrince::new(1e-8);
        let out = solver.integrate(&failing, 0.0, [0.0], 1.0, &[], |_, _| {}, |_, _| {});
        assert!(matches!(out, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn blow_up_underflows() {
        // y' = y² from y(0) = 1 blows up at t = 1.
        let blow = |_t: f64, y: &[f64; 1], dy: &mut [f64; 1]| -> Result<()> {
            dy[0] = y[0] * y[0];
            Ok(())
        };
        let solver = DormandPrince::new(1e-8);
        let out = solver.integrate(&blow, 0.0, [1.0], 2.0, &[], |_, _| {}, |_, _| {});
        assert!(matches!(
            out,
            Err(Error::StepSizeUnderflow { .. }) | Err(Error::StepLimit { .. })
        ));
    }
}
