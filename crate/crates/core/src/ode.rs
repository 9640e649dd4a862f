//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("exceeded {max_steps} steps before reaching t = {target}")]
    TooManySteps { max_steps: usize, target: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct Dopri5<T> {
    pub rtol: T,
    pub atol: T,
    /// Upper bound on the step; keeps node counting reliable for oscillatory
    /// solutions.
    pub h_max: T,
    pub max_steps: usize,
}

impl<T: Scalar> Default for Dopri5<T> {
    fn default() -> Self {
        Dopri5 { rtol: T::lit(T::ODE_RTOL), atol: T::lit(T::ODE_RTOL * 1e-2), h_max: T::infinity(), max_steps: 1_000_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Result of one integration leg.
#[derive(Clone, Copy, Debug)]
pub struct Leg<T, const N: usize> {
    pub y: [T; N],
    /// Last accepted step size; a good initial guess for the next leg.
    pub h_last: T,
    pub steps: usize,
}

impl<T: Scalar> Dopri5<T> {
    pub fn with_max_step(mut self, h_max: T) -> Self {
        self.h_max = h_max;
        self
    }

    /// Integrates `y' = rhs(t, y)` from `t0` to `t1 > t0`. `observe` is called
    /// after every accepted step with the new `(t, y)`.
    pub fn integrate<const N: usize>(
        &self,
        mut rhs: impl FnMut(T, &[T; N]) -> [T; N],
        t0: T,
        y0: [T; N],
        t1: T,
        h_init: Option<T>,
        mut observe: impl FnMut(T, &[T; N]),
    ) -> Result<Leg<T, N>, OdeError> {
        let span = t1 - t0;
        if span <= T::zero() {
            return Ok(Leg { y: y0, h_last: h_init.unwrap_or(T::zero()), steps: 0 });
        }
        let lit = T::lit;
        let mut t = t0;
        let mut y = y0;
        let mut k = [[T::zero(); N]; 7];
        k[0] = rhs(t, &y);
        let mut h = match h_init {
            Some(h) if h > T::zero() => h,
            _ => self.initial_step(&y, &k[0], span),
        };
        h = h.min(self.h_max).min(span);
        let h_floor = lit(16.0) * T::epsilon() * (t0.abs().max(t1.abs()).max(span));
        let mut steps = 0usize;
        let mut h_last = h;

        while t < t1 {
            if steps >= self.max_steps {
                return Err(OdeError::TooManySteps { max_steps: self.max_steps, target: t1.to_f64_lossy() });
            }
            let last = t + h >= t1;
            let h_step = if last { t1 - t } else { h };

            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] = ys[i] + h_step * lit(a) * kj[i];
                        }
                    }
                }
                k[s] = rhs(t + lit(C[s]) * h_step, &ys);
            }
            // stage 7 is evaluated at the 5th order solution (FSAL)
            let mut y_new = y;
            for (j, kj) in k.iter().enumerate().take(6) {
                let a = A[6][j];
                if a != 0.0 {
                    for i in 0..N {
                        y_new[i] = y_new[i] + h_step * lit(a) * kj[i];
                    }
                }
            }
            let mut err_sq = T::zero();
            for i in 0..N {
                let mut e = T::zero();
                for (s, ks) in k.iter().enumerate() {
                    if E[s] != 0.0 {
                        e = e + lit(E[s]) * ks[i];
                    }
                }
                e = e * h_step;
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err_sq = err_sq + (e / sc) * (e / sc);
            }
            let err = (err_sq / T::from_usize_lossy(N)).sqrt();
            if !err.is_finite() {
                if y_new.iter().all(|v| v.is_finite()) {
                    return Err(OdeError::NonFinite { t: t.to_f64_lossy() });
                }
                h = h_step / lit(10.0);
                if h < h_floor {
                    return Err(OdeError::StepUnderflow { t: t.to_f64_lossy(), h: h.to_f64_lossy() });
                }
                continue;
            }

            if err <= T::one() {
                t = if last { t1 } else { t + h_step };
                y = y_new;
                steps += 1;
                h_last = h_step;
                observe(t, &y);
                k[0] = k[6];
                let factor = if err == T::zero() { lit(5.0) } else { (lit(0.9) * err.powf(lit(-0.2))).min(lit(5.0)) };
                h = (h_step * factor.max(lit(0.2))).min(self.h_max);
            } else {
                h = h_step * (lit(0.9) * err.powf(lit(-0.2))).max(lit(0.2));
                if h < h_floor {
                    return Err(OdeError::StepUnderflow { t: t.to_f64_lossy(), h: h.to_f64_lossy() });
                }
            }
        }
        Ok(Leg { y, h_last, steps })
    }

    fn initial_step<const N: usize>(&self, y: &[T; N], dy: &[T; N], span: T) -> T {
        let mut d0 = T::zero();
        let mut d1 = T::zero();
        for i in 0..N {
            let sc = self.atol + self.rtol * y[i].abs();
            d0 = d0 + (y[i] / sc) * (y[i] / sc);
            d1 = d1 + (dy[i] / sc) * (dy[i] / sc);
        }
        let guess = if d0.sqrt() < T::lit(1e-5) || d1.sqrt() < T::lit(1e-5) {
            T::lit(1e-6) * span
        } else {
            T::lit(0.01) * (d0 / d1).sqrt()
        };
        guess.min(span / T::lit(10.0)).max(span * T::lit(1e-9))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let solver = Dopri5::<f64>::default();
        let two_pi = 2.0 * std::f64::consts::PI;
        let leg = solver.integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], two_pi, None, |_, _| {}).unwrap();
        assert!(leg.y[0].abs() < 1e-9, "{:?}", leg.y);
        assert!((leg.y[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exponential_growth_and_observer() {
        let solver = Dopri5::<f64>::default().with_max_step(0.01);
        let mut count = 0;
        let leg = solver
            .integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 1.0, None, |_, _| count += 1)
            .unwrap();
        assert!((leg.y[0] - std::f64::consts::E).abs() < 1e-9);
        assert_eq!(count, leg.steps);
        assert!(leg.steps >= 100);
    }

    #[test]
    fn single_precision_runs() {
        let solver = Dopri5::<f32>::default();
        let leg = solver.integrate(|_, y: &[f32; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], 3.0, None, |_, _| {}).unwrap();
        assert!((leg.y[0] - 3f32.sin()).abs() < 1e-4);
    }

    #[test]
    fn reports_blow_up() {
        let solver = Dopri5::<f64>::default();
        let r = solver.integrate(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 2.0, None, |_, _| {});
        assert!(r.is_err());
    }
}
