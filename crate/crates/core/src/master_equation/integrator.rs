//! Dormand–Prince 5(4) with PI step-size control.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Vector-space operations the integrator needs from a state.
pub trait OdeState: Clone {
    fn zeros_like(&self) -> Self;
    /// `self += a · x`
    fn axpy(&mut self, a: f64, x: &Self);
    fn copy_from(&mut self, other: &Self);
    /// `self = a · x`
    fn set_scaled(&mut self, a: f64, x: &Self);
    /// Hairer's RMS error norm of `err` relative to `atol + rtol·max(|y0|, |y1|)`.
    fn error_norm(err: &Self, y0: &Self, y1: &Self, rtol: f64, atol: f64) -> f64;
}

impl OdeState for Vec<f64> {
    fn zeros_like(&self) -> Self {
        vec![0.0; self.len()]
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        self.iter_mut().zip(x).for_each(|(s, x)| *s += a * x);
    }

    fn copy_from(&mut self, other: &Self) {
        self.copy_from_slice(other);
    }

    fn set_scaled(&mut self, a: f64, x: &Self) {
        self.iter_mut().zip(x).for_each(|(s, x)| *s = a * x);
    }

    fn error_norm(err: &Self, y0: &Self, y1: &Self, rtol: f64, atol: f64) -> f64 {
        let n = err.len().max(1) as f64;
        let s: f64 = err
            .iter()
            .zip(y0.iter().zip(y1))
            .map(|(e, (a, b))| {
                let sc = atol + rtol * a.abs().max(b.abs());
                (e / sc).powi(2)
            })
            .sum();
        (s / n).sqrt()
    }
}

impl OdeState for DMatrix<C64> {
    fn zeros_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        self.as_mut_slice()
            .iter_mut()
            .zip(x.as_slice())
            .for_each(|(s, x)| *s += x * a);
    }

    fn copy_from(&mut self, other: &Self) {
        self.as_mut_slice().copy_from_slice(other.as_slice());
    }

    fn set_scaled(&mut self, a: f64, x: &Self) {
        self.as_mut_slice()
            .iter_mut()
            .zip(x.as_slice())
            .for_each(|(s, x)| *s = x * a);
    }

    fn error_norm(err: &Self, y0: &Self, y1: &Self, rtol: f64, atol: f64) -> f64 {
        let n = err.len().max(1) as f64;
        let s: f64 = err
            .as_slice()
            .iter()
            .zip(y0.as_slice().iter().zip(y1.as_slice()))
            .map(|(e, (a, b))| {
                let sc = atol + rtol * a.norm().max(b.norm());
                e.norm_sqr() / (sc * sc)
            })
            .sum();
        (s / n).sqrt()
    }
}

/// Step-size policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepPolicy {
    /// Fixed step (the last step before each sample time is shortened).
    Fixed { h: f64 },
    Adaptive {
        rtol: f64,
        atol: f64,
        /// Steps allowed before giving up with [`Error::StepUnderflow`].
        max_steps: usize,
    },
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy::Adaptive {
            rtol: 1e-8,
            atol: 1e-10,
            max_steps: 20_000_000,
        }
    }
}

impl StepPolicy {
    pub fn adaptive(rtol: f64, atol: f64) -> Self {
        match StepPolicy::default() {
            StepPolicy::Adaptive { max_steps, .. } => StepPolicy::Adaptive {
                rtol,
                atol,
                max_steps,
            },
            StepPolicy::Fixed { .. } => unreachable!(),
        }
    }
}

// Dormand–Prince tableau
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b − b̂ (error weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Counters reported by [`integrate`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// Integrates `dy/dt = f(t, y)` from `t0` through each of `sample_times`
/// (strictly increasing, all > `t0`), calling `on_sample` at each.
///
/// `f(t, y, dydt)` writes the derivative into `dydt`.
pub fn integrate<S, F, O>(
    mut f: F,
    t0: f64,
    y0: &S,
    sample_times: &[f64],
    policy: StepPolicy,
    mut on_sample: O,
) -> Result<(S, IntegratorStats)>
where
    S: OdeState,
    F: FnMut(f64, &S, &mut S),
    O: FnMut(f64, &S) -> Result<()>,
{
    let mut stats = IntegratorStats::default();
    let mut y = y0.clone();
    let mut t = t0;
    if sample_times.is_empty() {
        return Ok((y, stats));
    }
    if sample_times.windows(2).any(|w| w[1] <= w[0]) || sample_times[0] <= t0 {
        return Err(Error::Input("sample times must be strictly increasing and after t0".into()));
    }
    let t_end = *sample_times.last().unwrap();

    let mut k1 = y.zeros_like();
    let mut k2 = y.zeros_like();
    let mut k3 = y.zeros_like();
    let mut k4 = y.zeros_like();
    let mut k5 = y.zeros_like();
    let mut k6 = y.zeros_like();
    let mut k7 = y.zeros_like();
    let mut stage = y.zeros_like();
    let mut y_new = y.zeros_like();
    let mut err = y.zeros_like();

    f(t, &y, &mut k1);
    stats.rhs_evals += 1;

    let (rtol, atol, max_steps, mut h, adaptive) = match policy {
        StepPolicy::Fixed { h } => {
            if !(h > 0.0) {
                return Err(Error::Input(format!("fixed step must be positive, got {h}")));
            }
            (0.0, 0.0, usize::MAX, h, false)
        }
        StepPolicy::Adaptive {
            rtol,
            atol,
            max_steps,
        } => {
            // Hairer, Nørsett, Wanner, starting step heuristic
            let span = t_end - t0;
            let d0 = S::error_norm(&y, &y, &y, rtol, atol);
            let d1 = S::error_norm(&k1, &y, &y, rtol, atol);
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
            let h0 = h0.min(span);
            stage.copy_from(&y);
            stage.axpy(h0, &k1);
            f(t + h0, &stage, &mut k2);
            stats.rhs_evals += 1;
            err.copy_from(&k2);
            err.axpy(-1.0, &k1);
            let d2 = S::error_norm(&err, &y, &y, rtol, atol) / h0;
            let dm = d1.max(d2);
            let h1 = if dm <= 1e-15 { (h0 * 1e-3).max(1e-6 * span) } else { (0.01 / dm).powf(0.2) };
            (rtol, atol, max_steps, (100.0 * h0).min(h1).min(span), true)
        }
    };

    let h_min = 1e-14 * (t_end - t0).abs().max(1e-300);
    let mut err_prev: f64 = 1e-4;
    let mut next_sample = 0usize;
    let mut steps = 0usize;

    while next_sample < sample_times.len() {
        let target = sample_times[next_sample];
        let mut hit_sample = false;
        let mut h_step = h;
        if t + h_step >= target - 1e-13 * target.abs().max(1.0) {
            h_step = target - t;
            hit_sample = true;
        }
        if adaptive && h_step < h_min && !hit_sample {
            return Err(Error::StepUnderflow { t, h: h_step });
        }
        steps += 1;
        if steps > max_steps {
            return Err(Error::StepUnderflow { t, h: h_step });
        }

        stage.copy_from(&y);
        stage.axpy(h_step * A21, &k1);
        f(t + C2 * h_step, &stage, &mut k2);

        stage.copy_from(&y);
        stage.axpy(h_step * A31, &k1);
        stage.axpy(h_step * A32, &k2);
        f(t + C3 * h_step, &stage, &mut k3);

        stage.copy_from(&y);
        stage.axpy(h_step * A41, &k1);
        stage.axpy(h_step * A42, &k2);
        stage.axpy(h_step * A43, &k3);
        f(t + C4 * h_step, &stage, &mut k4);

        stage.copy_from(&y);
        stage.axpy(h_step * A51, &k1);
        stage.axpy(h_step * A52, &k2);
        stage.axpy(h_step * A53, &k3);
        stage.axpy(h_step * A54, &k4);
        f(t + C5 * h_step, &stage, &mut k5);

        stage.copy_from(&y);
        stage.axpy(h_step * A61, &k1);
        stage.axpy(h_step * A62, &k2);
        stage.axpy(h_step * A63, &k3);
        stage.axpy(h_step * A64, &k4);
        stage.axpy(h_step * A65, &k5);
        f(t + h_step, &stage, &mut k6);

        y_new.copy_from(&y);
        y_new.axpy(h_step * B1, &k1);
        y_new.axpy(h_step * B3, &k3);
        y_new.axpy(h_step * B4, &k4);
        y_new.axpy(h_step * B5, &k5);
        y_new.axpy(h_step * B6, &k6);
        f(t + h_step, &y_new, &mut k7);
        stats.rhs_evals += 6;

        if !adaptive {
            t += h_step;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            stats.accepted += 1;
            if hit_sample {
                t = target;
                on_sample(t, &y)?;
                next_sample += 1;
            }
            continue;
        }

        err.set_scaled(h_step * E1, &k1);
        err.axpy(h_step * E3, &k3);
        err.axpy(h_step * E4, &k4);
        err.axpy(h_step * E5, &k5);
        err.axpy(h_step * E6, &k6);
        err.axpy(h_step * E7, &k7);
        let en = S::error_norm(&err, &y, &y_new, rtol, atol);
        if !en.is_finite() {
            h = h_step * 0.1;
            stats.rejected += 1;
            if h < h_min {
                return Err(Error::StepUnderflow { t, h });
            }
            continue;
        }

        if en <= 1.0 {
            // PI controller (Hairer, Wanner: β = 0.04)
            let fac = if en == 0.0 {
                5.0
            } else {
                (0.9 * en.powf(-0.17) * err_prev.powf(0.04)).clamp(0.2, 5.0)
            };
            err_prev = en.max(1e-4);
            t += h_step;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            stats.accepted += 1;
            if hit_sample {
                t = target;
                on_sample(t, &y)?;
                next_sample += 1;
                // a step clipped to land on the sample does not shrink the proposal
                h = h.max(h_step * fac);
            } else {
                h = h_step * fac;
            }
        } else {
            stats.rejected += 1;
            h = h_step * (0.9 * en.powf(-0.2)).max(0.2);
            if h < h_min {
                return Err(Error::StepUnderflow { t, h });
            }
        }
    }
    Ok((y, stats))
}
