//! Adaptive Dormand–Prince 5(4) integration for small systems.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    MaxSteps { max_steps: usize, t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; 0 picks `1e-3·|t1 − t0|`.
    pub h_init: f64,
    /// Upper bound on the step magnitude.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Dopri5Options { rtol: 1e-10, atol: 1e-12, h_init: 0.0, h_max: f64::INFINITY, max_steps: 1_000_000 }
    }
}

/// What the observer wants after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn lin<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrate `y' = f(t, y)` from `t0` to `t1` (either direction). The
/// observer sees every accepted step, including the final one, and may
/// stop the integration early. Returns the last accepted `(t, y)`.
pub fn dopri5<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &Dopri5Options,
    mut observer: O,
) -> Result<(f64, [f64; N]), OdeError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]) -> Flow,
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut h = if opts.h_init > 0.0 { opts.h_init } else { 1e-3 * span };
    h = h.min(opts.h_max).min(span);
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut steps = 0usize;
    let mut err_prev: f64 = 1e-4;
    while dir * (t1 - t) > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(OdeError::MaxSteps { max_steps: opts.max_steps, t });
        }
        let remaining = (t1 - t).abs();
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        let hs = dir * h;
        let k2 = f(t + C2 * hs, &lin(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &lin(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hs, &lin(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * hs, &lin(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(t + hs, &lin(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = lin(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + hs, &y_new);
        let mut err = 0.0f64;
        let mut finite = true;
        for i in 0..N {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
            finite &= y_new[i].is_finite() && k7[i].is_finite();
        }
        err = (err / N as f64).sqrt();
        if !finite || !err.is_finite() {
            h *= 0.25;
            if h < 1e-14 * (t.abs() + span) {
                return Err(OdeError::NonFinite { t });
            }
            continue;
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + hs };
            y = y_new;
            k1 = k7;
            // PI step-size control
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            err_prev = err.max(1e-4);
            h = (h * fac.clamp(0.2, 5.0)).min(opts.h_max);
            if observer(t, &y) == Flow::Stop {
                return Ok((t, y));
            }
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
        }
        if h < 1e-15 * (t.abs() + span) {
            return Err(OdeError::StepUnderflow { t });
        }
    }
    Ok((t, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_backward_and_forward() {
        let opts = Dopri5Options { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let (_, y) = dopri5(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], 3.0, &opts, |_, _| Flow::Continue).unwrap();
        assert!((y[0] - 3f64.sin()).abs() < 1e-10);
        let (_, y) = dopri5(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], -2.0, &opts, |_, _| Flow::Continue).unwrap();
        assert!((y[0] - (-2f64).sin()).abs() < 1e-10);
    }

    #[test]
    fn observer_stops_early() {
        let opts = Dopri5Options { h_max: 0.01, ..Default::default() };
        let (t, _) = dopri5(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 1.0, &opts, |t, _| if t > 0.5 { Flow::Stop } else { Flow::Continue }).unwrap();
        assert!(t > 0.5 && t < 0.52);
    }
}
