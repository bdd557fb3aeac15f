//! Implicit method-of-lines stepping for `w_t = f(x, w, w_x, w_xx)` on a
//! fixed grid with Dirichlet data at both ends.

use crate::numerics::fd::Stencils;
use crate::numerics::linalg::Banded;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Pointwise right-hand side with its partial derivatives.
pub trait PointOperator {
    /// `f` and `(∂f/∂w, ∂f/∂w_x, ∂f/∂w_xx)`.
    fn eval(&self, x: f64, w: f64, wx: f64, wxx: f64) -> (f64, [f64; 3]);
}

/// `u_t = uu_rr − ½u_r² + r⁻²(1−u)(ru_r + 2u)`; with `self_similar` the
/// drift `−s u_s` of the rescaled variable `U(s, τ)` is added.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadialRicci {
    pub self_similar: bool,
}

impl PointOperator for RadialRicci {
    fn eval(&self, r: f64, u: f64, ur: f64, urr: f64) -> (f64, [f64; 3]) {
        let r2 = r * r;
        let mut f = u * urr - 0.5 * ur * ur + (1.0 - u) * (r * ur + 2.0 * u) / r2;
        let du = urr + (2.0 * (1.0 - u) - (r * ur + 2.0 * u)) / r2;
        let mut dur = -ur + (1.0 - u) / r;
        if self.self_similar {
            f -= r * ur;
            dur -= r;
        }
        (f, [du, dur, u])
    }
}

/// Boundary value at one end of the grid.
#[derive(Clone, Default)]
pub enum Edge {
    /// Keep the initial value.
    #[default]
    Hold,
    /// Prescribed value `g(t)`.
    Value(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Edge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Edge::Hold => write!(f, "Hold"),
            Edge::Value(_) => write!(f, "Value(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bdf1,
    Bdf2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub dt: f64,
    pub method: Method,
    /// Newton stops when `|δw_i| ≤ atol + rtol·|w_i|` at every node.
    pub rtol: f64,
    pub atol: f64,
    pub max_newton: usize,
    pub dt_min: f64,
    /// First step; later steps grow by `growth` per accepted step up to
    /// `dt`. `None` starts at `dt`.
    pub dt_start: Option<f64>,
    pub growth: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { dt: 1e-3, method: Method::Bdf2, rtol: 1e-12, atol: 1e-14, max_newton: 25, dt_min: 1e-12, dt_start: None, growth: 2.0 }
    }
}

/// Newton statistics of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    pub iterations: usize,
    /// Max-norm of the discrete equation residual after the last update.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepError {
    /// Newton did not converge even at the smallest allowed step.
    Underflow { t: f64, dt: f64 },
    /// The observer asked to stop.
    Stopped { t: f64 },
}

pub struct Stepper<O: PointOperator> {
    x: Vec<f64>,
    stencils: Stencils,
    op: O,
    left: Edge,
    right: Edge,
    band: usize,
}

impl<O: PointOperator> Stepper<O> {
    /// `even_tip` mirrors values across `x = 0` in the stencils of the
    /// first nodes; the tip node itself is still a boundary row.
    pub fn new(x: Vec<f64>, even_tip: bool, op: O, left: Edge, right: Edge) -> Self {
        let stencils = Stencils::new(&x, even_tip);
        Self::with_stencils(x, stencils, op, left, right)
    }

    pub fn with_stencils(x: Vec<f64>, stencils: Stencils, op: O, left: Edge, right: Edge) -> Self {
        let mut band = 0;
        for i in 0..x.len() {
            for &(j, _, _) in stencils.row(i) {
                band = band.max(i.abs_diff(j));
            }
        }
        Stepper { x, stencils, op, left, right, band }
    }

    pub fn grid(&self) -> &[f64] {
        &self.x
    }

    /// Right-hand side at every interior node (boundary entries are 0).
    pub fn rhs(&self, w: &[f64]) -> Vec<f64> {
        let n = w.len();
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate().take(n - 1).skip(1) {
            let (wx, wxx) = self.stencils.derivs(w, i);
            *o = self.op.eval(self.x[i], w[i], wx, wxx).0;
        }
        out
    }

    fn edge_value(edge: &Edge, initial: f64, t: f64) -> f64 {
        match edge {
            Edge::Hold => initial,
            Edge::Value(g) => g(t),
        }
    }

    /// One implicit step of size `h` from `(t, w)`; `prev` enables BDF2.
    fn try_step(&self, t: f64, w: &[f64], prev: Option<(f64, &[f64])>, h: f64, edges: (f64, f64), ctrl: &StepControl) -> Option<(Vec<f64>, StepInfo)> {
        let n = w.len();
        let (a0, hist, guess): (f64, Vec<f64>, Vec<f64>) = match (ctrl.method, prev) {
            (Method::Bdf2, Some((tp, wp))) => {
                let om = h / (t - tp);
                let hist = w.iter().zip(wp).map(|(a, b)| (1.0 + om) * a - om * om / (1.0 + om) * b).collect();
                let guess = w.iter().zip(wp).map(|(a, b)| a + om * (a - b)).collect();
                ((1.0 + 2.0 * om) / (1.0 + om), hist, guess)
            }
            _ => (1.0, w.to_vec(), w.to_vec()),
        };
        let mut wn = guess;
        wn[0] = edges.0;
        wn[n - 1] = edges.1;
        for it in 1..=ctrl.max_newton {
            let mut jac = Banded::zeros(n, self.band, self.band);
            let mut g = vec![0.0; n];
            jac.set_row_identity(0);
            jac.set_row_identity(n - 1);
            for i in 1..n - 1 {
                let (wx, wxx) = self.stencils.derivs(&wn, i);
                let (f, d) = self.op.eval(self.x[i], wn[i], wx, wxx);
                g[i] = a0 * wn[i] - hist[i] - h * f;
                jac.add(i, i, a0 - h * d[0]);
                for &(j, w1, w2) in self.stencils.row(i) {
                    jac.add(i, j, -h * (d[1] * w1 + d[2] * w2));
                }
            }
            let neg: Vec<f64> = g.iter().map(|v| -v).collect();
            let delta = jac.solve(&neg)?;
            let mut done = true;
            for i in 0..n {
                wn[i] += delta[i];
                if !wn[i].is_finite() {
                    return None;
                }
                if delta[i].abs() > ctrl.atol + ctrl.rtol * wn[i].abs() {
                    done = false;
                }
            }
            if done {
                let res = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                return Some((wn, StepInfo { dt: h, iterations: it, residual: res }));
            }
        }
        None
    }

    /// Integrate from `t0` to `t1`. The observer sees every accepted step
    /// and returns `false` to stop. Failed Newton solves halve the step;
    /// accepted ones let it grow back towards `ctrl.dt`.
    pub fn integrate<F>(&self, w0: &[f64], t0: f64, t1: f64, ctrl: &StepControl, mut observer: F) -> Result<Vec<f64>, StepError>
    where
        F: FnMut(usize, f64, &[f64], &StepInfo) -> bool,
    {
        let n = w0.len();
        let init = (w0[0], w0[n - 1]);
        let mut t = t0;
        let mut w = w0.to_vec();
        let mut prev: Option<(f64, Vec<f64>)> = None;
        let mut dt = ctrl.dt_start.unwrap_or(ctrl.dt).min(ctrl.dt);
        let mut steps = 0;
        let eps = 1e-12 * (t1 - t0).abs().max(1e-300);
        while t1 - t > eps {
            let last = t1 - t <= dt * (1.0 + 1e-9);
            let h = if last { t1 - t } else { dt };
            let tn = if last { t1 } else { t + h };
            let edges = (Self::edge_value(&self.left, init.0, tn), Self::edge_value(&self.right, init.1, tn));
            match self.try_step(t, &w, prev.as_ref().map(|(a, b)| (*a, b.as_slice())), h, edges, ctrl) {
                Some((wn, info)) => {
                    prev = Some((t, std::mem::replace(&mut w, wn)));
                    t = tn;
                    steps += 1;
                    dt = (dt * ctrl.growth.max(1.0)).min(ctrl.dt);
                    if !observer(steps, t, &w, &info) {
                        return Err(StepError::Stopped { t });
                    }
                }
                None => {
                    dt *= 0.5;
                    if dt < ctrl.dt_min {
                        return Err(StepError::Underflow { t, dt });
                    }
                }
            }
        }
        Ok(w)
    }
}
