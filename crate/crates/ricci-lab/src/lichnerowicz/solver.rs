//! One-dimensional solvers for `∂_t c = ∂_z²c − κ c/(−2t)` on a rectangle
//! with Dirichlet data on the sides.

use super::LichError;
use crate::numerics::linalg::tridiagonal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModeScheme {
    /// Heat equation for `ĉ = (−t)^{−κ/2}c`, converted back at output.
    #[default]
    Substituted,
    /// `c` itself, with the factor `(−t)^{κ/2}` applied exactly each step.
    Damped,
    /// Crank–Nicolson on the damped equation, damping by the trapezoid rule.
    DirectCn,
    /// Forward Euler; requires `dt ≤ dz²/2`.
    Explicit,
}

/// Data on the parabolic boundary of `[z₀, z₁] × [t₀, t₁]`.
#[derive(Debug, Clone, Copy)]
pub struct ModeProblem<'a> {
    pub kappa: f64,
    /// Uniform nodes.
    pub z: &'a [f64],
    /// Increasing times, all negative.
    pub t: &'a [f64],
    pub initial: &'a [f64],
    pub left: &'a [f64],
    pub right: &'a [f64],
}

impl ModeProblem<'_> {
    fn check(&self) -> Result<f64, LichError> {
        let (nz, nt) = (self.z.len(), self.t.len());
        if nz < 3 || nt < 1 || self.initial.len() != nz || self.left.len() != nt || self.right.len() != nt {
            return Err(LichError::Grid("mode problem sizes disagree".into()));
        }
        let dz = (self.z[nz - 1] - self.z[0]) / (nz - 1) as f64;
        if !(dz > 0.0) || self.z.windows(2).any(|w| ((w[1] - w[0]) - dz).abs() > 1e-9 * dz) {
            return Err(LichError::Grid("z nodes must be uniform and increasing".into()));
        }
        if self.t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LichError::Grid("times must increase".into()));
        }
        if let Some(&t) = self.t.iter().find(|&&t| t >= 0.0) {
            return Err(LichError::TimeCrossesZero { t });
        }
        Ok(dz)
    }
}

/// One Crank–Nicolson step of `u_t = u_zz − a u` with damping `a0` at the
/// old time and `a1` at the new time.
fn cn_step(u: &[f64], dt: f64, dz: f64, a0: f64, a1: f64, bc: (f64, f64)) -> Vec<f64> {
    let n = u.len();
    let r = dt / (dz * dz);
    let m = n - 2;
    let mut rhs = vec![0.0; m];
    for i in 1..n - 1 {
        rhs[i - 1] = u[i] + 0.5 * r * (u[i - 1] - 2.0 * u[i] + u[i + 1]) - 0.5 * dt * a0 * u[i];
    }
    rhs[0] += 0.5 * r * bc.0;
    rhs[m - 1] += 0.5 * r * bc.1;
    let sub = vec![-0.5 * r; m];
    let diag = vec![1.0 + r + 0.5 * dt * a1; m];
    let sup = vec![-0.5 * r; m];
    let inner = tridiagonal(&sub, &diag, &sup, &rhs);
    let mut out = Vec::with_capacity(n);
    out.push(bc.0);
    out.extend(inner);
    out.push(bc.1);
    out
}

/// `c(z, t)` on the whole grid, row `it` at `[it·nz, (it+1)·nz)`.
pub fn mode_evolve(p: &ModeProblem, scheme: ModeScheme) -> Result<Vec<f64>, LichError> {
    let dz = p.check()?;
    let (nz, nt) = (p.z.len(), p.t.len());
    let f = |t: f64| (-t).powf(0.5 * p.kappa);
    let damp = |t: f64| p.kappa / (-2.0 * t);
    if scheme == ModeScheme::Explicit {
        let limit = 0.5 * dz * dz;
        if let Some(w) = p.t.windows(2).find(|w| w[1] - w[0] > limit * (1.0 + 1e-12)) {
            return Err(LichError::Cfl { dt: w[1] - w[0], limit });
        }
    }
    let mut out = Vec::with_capacity(nz * nt);
    match scheme {
        ModeScheme::Substituted => {
            let f0 = f(p.t[0]);
            let mut u: Vec<f64> = p.initial.iter().map(|c| c / f0).collect();
            out.extend(u.iter().map(|v| v * f0));
            for n in 1..nt {
                let f1 = f(p.t[n]);
                u = cn_step(&u, p.t[n] - p.t[n - 1], dz, 0.0, 0.0, (p.left[n] / f1, p.right[n] / f1));
                out.extend(u.iter().map(|v| v * f1));
            }
        }
        ModeScheme::Damped => {
            let mut c = p.initial.to_vec();
            out.extend_from_slice(&c);
            for n in 1..nt {
                let (f0, f1) = (f(p.t[n - 1]), f(p.t[n]));
                let u: Vec<f64> = c.iter().map(|v| v / f0).collect();
                let u = cn_step(&u, p.t[n] - p.t[n - 1], dz, 0.0, 0.0, (p.left[n] / f1, p.right[n] / f1));
                c = u.iter().map(|v| v * f1).collect();
                out.extend_from_slice(&c);
            }
        }
        ModeScheme::DirectCn => {
            let mut c = p.initial.to_vec();
            out.extend_from_slice(&c);
            for n in 1..nt {
                c = cn_step(&c, p.t[n] - p.t[n - 1], dz, damp(p.t[n - 1]), damp(p.t[n]), (p.left[n], p.right[n]));
                out.extend_from_slice(&c);
            }
        }
        ModeScheme::Explicit => {
            let mut c = p.initial.to_vec();
            out.extend_from_slice(&c);
            for n in 1..nt {
                let dt = p.t[n] - p.t[n - 1];
                let a = damp(p.t[n - 1]);
                let r = dt / (dz * dz);
                let mut next = vec![0.0; nz];
                next[0] = p.left[n];
                next[nz - 1] = p.right[n];
                for i in 1..nz - 1 {
                    next[i] = c[i] + r * (c[i - 1] - 2.0 * c[i] + c[i + 1]) - dt * a * c[i];
                }
                c = next;
                out.extend_from_slice(&c);
            }
        }
    }
    Ok(out)
}
