//! Maximum-principle runs against the barrier ψ_a.
//!
//! With `s = r/√(−2t)` and `τ = −½ln(−t)` the flow becomes
//! `U_τ = D[U] = UU_ss − ½U_s² + s⁻²(1−U)(sU_s + 2U) − sU_s`, and ψ_a is a
//! stationary supersolution. Runs are carried out directly in `(s, τ)`, so
//! the barrier is compared node by node without interpolation.

use super::implicit::{Edge, Method, RadialRicci, StepControl, StepError, Stepper};
use super::FlowError;
use crate::barrier::{log_grid, BarrierFunction};
use crate::numerics::fd::Stencils;
use serde::Serialize;
use std::f64::consts::LN_2;

/// Initial data `U₀(s) = m(s)·ψ_a(s)` described by the ratio `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialShape {
    /// `m ≡ c`.
    Scaled { c: f64 },
    /// `m = 1 − κℓ²/(1+ℓ²)`, `ℓ = ln(s/s_touch)`: equal to ψ at one point.
    Touching { s_touch: f64, kappa: f64 },
    /// `m = mid + amp·sin(k ln s)`.
    Wiggle { mid: f64, amp: f64, k: f64 },
    /// `m = mid + amp·tanh(ln(s/s_mid))`.
    Ramp { s_mid: f64, mid: f64, amp: f64 },
}

impl InitialShape {
    pub fn ratio(&self, s: f64) -> f64 {
        match *self {
            InitialShape::Scaled { c } => c,
            InitialShape::Touching { s_touch, kappa } => {
                let l = (s / s_touch).ln();
                1.0 - kappa * l * l / (1.0 + l * l)
            }
            InitialShape::Wiggle { mid, amp, k } => mid + amp * (k * s.ln()).sin(),
            InitialShape::Ramp { s_mid, mid, amp } => mid + amp * (s / s_mid).ln().tanh(),
        }
    }

    /// Five ordered initial data for barrier scale `a`.
    pub fn standard_suite(a: f64) -> [InitialShape; 5] {
        [
            InitialShape::Scaled { c: 0.5 },
            InitialShape::Scaled { c: 0.9 },
            InitialShape::Touching { s_touch: 2.0 / a, kappa: 0.5 },
            InitialShape::Wiggle { mid: 0.75, amp: 0.25, k: 3.0 },
            InitialShape::Ramp { s_mid: 3.0 / a, mid: 0.6, amp: 0.35 },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonOptions {
    /// Log-spaced nodes on `[s_lo, inner_extent/a]`, the soliton region,
    /// where `D[ψ_a] ≈ −a` is what survives a cancellation of `O(a²)` terms.
    pub inner_nodes: usize,
    pub inner_extent: f64,
    /// Log-spaced nodes on the rest of the interval.
    pub outer_nodes: usize,
    /// Left end; `None` means `r_*/a`.
    pub s_lo: Option<f64>,
    pub s_hi: f64,
    /// Length of the run in `τ`; `½ln2` is one halving of `−t`.
    pub tau_span: f64,
    pub steps: usize,
    /// Newton tolerances; `atol = 0` keeps the test relative, which the
    /// barrier needs since it spans about 28 decades.
    pub rtol: f64,
    pub atol: f64,
    /// Backward Euler by default: it keeps a discrete maximum principle.
    /// BDF2 overshoots the fast relaxation of the soliton region and can
    /// cross the barrier by a few percent where the data touch it.
    pub method: Method,
    pub growth: f64,
}

impl Default for ComparisonOptions {
    fn default() -> Self {
        ComparisonOptions { inner_nodes: 2000, inner_extent: 50.0, outer_nodes: 1000, s_lo: None, s_hi: 1.0, tau_span: 0.5 * LN_2, steps: 200, rtol: 1e-10, atol: 0.0, method: Method::Bdf1, growth: 1.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub shape: InitialShape,
    pub a: f64,
    /// `min (ψ_a − U)` over all nodes and steps, including the initial data.
    pub min_gap: f64,
    pub argmin_s: f64,
    pub argmin_tau: f64,
    /// `min (ψ_a − U)/ψ_a`.
    pub min_relative_gap: f64,
    pub tau_span: f64,
    /// Factor by which `−t` shrinks over the run, `e^{2Δτ}`.
    pub time_factor: f64,
    pub steps: usize,
}

impl ComparisonReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.min_gap >= -tol
    }
}

/// Where `U ≈ a⁻²s⁻²` the equation is transport towards `s = 0` with
/// speed `≈ 1/s` and a diffusion coefficient `U` of order `a⁻²`. There the
/// stencils lean one node upwind; centered ones let relaxation wiggles from
/// the inner region travel outwards and drive `U` negative. The cell Péclet
/// number is judged on the barrier itself.
fn advection_stencils(s: &[f64], psi: &[f64]) -> Stencils {
    let central = Stencils::new(s, false);
    let n = s.len();
    let shifts: Vec<i8> = (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                return 0;
            }
            let (p1, _) = central.derivs(psi, i);
            let speed = -p1 + (1.0 - psi[i]) / s[i] - s[i];
            let h = 0.5 * (s[i + 1] - s[i - 1]);
            if speed.abs() * h > 2.0 * psi[i] {
                speed.signum() as i8
            } else {
                0
            }
        })
        .collect();
    Stencils::with_shifts(s, false, &shifts)
}

/// Run the flow from `shape·ψ_a` and track `ψ_a − U`.
pub fn comparison_check(psi: &BarrierFunction, shape: InitialShape, opts: &ComparisonOptions) -> Result<ComparisonReport, FlowError> {
    let lo = opts.s_lo.unwrap_or_else(|| psi.s_lo());
    let mid = opts.inner_extent / psi.a;
    if !(lo < mid && mid < opts.s_hi) {
        return Err(FlowError::Invalid(format!("inner extent {mid} outside ({lo}, {})", opts.s_hi)));
    }
    let mut s = log_grid(lo, mid, opts.inner_nodes);
    s.extend(log_grid(mid, opts.s_hi, opts.outer_nodes + 1).into_iter().skip(1));
    let barrier: Vec<f64> = s.iter().map(|&x| psi.psi(x)).collect::<Result<_, _>>()?;
    let u0: Vec<f64> = s.iter().zip(&barrier).map(|(&x, &b)| shape.ratio(x) * b).collect();
    for i in 0..s.len() {
        let excess = u0[i] - barrier[i];
        if excess > 1e-15 * barrier[i].abs() {
            return Err(FlowError::InitialOrdering { s: s[i], excess });
        }
    }
    let mut rep = ComparisonReport {
        shape,
        a: psi.a,
        min_gap: f64::INFINITY,
        argmin_s: f64::NAN,
        argmin_tau: 0.0,
        min_relative_gap: f64::INFINITY,
        tau_span: opts.tau_span,
        time_factor: (2.0 * opts.tau_span).exp(),
        steps: 0,
    };
    let track = |tau: f64, w: &[f64], rep: &mut ComparisonReport| {
        for i in 0..w.len() {
            let gap = barrier[i] - w[i];
            if gap < rep.min_gap {
                rep.min_gap = gap;
                rep.argmin_s = s[i];
                rep.argmin_tau = tau;
            }
            rep.min_relative_gap = rep.min_relative_gap.min(gap / barrier[i]);
        }
    };
    track(0.0, &u0, &mut rep);
    let stepper = Stepper::with_stencils(s.clone(), advection_stencils(&s, &barrier), RadialRicci { self_similar: true }, Edge::Hold, Edge::Hold);
    let ctrl = StepControl {
        dt: opts.tau_span / opts.steps as f64,
        method: opts.method,
        rtol: opts.rtol,
        atol: opts.atol,
        max_newton: 30,
        dt_min: 1e-30,
        // the inner region relaxes on τ-scales of order a⁻²
        dt_start: Some(1e-3 / (psi.a * psi.a)),
        growth: opts.growth,
    };
    let mut steps = 0;
    let mut bad: Option<FlowError> = None;
    let run = stepper.integrate(&u0, 0.0, opts.tau_span, &ctrl, |k, tau, w, _| {
        steps = k;
        track(tau, w, &mut rep);
        match w.iter().position(|&v| !(v > 0.0)) {
            Some(i) => {
                bad = Some(FlowError::Breakdown { t: tau, r: s[i], u: w[i] });
                false
            }
            None => true,
        }
    });
    match run {
        Ok(_) => {}
        Err(StepError::Underflow { t, dt }) => return Err(FlowError::StepUnderflow { t, dt }),
        Err(StepError::Stopped { .. }) => return Err(bad.expect("observer recorded the breakdown")),
    }
    rep.steps = steps;
    Ok(rep)
}
