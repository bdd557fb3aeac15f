//! Evolution of `u(r, t)` by the radial flow equation.

use super::implicit::{Edge, Method, RadialRicci, StepControl, StepError, StepInfo, Stepper};
use super::FlowError;
use crate::geometry::RadialProfile;
use serde::Serialize;

/// Kind of boundary condition recorded with a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    /// Regular tip: `u(0) = 1`, even extension.
    Tip,
    Dirichlet,
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub step: StepControl,
    /// Ignored when the initial profile includes the tip.
    pub left: Edge,
    pub right: Edge,
    /// Record a snapshot every this many accepted steps (the final state is
    /// always recorded).
    pub snapshot_every: usize,
    /// `u` may not exceed `1 + u_tol` on profiles containing the tip.
    pub u_tol: f64,
    /// Tolerance of the conserved-flag checks `u ≤ 1`, `u_r ≤ 0`.
    pub flag_tol: f64,
    /// Initial marked radius `r̄(t₀)`, evolved by `r̄' = −v(r̄, t)`.
    pub marked_radius: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            step: StepControl::default(),
            left: Edge::Hold,
            right: Edge::Hold,
            snapshot_every: 1,
            u_tol: 1e-6,
            flag_tol: 1e-8,
            marked_radius: None,
        }
    }
}

/// Per-snapshot record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnapshotReport {
    pub t: f64,
    /// Largest Newton equation residual since the previous snapshot.
    pub max_residual: f64,
    /// `u ≤ 1` and `u_r ≤ 0` still hold; `None` unless the initial data
    /// were flagged positive-curvature.
    pub flags_hold: Option<bool>,
    pub marked_radius: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FlowTrajectory {
    pub snapshots: Vec<RadialProfile>,
    pub reports: Vec<SnapshotReport>,
    pub dt: f64,
    pub method: Method,
    pub boundaries: (BoundaryKind, BoundaryKind),
}

impl FlowTrajectory {
    pub fn last(&self) -> &RadialProfile {
        self.snapshots.last().expect("trajectory has the initial snapshot")
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|p| p.t()).collect()
    }

    /// `r̄` at every snapshot, if tracked.
    pub fn marked_radii(&self) -> Option<Vec<f64>> {
        self.reports.iter().map(|r| r.marked_radius).collect()
    }

    /// Largest deviation of any snapshot from the initial values.
    pub fn max_drift(&self) -> f64 {
        let u0 = self.snapshots[0].u();
        self.snapshots
            .iter()
            .flat_map(|p| p.u().iter().zip(u0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }

    pub fn flags_preserved(&self) -> Option<bool> {
        self.reports.iter().map(|r| r.flags_hold).try_fold(true, |acc, f| f.map(|f| acc && f))
    }
}

fn flags_hold(p: &RadialProfile, tol: f64) -> Result<bool, FlowError> {
    Ok(p.positive_curvature_violations(tol)?.is_empty())
}

fn advance_marked(prev: &RadialProfile, next: &RadialProfile, rbar: f64) -> Result<f64, FlowError> {
    let h = next.t() - prev.t();
    let k1 = -prev.sample(rbar)?.velocity_v();
    let k2 = -next.sample(rbar + h * k1)?.velocity_v();
    Ok(rbar + 0.5 * h * (k1 + k2))
}

/// Implicit evolution of `initial` to `t_final`.
pub fn evolve(initial: &RadialProfile, t_final: f64, opts: &EvolveOptions) -> Result<FlowTrajectory, FlowError> {
    let t0 = initial.t();
    if t_final <= t0 {
        return Err(FlowError::InvalidSpan { t0, t1: t_final });
    }
    let tip = initial.tip_included();
    let left = if tip { Edge::Hold } else { opts.left.clone() };
    let stepper = Stepper::new(initial.r().to_vec(), tip, RadialRicci { self_similar: false }, left, opts.right.clone());
    let flagged = initial.is_positive_curvature();
    let first = SnapshotReport {
        t: t0,
        max_residual: 0.0,
        flags_hold: if flagged { Some(flags_hold(initial, opts.flag_tol)?) } else { None },
        marked_radius: opts.marked_radius,
    };
    let mut traj = FlowTrajectory {
        snapshots: vec![initial.clone()],
        reports: vec![first],
        dt: opts.step.dt,
        method: opts.step.method,
        boundaries: (if tip { BoundaryKind::Tip } else { BoundaryKind::Dirichlet }, BoundaryKind::Dirichlet),
    };
    let mut current = initial.clone();
    let mut rbar = opts.marked_radius;
    let mut since = 0usize;
    let mut max_res: f64 = 0.0;
    let mut failure: Option<FlowError> = None;
    let every = opts.snapshot_every.max(1);

    let mut observe = |_: usize, t: f64, w: &[f64], info: &StepInfo| -> Result<(), FlowError> {
        let r = current.r();
        for (i, &u) in w.iter().enumerate() {
            if u <= 0.0 || (tip && u > 1.0 + opts.u_tol) {
                return Err(FlowError::Breakdown { t, r: r[i], u });
            }
        }
        let next = current.with_values(w.to_vec(), t)?;
        if let Some(rb) = rbar {
            rbar = Some(advance_marked(&current, &next, rb)?);
        }
        max_res = max_res.max(info.residual);
        since += 1;
        let done = (t - t_final).abs() <= 1e-12 * t_final.abs().max(1.0);
        if since >= every || done {
            traj.reports.push(SnapshotReport {
                t,
                max_residual: max_res,
                flags_hold: if flagged { Some(flags_hold(&next, opts.flag_tol)?) } else { None },
                marked_radius: rbar,
            });
            traj.snapshots.push(next.clone());
            since = 0;
            max_res = 0.0;
        }
        current = next;
        Ok(())
    };
    let res = stepper.integrate(initial.u(), t0, t_final, &opts.step, |k, t, w, info| match observe(k, t, w, info) {
        Ok(()) => true,
        Err(e) => {
            failure = Some(e);
            false
        }
    });
    match res {
        Ok(_) => Ok(traj),
        Err(StepError::Stopped { .. }) => Err(failure.expect("observer stored its error")),
        Err(StepError::Underflow { t, dt }) => Err(FlowError::StepUnderflow { t, dt }),
    }
}

/// Uniform grid on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Shrinking round sphere `u = 1 − r²/ρ(t)²`, `ρ² = ρ₀² − 4t`.
pub fn sphere_u(rho0: f64, r: f64, t: f64) -> f64 {
    1.0 - r * r / (rho0 * rho0 - 4.0 * t)
}
