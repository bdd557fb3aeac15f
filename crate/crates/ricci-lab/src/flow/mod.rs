//! Implicit evolution of the radial flow, barrier comparison runs, and the
//! arclength (`F`) and rescaled (`G`) descriptions of a neck.

pub mod arclength;
pub mod comparison;
pub mod diagnostics;
pub mod evolve;
pub mod implicit;

pub use arclength::{compute_f, rescale_g, rescale_samples, residual_f, ArclengthProfile, FResidual, IdentityDefects, RescaledProfile, ResidualField};
pub use comparison::{comparison_check, ComparisonOptions, ComparisonReport, InitialShape};
pub use diagnostics::{diagnostics_ffz, FfzReport};
pub use evolve::{evolve, BoundaryKind, EvolveOptions, FlowTrajectory, SnapshotReport};
pub use implicit::{Edge, Method, StepControl};

use crate::barrier::BarrierError;
use crate::geometry::GeometryError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error("time span [{t0}, {t1}] is empty")]
    InvalidSpan { t0: f64, t1: f64 },
    #[error("step size underflow at t = {t} (dt = {dt:e})")]
    StepUnderflow { t: f64, dt: f64 },
    #[error("u = {u} left the admissible range at r = {r}, t = {t}")]
    Breakdown { t: f64, r: f64, u: f64 },
    #[error("initial data exceed the barrier at s = {s} by {excess:e}")]
    InitialOrdering { s: f64, excess: f64 },
    #[error("u = {u} ≤ 0 at r = {r}: arclength diverges")]
    ArclengthDiverges { r: f64, u: f64 },
    #[error("marked radius {rbar} outside the profile range")]
    MarkedRadius { rbar: f64 },
    #[error("need at least {need} snapshots, got {got}")]
    InsufficientSnapshots { need: usize, got: usize },
    #[error("rescaling needs t < 0, got t = {t}")]
    NonNegativeTime { t: f64 },
    #[error("{0}")]
    Invalid(String),
}
