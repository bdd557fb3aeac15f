//! The parabolic Lichnerowicz equation `∂_t h = Δ_L h` on the shrinking
//! cylinder `ḡ(t) = (−2t)g_{S²} + dz²`.
//!
//! Writing `h = ω g_{S²} + χ + dz⊗σ + σ⊗dz + β dz⊗dz` and expanding each
//! piece in eigenfields of the sphere, every coefficient solves
//! `∂_t c = ∂_z²c − κ c/(−2t)` with `κ = λ, ν + 4, μ + 1, λ` for
//! `ω, χ, σ, β`. The substitution `ĉ = (−t)^{−κ/2}c` turns this into the
//! heat equation.

pub mod harmonics;
pub mod modes;
pub mod central_decay;
pub mod residual;
pub mod solver;

pub use harmonics::{real_ylm, EigenTables, Family, FrameValue, Harmonic, ModeBasis, Parity, SphJet, SphereQuadrature};
pub use modes::{decompose, gbar_norm, BasisTable, CylinderTensorModes, FrameTensor};
pub use central_decay::{cylinder_grid, decay_study, evolve_modes, run_central_decay, BoundaryData, DecayReport, DeskWindow, CentralDecayOptions, CentralDecayReport};
pub use residual::{harmonic, lichnerowicz_residual, lie_derivative, lie_derivative_invariant_check, ChartWindow, CylinderField, LieReport, ResidualField, TestTensor, ZProfile};
pub use solver::{mode_evolve, ModeProblem, ModeScheme};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LichError {
    #[error("tensor is not symmetric at (θ, φ) = ({theta}, {phi}): defect {defect:e}")]
    NonSymmetric { theta: f64, phi: f64, defect: f64 },
    #[error("time grid reaches t = {t} ≥ 0")]
    TimeCrossesZero { t: f64 },
    #[error("explicit step dt = {dt} exceeds the stability limit {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("data violate the bound |h| ≤ {bound:e} (found {norm:e})")]
    HypothesisViolated { bound: f64, norm: f64 },
    #[error("stencil reaches θ = {theta}, too close to a chart pole")]
    ChartPole { theta: f64 },
    #[error("{family:?} eigenvalue {value} at l = {l} violates its lower bound")]
    EigenvalueBound { family: Family, l: usize, value: f64 },
    #[error("grid: {0}")]
    Grid(String),
    #[error("{0}")]
    Invalid(String),
}
