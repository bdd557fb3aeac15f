//! Numerical laboratory for rotationally symmetric Ricci flow.
//!
//! The crate covers:
//! - radial warped-product geometry and its flow equation ([`geometry`]),
//! - the singular steady soliton ([`soliton`]),
//! - the barrier ψ_a and its inequalities ([`barrier`]),
//! - implicit evolution, comparison runs and arclength reparametrization ([`flow`]),
//! - Gaussian-weighted Hermite analysis of rescaled necks ([`hermite`]),
//! - the Lichnerowicz mode system on shrinking cylinders ([`lichnerowicz`]),
//! - the curvature-pinching matrix estimate ([`pinching`]),
//! - scenario configuration and reports behind the `ricci-lab` binary ([`cli`]).

pub mod geometry;
pub mod numerics;
pub mod soliton;
pub mod barrier;
pub mod flow;
pub mod hermite;
pub mod lichnerowicz;
pub mod pinching;
pub mod cli;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/soliton.md")]
    mod soliton {}
    #[doc = include_str!("../../../book/src/barrier.md")]
    mod barrier {}
    #[doc = include_str!("../../../book/src/flow.md")]
    mod flow {}
    #[doc = include_str!("../../../book/src/hermite.md")]
    mod hermite {}
    #[doc = include_str!("../../../book/src/lichnerowicz.md")]
    mod lichnerowicz {}
    #[doc = include_str!("../../../book/src/pinching.md")]
    mod pinching {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
