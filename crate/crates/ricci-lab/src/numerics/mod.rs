//! Shared numerical kernels: finite-difference weights, forward-mode jets,
//! Hermite interpolation, adaptive ODE integration, quadrature and small
//! linear algebra helpers.

pub mod fd;
pub mod fit;
pub mod interp;
pub mod jet;
pub mod linalg;
pub mod ode;
pub mod quad;
pub mod roots;
