//! Pointwise geometry of rotationally symmetric metrics
//! `g̃ = u⁻¹ dr⊗dr + r² g_{S²}`.
//!
//! Every quantity is a function of `(r, u, u_r, u_rr)`. [`PointJet`] holds
//! that data at one radius; [`RadialProfile`] supplies it at grid nodes by
//! finite differences, and other modules supply it from exact derivatives.

use crate::numerics::fd::{fornberg_weights, Stencils};
use crate::numerics::interp::QuinticHermite;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("non-finite u at node {index}")]
    NonFinite { index: usize },
    #[error("node {index} sits at r = 0 but the profile is not tip-regularized")]
    TipWithoutFlag { index: usize },
    #[error("u = {value} ≤ 0 at node {index}")]
    NonPositiveU { index: usize, value: f64 },
    #[error("1 + u − r u_r/2 vanishes at node {index}")]
    DegenerateXi { index: usize },
    #[error("tip value u(0) = {value} differs from 1")]
    TipValue { value: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// `u` and its first two radial derivatives at radius `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointJet {
    pub r: f64,
    pub u: f64,
    pub u_r: f64,
    pub u_rr: f64,
}

/// Curvature data at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricPointData {
    /// Scalar curvature.
    pub r_curv: f64,
    /// Radial velocity `v`.
    pub v: f64,
    /// `R + u⁻¹ v²`.
    pub harnack_q: f64,
    /// Drift coefficient Ξ of the evolution equation of `R + u⁻¹v²`.
    pub xi: f64,
}

impl PointJet {
    pub fn new(r: f64, u: f64, u_r: f64, u_rr: f64) -> Self {
        PointJet { r, u, u_r, u_rr }
    }

    fn at_tip(&self) -> bool {
        self.r == 0.0
    }

    /// `R = 2r⁻²(1 − u − r u_r)`; at `r = 0` the regular limit `−3u_rr`.
    pub fn scalar_curvature(&self) -> f64 {
        if self.at_tip() {
            return -3.0 * self.u_rr;
        }
        2.0 / (self.r * self.r) * (1.0 - self.u - self.r * self.u_r)
    }

    /// `v = r⁻¹(1 − u − ½ r u_r)`, vanishing at the tip.
    pub fn velocity_v(&self) -> f64 {
        if self.at_tip() {
            return 0.0;
        }
        (1.0 - self.u - 0.5 * self.r * self.u_r) / self.r
    }

    /// `u_t = u u_rr − ½u_r² + r⁻²(1−u)(r u_r + 2u)`. At the tip the
    /// regular limit with `u(0) = 1`, `(1−u)/r² → −u_rr/2`, is used.
    pub fn pde_rhs(&self) -> f64 {
        let (r, u, ur, urr) = (self.r, self.u, self.u_r, self.u_rr);
        if self.at_tip() {
            return u * urr - 0.5 * ur * ur - 0.5 * urr * (2.0 * u);
        }
        u * urr - 0.5 * ur * ur + (1.0 - u) * (r * ur + 2.0 * u) / (r * r)
    }

    /// `R + u⁻¹v²` as a direct sum.
    pub fn harnack_quantity(&self) -> f64 {
        let v = self.velocity_v();
        self.scalar_curvature() + v * v / self.u
    }

    /// `r⁻²u⁻¹(1+u−½ru_r)² − 2r⁻²(1+u)`, the closed form of `R + u⁻¹v²`.
    pub fn harnack_closed_form(&self) -> f64 {
        if self.at_tip() {
            return -3.0 * self.u_rr;
        }
        let (r, u) = (self.r, self.u);
        let w = 1.0 + u - 0.5 * r * self.u_r;
        (w * w / u - 2.0 * (1.0 + u)) / (r * r)
    }

    /// Ξ with `u³∂_r(u⁻²w) = −2u_r w + u w_r` and `w = 1 + u − ½ r u_r`.
    pub fn xi_coefficient(&self) -> Option<f64> {
        if self.at_tip() {
            return Some(0.0);
        }
        let (r, u, ur, urr) = (self.r, self.u, self.u_r, self.u_rr);
        let w = 1.0 + u - 0.5 * r * ur;
        if w.abs() < 1e-300 {
            return None;
        }
        let w_r = 0.5 * ur - 0.5 * r * urr;
        let bracket = (1.0 - 0.5 * r * ur) * (1.0 - u - 0.5 * r * ur) / r - (-2.0 * ur * w + u * w_r);
        Some(bracket / w)
    }

    pub fn point_data(&self) -> Option<GeometricPointData> {
        Some(GeometricPointData {
            r_curv: self.scalar_curvature(),
            v: self.velocity_v(),
            harnack_q: self.harnack_quantity(),
            xi: self.xi_coefficient()?,
        })
    }
}

/// `u(r)` on a radial grid at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    r: Vec<f64>,
    u: Vec<f64>,
    t: f64,
    tip_included: bool,
    positive_curvature: bool,
}

/// Allowed deviation of `u(0)` from 1 on tip-regularized profiles.
pub const TIP_VALUE_TOL: f64 = 1e-9;

impl RadialProfile {
    /// Validates the grid (strictly increasing, nonnegative, ≥ 5 nodes),
    /// finiteness of `u`, and `u(0) = 1` when `r_grid[0] = 0` is a tip.
    pub fn new(r: Vec<f64>, u: Vec<f64>, t: f64, tip_included: bool) -> Result<Self, GeometryError> {
        if r.len() != u.len() {
            return Err(GeometryError::InvalidGrid("r and u lengths differ".into()));
        }
        if r.len() < 5 {
            return Err(GeometryError::InvalidGrid("fewer than five nodes".into()));
        }
        if r[0] < 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GeometryError::InvalidGrid("radii must be nonnegative and strictly increasing".into()));
        }
        if let Some(index) = u.iter().position(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite { index });
        }
        if tip_included {
            if r[0] != 0.0 {
                return Err(GeometryError::InvalidGrid("tip flag set but r[0] ≠ 0".into()));
            }
            if (u[0] - 1.0).abs() > TIP_VALUE_TOL {
                return Err(GeometryError::TipValue { value: u[0] });
            }
        }
        Ok(RadialProfile { r, u, t, tip_included, positive_curvature: false })
    }

    /// Sample `f` on the grid.
    pub fn from_fn(r: Vec<f64>, t: f64, tip_included: bool, f: impl Fn(f64) -> f64) -> Result<Self, GeometryError> {
        let u = r.iter().map(|&x| f(x)).collect();
        Self::new(r, u, t, tip_included)
    }

    /// Mark as positive-curvature data, which adds `u ≤ 1`, `u_r ≤ 0`,
    /// `v ≥ 0` to the checked invariants.
    pub fn flag_positive_curvature(mut self) -> Self {
        self.positive_curvature = true;
        self
    }

    pub fn is_positive_curvature(&self) -> bool {
        self.positive_curvature
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn tip_included(&self) -> bool {
        self.tip_included
    }

    /// Derivative stencils for the whole grid (with even extension at a tip).
    pub fn stencils(&self) -> Stencils {
        Stencils::new(&self.r, self.tip_included)
    }

    /// `(u_r, u_rr)` at node `i` from the five nearest nodes.
    pub fn derivatives(&self, i: usize) -> (f64, f64) {
        let n = self.r.len();
        let (xs, fs): (Vec<f64>, Vec<f64>) = if self.tip_included && i < 2 {
            (-2i64..=2)
                .map(|k| {
                    let j = i as i64 + k;
                    if j < 0 {
                        (-self.r[(-j) as usize], self.u[(-j) as usize])
                    } else {
                        (self.r[j as usize], self.u[j as usize])
                    }
                })
                .unzip()
        } else {
            let lo = i.saturating_sub(2).min(n - 5);
            (lo..lo + 5).map(|j| (self.r[j], self.u[j])).unzip()
        };
        let w = fornberg_weights(self.r[i], &xs, 2);
        let d1: f64 = w[1].iter().zip(&fs).map(|(a, b)| a * b).sum();
        let d2: f64 = w[2].iter().zip(&fs).map(|(a, b)| a * b).sum();
        if self.tip_included && i == 0 {
            (0.0, d2)
        } else {
            (d1, d2)
        }
    }

    /// Point data at an arbitrary radius from the five nearest nodes.
    pub fn sample(&self, r: f64) -> Result<PointJet, GeometryError> {
        let n = self.r.len();
        if !(r >= self.r[0] && r <= self.r[n - 1]) {
            return Err(GeometryError::InvalidGrid(format!("r = {r} outside the grid")));
        }
        let i = self.r.partition_point(|&x| x < r).min(n - 1);
        let (xs, fs): (Vec<f64>, Vec<f64>) = if self.tip_included && i < 3 {
            // mirrored nodes keep the stencil centered near the tip
            let mut pts: Vec<(f64, f64)> = (1..4).map(|j| (-self.r[j], self.u[j])).collect();
            pts.extend((0..5).map(|j| (self.r[j], self.u[j])));
            pts.sort_by(|a, b| (a.0 - r).abs().partial_cmp(&(b.0 - r).abs()).unwrap());
            pts.truncate(5);
            pts.into_iter().unzip()
        } else {
            let lo = i.saturating_sub(2).min(n - 5);
            (lo..lo + 5).map(|j| (self.r[j], self.u[j])).unzip()
        };
        let w = fornberg_weights(r, &xs, 2);
        let dot = |k: usize| w[k].iter().zip(&fs).map(|(a, b)| a * b).sum::<f64>();
        Ok(PointJet::new(r, dot(0), dot(1), dot(2)))
    }

    /// C² interpolant through the nodes using the stencil derivatives.
    pub fn interpolant(&self) -> QuinticHermite {
        let (d1, d2): (Vec<f64>, Vec<f64>) = (0..self.len()).map(|i| self.derivatives(i)).unzip();
        QuinticHermite::new(self.r.clone(), self.u.clone(), d1, d2)
    }

    /// Copy with new values on the same grid (tip and curvature flags kept).
    pub fn with_values(&self, u: Vec<f64>, t: f64) -> Result<Self, GeometryError> {
        let mut p = Self::new(self.r.clone(), u, t, self.tip_included)?;
        p.positive_curvature = self.positive_curvature;
        Ok(p)
    }

    /// Point data at node `i`.
    pub fn jet(&self, i: usize) -> Result<PointJet, GeometryError> {
        if !self.u[i].is_finite() {
            return Err(GeometryError::NonFinite { index: i });
        }
        if self.r[i] == 0.0 && !self.tip_included {
            return Err(GeometryError::TipWithoutFlag { index: i });
        }
        let (ur, urr) = self.derivatives(i);
        Ok(PointJet::new(self.r[i], self.u[i], ur, urr))
    }

    pub fn scalar_curvature(&self, i: usize) -> Result<f64, GeometryError> {
        Ok(self.jet(i)?.scalar_curvature())
    }

    pub fn velocity_v(&self, i: usize) -> Result<f64, GeometryError> {
        Ok(self.jet(i)?.velocity_v())
    }

    pub fn pde_rhs(&self, i: usize) -> Result<f64, GeometryError> {
        Ok(self.jet(i)?.pde_rhs())
    }

    pub fn harnack_quantity(&self, i: usize) -> Result<f64, GeometryError> {
        let p = self.jet(i)?;
        if p.u <= 0.0 {
            return Err(GeometryError::NonPositiveU { index: i, value: p.u });
        }
        Ok(p.harnack_quantity())
    }

    pub fn harnack_closed_form(&self, i: usize) -> Result<f64, GeometryError> {
        let p = self.jet(i)?;
        if p.u <= 0.0 {
            return Err(GeometryError::NonPositiveU { index: i, value: p.u });
        }
        Ok(p.harnack_closed_form())
    }

    pub fn xi_coefficient(&self, i: usize) -> Result<f64, GeometryError> {
        let p = self.jet(i)?;
        if p.u <= 0.0 {
            return Err(GeometryError::NonPositiveU { index: i, value: p.u });
        }
        p.xi_coefficient().ok_or(GeometryError::DegenerateXi { index: i })
    }

    pub fn point_data(&self, i: usize) -> Result<GeometricPointData, GeometryError> {
        let p = self.jet(i)?;
        if p.u <= 0.0 {
            return Err(GeometryError::NonPositiveU { index: i, value: p.u });
        }
        p.point_data().ok_or(GeometryError::DegenerateXi { index: i })
    }

    /// `pde_rhs` at every node.
    pub fn rhs_all(&self) -> Result<Vec<f64>, GeometryError> {
        (0..self.len()).map(|i| self.pde_rhs(i)).collect()
    }

    /// Largest deviation between the direct and closed forms of
    /// `R + u⁻¹v²` over nodes with `r > 0`.
    pub fn harnack_identity_defect(&self) -> Result<f64, GeometryError> {
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            let p = self.jet(i)?;
            if p.r == 0.0 {
                continue;
            }
            if p.u <= 0.0 {
                return Err(GeometryError::NonPositiveU { index: i, value: p.u });
            }
            worst = worst.max((p.harnack_quantity() - p.harnack_closed_form()).abs());
        }
        Ok(worst)
    }

    /// Residual of `(R + u⁻¹v²)_r = −(2/r)(1 + (r/2)u⁻¹v)u⁻¹u_t` at the
    /// nodes with `r > 0`; the left side is differentiated on the grid.
    pub fn gradient_identity_residuals(&self) -> Result<Vec<(f64, f64)>, GeometryError> {
        let q: Vec<f64> = (0..self.len()).map(|i| self.harnack_quantity(i)).collect::<Result<_, _>>()?;
        let st = self.stencils();
        let mut out = Vec::new();
        for i in 0..self.len() {
            let p = self.jet(i)?;
            if p.r == 0.0 {
                continue;
            }
            let (q_r, _) = st.derivs(&q, i);
            let v = p.velocity_v();
            let rhs = -(2.0 / p.r) * (1.0 + 0.5 * p.r * v / p.u) * p.pde_rhs() / p.u;
            out.push((p.r, q_r - rhs));
        }
        Ok(out)
    }

    /// Nodes violating `u ≤ 1`, `u_r ≤ 0` or `v ≥ 0` beyond `tol`.
    pub fn positive_curvature_violations(&self, tol: f64) -> Result<Vec<usize>, GeometryError> {
        let mut bad = Vec::new();
        for i in 0..self.len() {
            let p = self.jet(i)?;
            if p.u > 1.0 + tol || p.u_r > tol || p.velocity_v() < -tol {
                bad.push(i);
            }
        }
        Ok(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize, a: f64, b: f64) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn constant_profiles() {
        let p = RadialProfile::from_fn(uniform(21, 0.5, 2.5), 0.0, false, |_| 0.0).unwrap();
        let i = 5; // r = 1
        assert!((p.scalar_curvature(i).unwrap() - 2.0).abs() < 1e-12);
        let q = RadialProfile::from_fn(uniform(21, 0.5, 2.5), 0.0, false, |_| 0.5).unwrap();
        assert!((q.pde_rhs(i).unwrap() - 0.5).abs() < 1e-12);
        assert!((q.xi_coefficient(i).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let flat = RadialProfile::from_fn(uniform(21, 0.0, 2.0), 0.0, true, |_| 1.0).unwrap();
        for i in 0..21 {
            assert!(flat.pde_rhs(i).unwrap().abs() < 1e-12);
            assert!(flat.scalar_curvature(i).unwrap().abs() < 1e-10);
            assert!(flat.xi_coefficient(i).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn round_sphere_values() {
        let p = RadialProfile::from_fn(uniform(41, 0.0, 0.8), 0.0, true, |r| 1.0 - r * r).unwrap();
        let i = 25; // r = 0.5
        assert!((p.r()[i] - 0.5).abs() < 1e-15);
        assert!((p.scalar_curvature(i).unwrap() - 6.0).abs() < 1e-10);
        assert!((p.velocity_v(i).unwrap() - 1.0).abs() < 1e-10);
        assert!((p.harnack_quantity(i).unwrap() - 22.0 / 3.0).abs() < 1e-9);
        assert!((p.scalar_curvature(0).unwrap() - 6.0).abs() < 1e-10);
        assert_eq!(p.velocity_v(0).unwrap(), 0.0);
    }

    #[test]
    fn tip_without_flag_is_rejected() {
        let p = RadialProfile::from_fn(uniform(9, 0.0, 1.0), 0.0, false, |_| 1.0).unwrap();
        assert_eq!(p.pde_rhs(0), Err(GeometryError::TipWithoutFlag { index: 0 }));
        assert!(RadialProfile::from_fn(uniform(9, 0.0, 1.0), 0.0, true, |_| 0.9).is_err());
    }
}
