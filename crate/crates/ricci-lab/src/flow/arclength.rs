//! Arclength description `F(z, t)`: the radius at signed distance `z`
//! from the sphere of radius `r̄(t)`, and its rescaling `G(ξ, τ)`.

use super::{FlowError, FlowTrajectory};
use crate::geometry::RadialProfile;
use crate::numerics::fd::fornberg_weights;
use crate::numerics::interp::QuinticHermite;
use crate::numerics::quad::GaussLegendre;
use serde::Serialize;
use std::f64::consts::SQRT_2;

/// Nodes with `u` at or below this value end the arclength range.
pub const U_FLOOR: f64 = 1e-14;

const GL_ORDER: usize = 8;

#[derive(Debug, Clone)]
pub struct ArclengthProfile {
    /// `z` at the radial nodes (and at `r̄` when it is not a node).
    pub z: Vec<f64>,
    /// `F = r` at those points.
    pub f: Vec<f64>,
    pub rbar: f64,
    /// `F_z(0) = u(r̄)^{1/2}`.
    pub fz0: f64,
    pub t: f64,
    /// Set when nodes with `u ≤ U_FLOOR` were dropped.
    pub truncated: bool,
    spline: QuinticHermite,
    u_of_r: QuinticHermite,
}

/// Largest deviations from `F_z = u(F)^{1/2}` and `F_zz = ½u_r(F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityDefects {
    pub fz: f64,
    pub fzz: f64,
}

impl IdentityDefects {
    pub fn max(&self) -> f64 {
        self.fz.max(self.fzz)
    }
}

fn cumulative_integral(x: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
    let gl = GaussLegendre::new(GL_ORDER);
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in x.windows(2) {
        acc += gl.integrate(&f, w[0], w[1]);
        out.push(acc);
    }
    out
}

/// `F(·, t)` for one profile with reference radius `rbar`.
pub fn compute_f(profile: &RadialProfile, rbar: f64) -> Result<ArclengthProfile, FlowError> {
    let r = profile.r();
    let u = profile.u();
    let n = r.len();
    if !(rbar >= r[0] && rbar <= r[n - 1]) {
        return Err(FlowError::MarkedRadius { rbar });
    }
    // maximal run of nodes with u above the floor around r̄
    let k = r.partition_point(|&x| x < rbar).min(n - 1);
    let ok = |i: usize| u[i] > U_FLOOR;
    if !ok(k) || (r[k] > rbar && k > 0 && !ok(k - 1)) {
        return Err(FlowError::ArclengthDiverges { r: rbar, u: u[k] });
    }
    let mut lo = k;
    while lo > 0 && ok(lo - 1) {
        lo -= 1;
    }
    let mut hi = k;
    while hi + 1 < n && ok(hi + 1) {
        hi += 1;
    }
    if hi - lo + 1 < 5 {
        return Err(FlowError::ArclengthDiverges { r: rbar, u: u[k] });
    }
    let truncated = lo > 0 || hi < n - 1;
    let interp = profile.interpolant();

    let mut rs: Vec<f64> = r[lo..=hi].to_vec();
    let on_node = rs.iter().any(|&x| (x - rbar).abs() <= 1e-14 * rbar.abs().max(1e-300));
    if !on_node {
        let at = rs.partition_point(|&x| x < rbar);
        rs.insert(at, rbar);
    }
    let c = rs.iter().position(|&x| (x - rbar).abs() <= 1e-14 * rbar.abs().max(1e-300)).expect("r̄ is a node");
    let inv_sqrt = |x: f64| interp.eval(x).powf(-0.5);
    let cum = cumulative_integral(&rs, inv_sqrt);
    let z: Vec<f64> = cum.iter().map(|v| v - cum[c]).collect();
    let (mut fz, mut fzz) = (Vec::with_capacity(rs.len()), Vec::with_capacity(rs.len()));
    for &x in &rs {
        let (uu, ur, _) = interp.eval3(x);
        fz.push(uu.sqrt());
        fzz.push(0.5 * ur);
    }
    let fz0 = fz[c];
    let spline = QuinticHermite::new(z.clone(), rs.clone(), fz, fzz);
    Ok(ArclengthProfile { z, f: rs, rbar, fz0, t: profile.t(), truncated, spline, u_of_r: interp })
}

impl ArclengthProfile {
    pub fn z_min(&self) -> f64 {
        self.z[0]
    }

    pub fn z_max(&self) -> f64 {
        *self.z.last().unwrap()
    }

    /// `(F, F_z, F_zz)` at `z`.
    pub fn eval3(&self, z: f64) -> (f64, f64, f64) {
        self.spline.eval3(z)
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.spline.eval(z)
    }

    /// `u` at radius `r` from the profile interpolant.
    pub fn u_at(&self, r: f64) -> (f64, f64, f64) {
        self.u_of_r.eval3(r)
    }

    /// Panel breaks on `[a, b]`: the radial nodes, with panels wider than
    /// a factor 3/2 split geometrically so `r⁻²` stays resolved near `r = 0`.
    fn breaks(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a];
        pts.extend(self.f.iter().copied().filter(|&x| x > a && x < b));
        pts.push(b);
        let mut out = vec![a];
        for w in pts.windows(2) {
            let mut x = w[0];
            while x > 0.0 && w[1] > 1.5 * x {
                x *= 1.5;
                out.push(x);
            }
            out.push(w[1]);
        }
        out
    }

    /// `z(ρ) = ∫_{r̄}^ρ u^{-1/2} dr`.
    pub fn z_of(&self, rho: f64) -> f64 {
        let gl = GaussLegendre::new(GL_ORDER);
        let (a, b, sign) = if rho >= self.rbar { (self.rbar, rho, 1.0) } else { (rho, self.rbar, -1.0) };
        sign * gl.integrate_panels(|x| self.u_of_r.eval(x).powf(-0.5), &self.breaks(a, b))
    }

    /// `∫_{r̄}^{F(z)} r⁻² u^{1/2} dr`.
    pub fn curvature_integral(&self, z: f64) -> f64 {
        let rho = self.eval(z);
        let gl = GaussLegendre::new(GL_ORDER);
        let (a, b, sign) = if rho >= self.rbar { (self.rbar, rho, 1.0) } else { (rho, self.rbar, -1.0) };
        sign * gl.integrate_panels(|x| self.u_of_r.eval(x).sqrt() / (x * x), &self.breaks(a, b))
    }

    /// `−F_zz + F⁻¹(1+F_z²) + 2F_z[−F(0)⁻¹F_z(0) + ∫_{F(0)}^{F(z)} r⁻²u^{1/2} dr]`,
    /// so that the evolution equation reads `F_t + spatial_operator = 0`.
    pub fn spatial_operator(&self, z: f64) -> f64 {
        let (f, fz, fzz) = self.eval3(z);
        -fzz + (1.0 + fz * fz) / f + 2.0 * fz * (-self.fz0 / self.rbar + self.curvature_integral(z))
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.f.windows(2).all(|w| w[1] > w[0])
    }

    /// Defects of the two identities. Derivatives of `F` come from
    /// seven-point differences of the `(z, F)` nodes, so the check exercises
    /// the arclength quadrature rather than the spline construction.
    pub fn identity_defects(&self) -> IdentityDefects {
        let n = self.z.len();
        let mut d = IdentityDefects { fz: 0.0, fzz: 0.0 };
        let m = n.min(7);
        for i in 0..n {
            let lo = i.saturating_sub(m / 2).min(n - m);
            let w = fornberg_weights(self.z[i], &self.z[lo..lo + m], 2);
            let fz: f64 = w[1].iter().zip(&self.f[lo..lo + m]).map(|(a, b)| a * b).sum();
            let fzz: f64 = w[2].iter().zip(&self.f[lo..lo + m]).map(|(a, b)| a * b).sum();
            let (u, ur, _) = self.u_of_r.eval3(self.f[i]);
            d.fz = d.fz.max((fz - u.sqrt()).abs());
            d.fzz = d.fzz.max((fzz - 0.5 * ur).abs());
        }
        d
    }

    /// Same identities at interval midpoints, through the spline.
    pub fn midpoint_defects(&self) -> IdentityDefects {
        let mut d = IdentityDefects { fz: 0.0, fzz: 0.0 };
        for w in self.z.windows(2) {
            let (f, fz, fzz) = self.eval3(0.5 * (w[0] + w[1]));
            let (u, ur, _) = self.u_of_r.eval3(f);
            d.fz = d.fz.max((fz - u.sqrt()).abs());
            d.fzz = d.fzz.max((fzz - 0.5 * ur).abs());
        }
        d
    }
}

/// Pointwise residual of the evolution equation of `F` at one time.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualField {
    pub t: f64,
    pub z: Vec<f64>,
    pub residual: Vec<f64>,
    pub sup: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FResidual {
    pub fields: Vec<ResidualField>,
    pub sup: f64,
}

/// Residual of `F_t + (spatial operator) = 0` at every interior snapshot,
/// on `nz` equispaced points of the `z`-range shared by the three
/// snapshots involved (shrunk by `margin` at each end). `F_t` is the
/// three-point difference at fixed `z`.
pub fn residual_f(traj: &FlowTrajectory, rbar: &[f64], nz: usize, margin: f64) -> Result<FResidual, FlowError> {
    let m = traj.snapshots.len();
    if m < 3 {
        return Err(FlowError::InsufficientSnapshots { need: 3, got: m });
    }
    if rbar.len() != m {
        return Err(FlowError::Invalid(format!("{} marked radii for {m} snapshots", rbar.len())));
    }
    let profiles: Vec<ArclengthProfile> = traj.snapshots.iter().zip(rbar).map(|(p, &rb)| compute_f(p, rb)).collect::<Result<_, _>>()?;
    let mut fields = Vec::with_capacity(m - 2);
    for k in 1..m - 1 {
        let (p0, p1, p2) = (&profiles[k - 1], &profiles[k], &profiles[k + 1]);
        let lo = p0.z_min().max(p1.z_min()).max(p2.z_min()) + margin;
        let hi = p0.z_max().min(p1.z_max()).min(p2.z_max()) - margin;
        if !(hi > lo) {
            return Err(FlowError::Invalid(format!("no common z-range at t = {}", p1.t)));
        }
        let w = fornberg_weights(p1.t, &[p0.t, p1.t, p2.t], 1);
        let z: Vec<f64> = (0..nz).map(|i| lo + (hi - lo) * i as f64 / (nz - 1).max(1) as f64).collect();
        let residual: Vec<f64> = z
            .iter()
            .map(|&zz| {
                let ft = w[1][0] * p0.eval(zz) + w[1][1] * p1.eval(zz) + w[1][2] * p2.eval(zz);
                ft + p1.spatial_operator(zz)
            })
            .collect();
        let sup = residual.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        fields.push(ResidualField { t: p1.t, z, residual, sup });
    }
    let sup = fields.iter().fold(0.0f64, |a, f| a.max(f.sup));
    Ok(FResidual { fields, sup })
}

/// `G(ξ, τ) = F/√(−t) − √2` with `ξ = z/√(−t)`, `τ = −ln(−t)`.
#[derive(Debug, Clone, Serialize)]
pub struct RescaledProfile {
    pub xi: Vec<f64>,
    pub g: Vec<f64>,
    /// `G_ξ = F_z`.
    pub g_xi: Vec<f64>,
    /// `G_ξξ = √(−t) F_zz`.
    pub g_xixi: Vec<f64>,
    pub tau: f64,
}

impl RescaledProfile {
    /// Points where `G_ξ > 0` or `G_ξξ ≤ 0` fails by more than `tol`.
    pub fn shape_violations(&self, tol: f64) -> Vec<usize> {
        (0..self.xi.len()).filter(|&i| self.g_xi[i] <= -tol || self.g_xixi[i] > tol).collect()
    }
}

/// Rescale an arclength profile; the change of variables is applied
/// exactly at the nodes.
pub fn rescale_g(a: &ArclengthProfile) -> Result<RescaledProfile, FlowError> {
    rescale_samples(a.t, a.z.iter().map(|&z| {
        let (f, fz, fzz) = a.eval3(z);
        (z, f, fz, fzz)
    }))
}

/// Rescale samples `(z, F, F_z, F_zz)` taken at time `t`.
pub fn rescale_samples(t: f64, samples: impl IntoIterator<Item = (f64, f64, f64, f64)>) -> Result<RescaledProfile, FlowError> {
    if !(t < 0.0) {
        return Err(FlowError::NonNegativeTime { t });
    }
    let q = (-t).sqrt();
    let mut out = RescaledProfile { xi: Vec::new(), g: Vec::new(), g_xi: Vec::new(), g_xixi: Vec::new(), tau: -(-t).ln() };
    for (z, f, fz, fzz) in samples {
        out.xi.push(z / q);
        out.g.push(f / q - SQRT_2);
        out.g_xi.push(fz);
        out.g_xixi.push(q * fzz);
    }
    Ok(out)
}
