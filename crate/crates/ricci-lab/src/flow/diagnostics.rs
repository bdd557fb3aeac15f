//! Far-field diagnostics of `F·F_z` and `r²u` on neck-like profiles.

use super::arclength::compute_f;
use super::FlowError;
use crate::geometry::RadialProfile;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct FfzReport {
    pub z: Vec<f64>,
    /// `Q = F·F_z` at the nodes.
    pub q: Vec<f64>,
    /// Mean of `Q` over the far window, if flat there.
    pub plateau: Option<f64>,
    /// Relative spread of `Q` over the far window.
    pub spread: f64,
    /// Mean of `r²u` over the same window.
    pub r2u_plateau: f64,
    /// Far-field mean of `R + u⁻¹v²`, the level 𝓡.
    pub harnack_level: f64,
    /// Largest `R` on the profile.
    pub sup_r: f64,
    /// Largest `|(R + u⁻¹v²)_r|` relative to the level, nodes with `r > 0`.
    pub harnack_gradient: f64,
    /// Largest positive part of `(R + u⁻¹v²)_r`, unscaled.
    pub harnack_gradient_pos: f64,
}

impl FfzReport {
    /// `plateau·𝓡^{1/2}` and `r²u·𝓡`, both 1 when the estimates agree.
    pub fn consistency(&self) -> Option<(f64, f64)> {
        self.plateau.map(|p| (p * self.harnack_level.sqrt(), self.r2u_plateau * self.harnack_level))
    }
}

/// `window` is the far fraction of nodes used for plateau estimates;
/// a plateau is reported when its relative spread is below `flat_tol`.
pub fn diagnostics_ffz(profile: &RadialProfile, rbar: f64, window: f64, flat_tol: f64) -> Result<FfzReport, FlowError> {
    let arc = compute_f(profile, rbar)?;
    let q: Vec<f64> = arc.z.iter().map(|&z| {
        let (f, fz, _) = arc.eval3(z);
        f * fz
    }).collect();
    let n = q.len();
    let start = ((1.0 - window.clamp(0.0, 1.0)) * n as f64) as usize;
    let tail = &q[start.min(n - 1)..];
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let qm = mean(tail);
    let (qmin, qmax) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let spread = (qmax - qmin) / qm.abs();

    let r = profile.r();
    let m = r.len();
    let pstart = ((1.0 - window.clamp(0.0, 1.0)) * m as f64) as usize;
    let mut r2u = Vec::new();
    let mut level = Vec::new();
    let mut sup_r = f64::NEG_INFINITY;
    for i in 0..m {
        let jet = profile.jet(i)?;
        sup_r = sup_r.max(jet.scalar_curvature());
        if i >= pstart {
            r2u.push(jet.r * jet.r * jet.u);
            level.push(profile.harnack_quantity(i)?);
        }
    }
    let harnack_level = mean(&level);
    let hq: Vec<f64> = (0..m).map(|i| profile.harnack_quantity(i)).collect::<Result<_, _>>()?;
    let st = profile.stencils();
    let (mut grad, mut grad_pos) = (0.0f64, 0.0f64);
    for i in 0..m {
        if r[i] == 0.0 {
            continue;
        }
        let (d, _) = st.derivs(&hq, i);
        grad = grad.max((d * r[i]).abs() / harnack_level.abs());
        grad_pos = grad_pos.max(d);
    }
    Ok(FfzReport {
        z: arc.z.clone(),
        q,
        plateau: (spread <= flat_tol).then_some(qm),
        spread,
        r2u_plateau: mean(&r2u),
        harnack_level,
        sup_r,
        harnack_gradient: grad,
        harnack_gradient_pos: grad_pos,
    })
}
