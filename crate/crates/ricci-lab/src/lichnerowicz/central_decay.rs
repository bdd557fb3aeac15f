//! Asymptotics of bounded Lichnerowicz solutions on a long cylinder: the
//! solution is evolved mode by mode from data on the parabolic boundary,
//! and its distance from `ω̄ g + β̄ dz² + (−t)ψ g` is measured on a fixed
//! inner window.

use super::harmonics::{Family, ModeBasis, SphereQuadrature};
use super::modes::{gbar_norm, BasisTable, CylinderTensorModes, FrameTensor};
use super::solver::{mode_evolve, ModeProblem, ModeScheme};
use super::LichError;
use crate::numerics::fit::log_log_slope;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Mode coefficients on the parabolic boundary of `[−L/3, L/3] × [−L/2, −1]`.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub z: Vec<f64>,
    pub t: Vec<f64>,
    /// Per harmonic, over `z` at `t[0]`.
    pub initial: Vec<Vec<f64>>,
    /// Per harmonic, over `t` at `z[0]` and `z[last]`.
    pub left: Vec<Vec<f64>>,
    pub right: Vec<Vec<f64>>,
}

/// Uniform `z` nodes on `[−L/3, L/3]` (odd count, so `z = 0` is a node) and
/// times from `−L/2` to `−1` with steps `min(dt_max, dt_rel·(−t))`.
pub fn cylinder_grid(l: f64, dz: f64, dt_max: f64, dt_rel: f64) -> (Vec<f64>, Vec<f64>) {
    let half = l / 3.0;
    let mut n = (2.0 * half / dz).ceil() as usize + 1;
    if n % 2 == 0 {
        n += 1;
    }
    let z = (0..n).map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64).collect();
    let mut t = vec![-l / 2.0];
    while *t.last().unwrap() < -1.0 {
        let tc = *t.last().unwrap();
        let step = dt_max.min(dt_rel * (-tc));
        let next = if tc + 1.5 * step >= -1.0 { -1.0 } else { tc + step };
        t.push(next);
    }
    (z, t)
}

/// `(−t)^p` with `p = 1, 1, ½, 0` for ω, χ, σ, β: the growth the bound
/// `|h|_{ḡ} ≤ 1` allows for each family.
fn family_weight(family: Family, t: f64) -> f64 {
    match family {
        Family::Omega | Family::Chi => -t,
        Family::Sigma => (-t).sqrt(),
        Family::Beta => 1.0,
    }
}

impl BoundaryData {
    pub fn zeros(n_harmonics: usize, z: Vec<f64>, t: Vec<f64>) -> Self {
        let (nz, nt) = (z.len(), t.len());
        BoundaryData { initial: vec![vec![0.0; nz]; n_harmonics], left: vec![vec![0.0; nt]; n_harmonics], right: vec![vec![0.0; nt]; n_harmonics], z, t }
    }

    /// Data of the exact solution `h = (−t)(q₁Y₁₋₁ + q₂Y₁₀ + q₃Y₁₁) g_{S²}`.
    pub fn neutral(basis: &ModeBasis, q: [f64; 3], z: Vec<f64>, t: Vec<f64>) -> Self {
        let mut d = Self::zeros(basis.len(), z, t);
        for (j, m) in [-1, 0, 1].into_iter().enumerate() {
            let k = basis.index_of(Family::Omega, 1, m, super::harmonics::Parity::Even).expect("basis has l = 1");
            d.initial[k].iter_mut().for_each(|v| *v = -d.t[0] * q[j]);
            for (n, &tt) in d.t.iter().enumerate() {
                d.left[k][n] = -tt * q[j];
                d.right[k][n] = -tt * q[j];
            }
        }
        d
    }

    /// Random smooth data for all harmonics of degree `≤ l_data`, scaled so
    /// that `|h|_{ḡ} ≤ 1` on the sampled parabolic boundary.
    ///
    /// Each coefficient is `(−t)^p · a · (b₀ + b₁ cos(πz/L + φ)) · g(t)` with
    /// `g(t₀) = 1`, so the data vary on the scale of the cylinder.
    pub fn random(basis: &ModeBasis, l_data: usize, seed: u64, z: Vec<f64>, t: Vec<f64>, check: &SphereQuadrature) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = -2.0 * t[0];
        let mut d = Self::zeros(basis.len(), z, t);
        let t0 = d.t[0];
        for (k, h) in basis.harmonics.iter().enumerate() {
            let (a, b0, b1, ph, nu, eps) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.5..3.0), rng.gen_range(0.0..0.5));
            if h.l > l_data {
                continue;
            }
            let prof = |zz: f64| a * (b0 + b1 * (std::f64::consts::PI * zz / l + ph).cos());
            let g = |tt: f64| 1.0 + eps * (nu * (tt / t0).ln()).sin();
            for (i, &zz) in d.z.iter().enumerate() {
                d.initial[k][i] = family_weight(h.family, t0) * prof(zz);
            }
            let (zl, zr) = (d.z[0], *d.z.last().unwrap());
            for (n, &tt) in d.t.iter().enumerate() {
                d.left[k][n] = family_weight(h.family, tt) * prof(zl) * g(tt);
                d.right[k][n] = family_weight(h.family, tt) * prof(zr) * g(tt);
            }
        }
        let (early, late) = d.boundary_sup(basis, check, f64::INFINITY);
        let s = 0.999 / early.max(late);
        for v in d.initial.iter_mut().chain(d.left.iter_mut()).chain(d.right.iter_mut()) {
            v.iter_mut().for_each(|x| *x *= s);
        }
        d
    }

    /// `sup |h|_{ḡ}` on the sampled boundary for `t ≤ t_split` and after.
    pub fn boundary_sup(&self, basis: &ModeBasis, q: &SphereQuadrature, t_split: f64) -> (f64, f64) {
        let table = BasisTable::new(basis, q);
        let sup_over = |coef: &dyn Fn(usize) -> f64, t: f64| (0..table.points.len()).map(|k| gbar_norm(&table.assemble_at(basis, coef, k), t)).fold(0.0, f64::max);
        let (mut early, mut late) = (0.0f64, 0.0f64);
        let t0 = self.t[0];
        for iz in 0..self.z.len() {
            early = early.max(sup_over(&|k| self.initial[k][iz], t0));
        }
        for (n, &tt) in self.t.iter().enumerate() {
            let s = sup_over(&|k| self.left[k][n], tt).max(sup_over(&|k| self.right[k][n], tt));
            if tt <= t_split {
                early = early.max(s);
            } else {
                late = late.max(s);
            }
        }
        (early, late)
    }
}

/// Evolve every harmonic independently (in parallel).
pub fn evolve_modes(basis: &ModeBasis, data: &BoundaryData, scheme: ModeScheme) -> Result<CylinderTensorModes, LichError> {
    let coeffs: Result<Vec<Vec<f64>>, LichError> = basis
        .harmonics
        .par_iter()
        .enumerate()
        .map(|(k, h)| {
            let p = ModeProblem { kappa: h.damping(), z: &data.z, t: &data.t, initial: &data.initial[k], left: &data.left[k], right: &data.right[k] };
            mode_evolve(&p, scheme)
        })
        .collect();
    Ok(CylinderTensorModes { basis: basis.clone(), z: data.z.clone(), t: data.t.clone(), coeffs: coeffs?, l_scale: Some(-2.0 * data.t[0]) })
}

/// Fixed inner window where the asymptotics are measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeskWindow {
    pub z_half: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    /// Number of `z` samples in the window.
    pub z_samples: usize,
}

impl Default for DeskWindow {
    fn default() -> Self {
        DeskWindow { z_half: 8.0, t_lo: -8.0, t_hi: -1.0, z_samples: 17 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralDecayOptions {
    pub dz: f64,
    pub dt_max: f64,
    pub dt_rel: f64,
    pub window: DeskWindow,
    /// `ψ` is fitted from `ω̂_j(0, t)` averaged over this time range.
    pub psi_range: (f64, f64),
    /// Sphere sample grid `(n_θ, n_φ)` for sup norms.
    pub sphere: (usize, usize),
    pub scheme: ModeScheme,
}

impl Default for CentralDecayOptions {
    fn default() -> Self {
        CentralDecayOptions { dz: 0.25, dt_max: 1.0, dt_rel: 0.05, window: DeskWindow::default(), psi_range: (-10.0, -1.0), sphere: (12, 24), scheme: ModeScheme::Substituted }
    }
}

/// Window suprema of the pieces of `h − ω̄g − β̄dz² − (−t)ψg`, in `|·|_{ḡ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralDecayReport {
    pub l: f64,
    /// Coefficients of `ψ` on `(Y₁₋₁, Y₁₀, Y₁₁)`.
    pub psi: [f64; 3],
    pub total: f64,
    pub omega: f64,
    pub chi: f64,
    pub sigma: f64,
    pub beta: f64,
    /// Largest `|∫_{S²}(ω − ω̄)|` or `|∫_{S²}(β − β̄)|` over the window.
    pub averaging_defect: f64,
    /// Boundary suprema for `t ≤ −L/4` and `t > −L/4`.
    pub boundary_early: f64,
    pub boundary_late: f64,
    pub nz: usize,
    pub nt: usize,
}

fn window_indices(grid: &[f64], lo: f64, hi: f64) -> Vec<usize> {
    grid.iter().enumerate().filter(|(_, &v)| v >= lo - 1e-12 && v <= hi + 1e-12).map(|(i, _)| i).collect()
}

/// Trapezoid average of `f(t_i)` over the nodes in `[lo, hi]`.
fn time_average(t: &[f64], f: impl Fn(usize) -> f64, lo: f64, hi: f64) -> f64 {
    let idx = window_indices(t, lo, hi);
    if idx.len() == 1 {
        return f(idx[0]);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for w in idx.windows(2) {
        let dt = t[w[1]] - t[w[0]];
        num += 0.5 * dt * (f(w[0]) + f(w[1]));
        den += dt;
    }
    num / den
}

/// Check the hypotheses, evolve, extract `ψ` and measure the window.
pub fn run_central_decay(basis: &ModeBasis, data: &BoundaryData, opts: &CentralDecayOptions) -> Result<CentralDecayReport, LichError> {
    let l = -2.0 * data.t[0];
    let sphere = SphereQuadrature::new(opts.sphere.0, opts.sphere.1);
    let (early, late) = data.boundary_sup(basis, &sphere, -l / 4.0);
    if early > 1.0 + 1e-9 {
        return Err(LichError::HypothesisViolated { bound: 1.0, norm: early });
    }
    if late > l.powi(101) {
        return Err(LichError::HypothesisViolated { bound: l.powi(101), norm: late });
    }
    let modes = evolve_modes(basis, data, opts.scheme)?;
    let nz = modes.nz();
    let iz0 = nz / 2;
    let omega1: Vec<usize> = [-1, 0, 1].iter().map(|&m| basis.index_of(Family::Omega, 1, m, super::harmonics::Parity::Even).ok_or_else(|| LichError::Invalid("basis needs l ≥ 1".into()))).collect::<Result<_, _>>()?;
    let mut psi = [0.0; 3];
    for (j, &k) in omega1.iter().enumerate() {
        psi[j] = time_average(&modes.t, |it| modes.coefficient(k, iz0, it) / -modes.t[it], opts.psi_range.0, opts.psi_range.1);
    }
    let zi = window_indices(&modes.z, -opts.window.z_half, opts.window.z_half);
    let stride = (zi.len() / opts.window.z_samples.max(2)).max(1);
    let zi: Vec<usize> = zi.into_iter().step_by(stride).collect();
    let ti = window_indices(&modes.t, opts.window.t_lo, opts.window.t_hi);
    if zi.is_empty() || ti.is_empty() {
        return Err(LichError::Grid("inner window contains no grid points".into()));
    }
    let table = BasisTable::new(basis, &sphere);
    let quad = BasisTable::new(basis, &SphereQuadrature::for_degree(basis.l_max));
    let is_mean = |k: usize| basis.harmonics[k].l == 0 && matches!(basis.harmonics[k].family, Family::Omega | Family::Beta);
    let mut rep = CentralDecayReport { l, psi, total: 0.0, omega: 0.0, chi: 0.0, sigma: 0.0, beta: 0.0, averaging_defect: 0.0, boundary_early: early, boundary_late: late, nz, nt: modes.t.len() };
    let rows: Vec<[f64; 6]> = ti
        .par_iter()
        .flat_map_iter(|&it| zi.iter().map(move |&iz| (it, iz)))
        .map(|(it, iz)| {
            let t = modes.t[it];
            let coef = |k: usize| {
                if is_mean(k) {
                    return 0.0;
                }
                let c = modes.coefficient(k, iz, it);
                match omega1.iter().position(|&o| o == k) {
                    Some(j) => c - (-t) * psi[j],
                    None => c,
                }
            };
            let only = |fam: Family| move |k: usize| if basis.harmonics[k].family == fam { coef(k) } else { 0.0 };
            let mut out = [0.0f64; 6];
            for p in 0..table.points.len() {
                let h: FrameTensor = table.assemble_at(basis, coef, p);
                out[0] = out[0].max(gbar_norm(&h, t));
                for (slot, fam) in [(1, Family::Omega), (2, Family::Chi), (3, Family::Sigma), (4, Family::Beta)] {
                    out[slot] = out[slot].max(gbar_norm(&table.assemble_at(basis, only(fam), p), t));
                }
            }
            // ∫(ω − ω̄) and ∫(β − β̄) by exact quadrature
            for fam in [Family::Omega, Family::Beta] {
                let mut s = 0.0;
                for p in 0..quad.points.len() {
                    let h = quad.assemble_at(basis, |k| if basis.harmonics[k].family == fam && !is_mean(k) { modes.coefficient(k, iz, it) } else { 0.0 }, p);
                    let v = if fam == Family::Omega { 0.5 * (h[0][0] + h[1][1]) } else { h[2][2] };
                    s += quad.points[p].2 * v;
                }
                out[5] = out[5].max(s.abs());
            }
            out
        })
        .collect();
    for r in rows {
        rep.total = rep.total.max(r[0]);
        rep.omega = rep.omega.max(r[1]);
        rep.chi = rep.chi.max(r[2]);
        rep.sigma = rep.sigma.max(r[3]);
        rep.beta = rep.beta.max(r[4]);
        rep.averaging_defect = rep.averaging_defect.max(r[5]);
    }
    Ok(rep)
}

/// Window suprema across cylinder lengths and their fitted power laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub ls: Vec<f64>,
    pub reports: Vec<CentralDecayReport>,
    pub chi_exponent: f64,
    pub sigma_exponent: f64,
    pub beta_exponent: f64,
    pub omega_exponent: f64,
    pub total_exponent: f64,
}

/// Run [`run_central_decay`] on random bounded data for each `L` and fit
/// `sup ∝ L^p` for every piece.
pub fn decay_study(basis: &ModeBasis, ls: &[f64], l_data: usize, seed: u64, opts: &CentralDecayOptions) -> Result<DecayReport, LichError> {
    let check = SphereQuadrature::new(opts.sphere.0, opts.sphere.1);
    let mut reports = Vec::new();
    for &l in ls {
        let (z, t) = cylinder_grid(l, opts.dz, opts.dt_max, opts.dt_rel);
        let data = BoundaryData::random(basis, l_data, seed, z, t, &check);
        reports.push(run_central_decay(basis, &data, opts)?);
    }
    let fit = |f: fn(&CentralDecayReport) -> f64| log_log_slope(ls, &reports.iter().map(f).collect::<Vec<_>>());
    Ok(DecayReport {
        ls: ls.to_vec(),
        chi_exponent: fit(|r| r.chi),
        sigma_exponent: fit(|r| r.sigma),
        beta_exponent: fit(|r| r.beta),
        omega_exponent: fit(|r| r.omega),
        total_exponent: fit(|r| r.total),
        reports,
    })
}
