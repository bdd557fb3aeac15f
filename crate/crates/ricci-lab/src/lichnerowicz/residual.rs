//! Independent checks of the mode system: the Lichnerowicz Laplacian of an
//! assembled tensor by finite differences in the chart `(θ, φ, z)`, and Lie
//! derivatives of the cylinder metric along explicit vector fields.

use super::harmonics::{Family, Harmonic, ModeBasis, SphereQuadrature};
use super::modes::{accumulate, decompose, gbar_norm, BasisTable, FrameTensor};
use super::central_decay::{evolve_modes, BoundaryData};
use super::solver::ModeScheme;
use super::LichError;
use serde::{Deserialize, Serialize};

type Mat3 = [[f64; 3]; 3];

/// `amp · cos(k z + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZProfile {
    pub amp: f64,
    pub k: f64,
    pub phase: f64,
}

impl ZProfile {
    pub fn constant(amp: f64) -> Self {
        ZProfile { amp, k: 0.0, phase: 0.0 }
    }

    pub fn value(&self, z: f64) -> f64 {
        self.amp * (self.k * z + self.phase).cos()
    }

    pub fn second(&self, z: f64) -> f64 {
        -self.k * self.k * self.value(z)
    }
}

/// `h = Σ c_i(z) e_i` with explicit `z`-profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct TestTensor {
    pub terms: Vec<(Harmonic, ZProfile)>,
}

impl TestTensor {
    fn frame_with(&self, theta: f64, phi: f64, coef: impl Fn(&Harmonic, &ZProfile) -> f64) -> FrameTensor {
        let mut h = [[0.0; 3]; 3];
        for (harm, prof) in &self.terms {
            accumulate(&mut h, harm.family, &harm.frame_value(theta, phi), coef(harm, prof));
        }
        h
    }

    pub fn frame(&self, theta: f64, phi: f64, z: f64) -> FrameTensor {
        self.frame_with(theta, phi, |_, p| p.value(z))
    }

    /// The right-hand side of the mode system, `Σ (c_i'' − κ_i c_i/(−2t)) e_i`.
    pub fn mode_operator(&self, theta: f64, phi: f64, z: f64, t: f64) -> FrameTensor {
        self.frame_with(theta, phi, |h, p| p.second(z) - h.damping() * p.value(z) / (-2.0 * t))
    }
}

/// `E = diag(1, sin θ, 1)` maps frame to chart components: `h_ij = H_ij E_i E_j`.
fn frame_scale(theta: f64) -> [f64; 3] {
    [1.0, theta.sin(), 1.0]
}

fn to_chart(h: &FrameTensor, theta: f64) -> Mat3 {
    let e = frame_scale(theta);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = h[i][j] * e[i] * e[j];
        }
    }
    out
}

fn to_frame(h: &Mat3, theta: f64) -> FrameTensor {
    let e = frame_scale(theta);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = h[i][j] / (e[i] * e[j]);
        }
    }
    out
}

/// Christoffel symbols `Γ^m_{ab}` of `ḡ(t)` (independent of `t`).
fn christoffel(theta: f64) -> [[[f64; 3]; 3]; 3] {
    let (s, c) = theta.sin_cos();
    let mut g = [[[0.0; 3]; 3]; 3];
    g[0][1][1] = -s * c;
    g[1][0][1] = c / s;
    g[1][1][0] = c / s;
    g
}

/// Sample points of a chart window `θ × φ × z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartWindow {
    pub theta: (f64, f64),
    pub phi: (f64, f64),
    pub z: (f64, f64),
    pub n: [usize; 3],
    /// Smallest `sin θ` any stencil point may reach.
    pub pole_margin: f64,
}

impl Default for ChartWindow {
    fn default() -> Self {
        ChartWindow { theta: (0.6, 2.5), phi: (0.0, 6.0), z: (-1.0, 1.0), n: [5, 6, 3], pole_margin: 0.2 }
    }
}

impl ChartWindow {
    fn points(&self) -> Vec<[f64; 3]> {
        let lin = |(a, b): (f64, f64), n: usize, i: usize| if n == 1 { 0.5 * (a + b) } else { a + (b - a) * i as f64 / (n - 1) as f64 };
        let mut out = Vec::new();
        for i in 0..self.n[0] {
            for j in 0..self.n[1] {
                for k in 0..self.n[2] {
                    out.push([lin(self.theta, self.n[0], i), lin(self.phi, self.n[1], j), lin(self.z, self.n[2], k)]);
                }
            }
        }
        out
    }
}

/// Pointwise `|Δ_L h − (mode right-hand side)|_{ḡ}` on a chart window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualField {
    pub points: Vec<[f64; 3]>,
    pub residual: Vec<f64>,
    pub sup: f64,
    /// `sup |mode right-hand side|_{ḡ}`, for scale.
    pub scale: f64,
}

impl ResidualField {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["theta", "phi", "z", "residual"]).unwrap();
        for (p, r) in self.points.iter().zip(&self.residual) {
            w.write_record([p[0].to_string(), p[1].to_string(), p[2].to_string(), format!("{r:e}")]).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// `Δ_L h = Δh + 2R_{ijkl}h^{jl} − Ric_i^l h_{kl} − Ric_k^l h_{il}` on
/// `ḡ(t)` by nested central differences with step `eta`, compared with the
/// mode-system right-hand side.
pub fn lichnerowicz_residual(tensor: &TestTensor, t: f64, window: &ChartWindow, eta: f64) -> Result<ResidualField, LichError> {
    let a = -2.0 * t;
    let chart = |x: [f64; 3]| to_chart(&tensor.frame(x[0], x[1], x[2]), x[0]);
    let shift = |x: [f64; 3], d: usize, s: f64| {
        let mut y = x;
        y[d] += s;
        y
    };
    // ∇_b h_ik at x
    let nabla = |x: [f64; 3]| -> [Mat3; 3] {
        let gam = christoffel(x[0]);
        let h = chart(x);
        let mut out = [[[0.0; 3]; 3]; 3];
        for b in 0..3 {
            let (hp, hm) = (chart(shift(x, b, eta)), chart(shift(x, b, -eta)));
            for i in 0..3 {
                for k in 0..3 {
                    let mut v = (hp[i][k] - hm[i][k]) / (2.0 * eta);
                    for m in 0..3 {
                        v -= gam[m][b][i] * h[m][k] + gam[m][b][k] * h[i][m];
                    }
                    out[b][i][k] = v;
                }
            }
        }
        out
    };
    let mut points = Vec::new();
    let mut residual = Vec::new();
    let mut scale: f64 = 0.0;
    for x in window.points() {
        for th in [x[0] - 2.0 * eta, x[0] + 2.0 * eta] {
            if th.sin() < window.pole_margin {
                return Err(LichError::ChartPole { theta: th });
            }
        }
        let (s, _) = x[0].sin_cos();
        let gam = christoffel(x[0]);
        let ginv = [1.0 / a, 1.0 / (a * s * s), 1.0];
        let gmet = [a, a * s * s, 1.0];
        let tn = nabla(x);
        let mut lap = [[0.0; 3]; 3];
        for ab in 0..3 {
            // only diagonal a = b terms survive the contraction with G^{ab}
            let (tp, tm) = (nabla(shift(x, ab, eta)), nabla(shift(x, ab, -eta)));
            for i in 0..3 {
                for k in 0..3 {
                    let mut v = (tp[ab][i][k] - tm[ab][i][k]) / (2.0 * eta);
                    for m in 0..3 {
                        v -= gam[m][ab][ab] * tn[m][i][k] + gam[m][ab][i] * tn[ab][m][k] + gam[m][ab][k] * tn[ab][i][m];
                    }
                    lap[i][k] += ginv[ab] * v;
                }
            }
        }
        let h = chart(x);
        let kcurv = 1.0 / a;
        let mut out = lap;
        for i in 0..2 {
            for k in 0..2 {
                // 2R_{ijkl}h^{jl} with R_{ijkl} = K(G_ik G_jl − G_il G_jk) on the sphere factor
                let mut r = 0.0;
                for j in 0..2 {
                    for l in 0..2 {
                        let rijkl = kcurv * ((i == k) as u8 as f64 * gmet[i] * (j == l) as u8 as f64 * gmet[j] - (i == l) as u8 as f64 * gmet[i] * (j == k) as u8 as f64 * gmet[j]);
                        r += rijkl * ginv[j] * ginv[l] * h[j][l];
                    }
                }
                out[i][k] += 2.0 * r;
            }
        }
        for i in 0..3 {
            for k in 0..3 {
                let ric_i = if i < 2 { kcurv } else { 0.0 };
                let ric_k = if k < 2 { kcurv } else { 0.0 };
                out[i][k] -= ric_i * h[k][i] + ric_k * h[i][k];
            }
        }
        let mut diff = to_frame(&out, x[0]);
        let rhs = tensor.mode_operator(x[0], x[1], x[2], t);
        for i in 0..3 {
            for k in 0..3 {
                diff[i][k] -= rhs[i][k];
            }
        }
        scale = scale.max(gbar_norm(&rhs, t));
        points.push(x);
        residual.push(gbar_norm(&diff, t));
    }
    let sup = residual.iter().copied().fold(0.0, f64::max);
    Ok(ResidualField { points, residual, sup, scale })
}

/// Vector fields on the cylinder with explicit derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CylinderField {
    /// Rotation of `S²` about a unit axis.
    Rotation { axis: [f64; 3] },
    /// `∂_z`.
    Translation,
    /// `ξ = −¼∇ψ` for the first harmonic `ψ = axis · x`.
    Conformal { axis: [f64; 3] },
}

impl CylinderField {
    /// Chart components `V^i` and `∂_j V^i` at `(θ, φ, z)`.
    pub fn eval(&self, x: [f64; 3]) -> ([f64; 3], Mat3) {
        let (s, c) = x[0].sin_cos();
        let (sp, cp) = x[1].sin_cos();
        match *self {
            CylinderField::Translation => ([0.0, 0.0, 1.0], [[0.0; 3]; 3]),
            CylinderField::Rotation { axis: n } => {
                let cot = c / s;
                // R_x = −sinφ ∂_θ − cotθ cosφ ∂_φ, R_y = cosφ ∂_θ − cotθ sinφ ∂_φ, R_z = ∂_φ
                let vt = -n[0] * sp + n[1] * cp;
                let vp = -n[0] * cot * cp - n[1] * cot * sp + n[2];
                let dvt = [0.0, -n[0] * cp - n[1] * sp, 0.0];
                let dvp = [n[0] * cp / (s * s) + n[1] * sp / (s * s), n[0] * cot * sp - n[1] * cot * cp, 0.0];
                ([vt, vp, 0.0], [dvt, dvp, [0.0; 3]])
            }
            CylinderField::Conformal { axis: n } => {
                let pt = n[0] * c * cp + n[1] * c * sp - n[2] * s;
                let pp = -n[0] * s * sp + n[1] * s * cp;
                let ptt = -n[0] * s * cp - n[1] * s * sp - n[2] * c;
                let ptp = -n[0] * c * sp + n[1] * c * cp;
                let ppp = -n[0] * s * cp - n[1] * s * sp;
                let vt = -0.25 * pt;
                let vp = -0.25 * pp / (s * s);
                let dvt = [-0.25 * ptt, -0.25 * ptp, 0.0];
                let dvp = [-0.25 * (ptp / (s * s) - 2.0 * c * pp / (s * s * s)), -0.25 * ppp / (s * s), 0.0];
                ([vt, vp, 0.0], [dvt, dvp, [0.0; 3]])
            }
        }
    }

    /// The exact `𝓛_V ḡ(t)` in frame components: zero for Killing fields,
    /// `(−t)ψ g_{S²}` for the conformal field.
    pub fn expected(&self, theta: f64, phi: f64, t: f64) -> FrameTensor {
        let mut h = [[0.0; 3]; 3];
        if let CylinderField::Conformal { axis: n } = *self {
            let psi = n[0] * theta.sin() * phi.cos() + n[1] * theta.sin() * phi.sin() + n[2] * theta.cos();
            h[0][0] = -t * psi;
            h[1][1] = -t * psi;
        }
        h
    }
}

/// `(𝓛_V ḡ(t))_{ij} = V^k ∂_k G_ij + G_kj ∂_i V^k + G_ik ∂_j V^k` in frame components.
pub fn lie_derivative(field: &CylinderField, theta: f64, phi: f64, z: f64, t: f64) -> FrameTensor {
    let a = -2.0 * t;
    let (s, c) = theta.sin_cos();
    let g = [a, a * s * s, 1.0];
    let (v, dv) = field.eval([theta, phi, z]);
    let mut h = [[0.0; 3]; 3];
    // only ∂_θ G_φφ = 2a sinθ cosθ is nonzero
    h[1][1] += v[0] * 2.0 * a * s * c;
    for i in 0..3 {
        for j in 0..3 {
            h[i][j] += g[j] * dv[j][i] + g[i] * dv[i][j];
        }
    }
    to_frame(&h, theta)
}

/// Result of evolving `𝓛_V ḡ` through the mode system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LieReport {
    pub field: CylinderField,
    /// `sup |𝓛_V ḡ − expected|_{ḡ}` on the sampled grid.
    pub identity_defect: f64,
    /// `sup |evolved − 𝓛_V ḡ(t)|_{ḡ}` over the grid and sphere nodes.
    pub evolution_residual: f64,
    pub sup_norm: f64,
}

/// Decompose `𝓛_V ḡ` on the parabolic boundary, evolve by the mode system
/// and compare with `𝓛_V ḡ(t)` everywhere.
pub fn lie_derivative_invariant_check(field: &CylinderField, basis: &ModeBasis, z: &[f64], t: &[f64], scheme: ModeScheme) -> Result<LieReport, LichError> {
    let q = SphereQuadrature::for_degree(basis.l_max);
    let h = |th: f64, ph: f64, zz: f64, tt: f64| lie_derivative(field, th, ph, zz, tt);
    let full = decompose(h, basis, z, t, &q)?;
    let mut data = BoundaryData::zeros(basis.len(), z.to_vec(), t.to_vec());
    let (nz, nt) = (z.len(), t.len());
    for k in 0..basis.len() {
        for iz in 0..nz {
            data.initial[k][iz] = full.coefficient(k, iz, 0);
        }
        for it in 0..nt {
            data.left[k][it] = full.coefficient(k, 0, it);
            data.right[k][it] = full.coefficient(k, nz - 1, it);
        }
    }
    let evolved = evolve_modes(basis, &data, scheme)?;
    let table = BasisTable::new(basis, &q);
    let (mut defect, mut resid, mut sup) = (0.0f64, 0.0f64, 0.0f64);
    for it in 0..nt {
        for iz in 0..nz {
            for (p, &(th, ph, _)) in table.points.iter().enumerate() {
                let exact = lie_derivative(field, th, ph, z[iz], t[it]);
                let want = field.expected(th, ph, t[it]);
                let got = evolved.assemble(&table, p, iz, it);
                let mut d1 = [[0.0; 3]; 3];
                let mut d2 = [[0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        d1[i][j] = exact[i][j] - want[i][j];
                        d2[i][j] = got[i][j] - exact[i][j];
                    }
                }
                defect = defect.max(gbar_norm(&d1, t[it]));
                resid = resid.max(gbar_norm(&d2, t[it]));
                sup = sup.max(gbar_norm(&exact, t[it]));
            }
        }
    }
    Ok(LieReport { field: *field, identity_defect: defect, evolution_residual: resid, sup_norm: sup })
}

/// Harmonic lookup that panics on a missing entry; for building test tensors.
pub fn harmonic(basis: &ModeBasis, family: Family, l: usize, m: i32, parity: super::harmonics::Parity) -> Harmonic {
    basis.harmonics[basis.index_of(family, l, m, parity).expect("harmonic within the basis")]
}
