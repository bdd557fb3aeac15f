//! Real spherical harmonics on the unit sphere and the vector and tensor
//! eigenfields built from them.
//!
//! Components are taken in the orthonormal frame `e₁ = ∂_θ`,
//! `e₂ = (sin θ)⁻¹∂_φ`. For `λ = l(l+1)`:
//!
//! - `Y_lm` has `Δ Y = −λ Y`;
//! - `∇Y/√λ` and its rotation `J∇Y/√λ` are rough-Laplacian eigenfields with `μ = λ − 1`;
//! - the tracefree Hessian `(∇²Y + ½λY g)/√(λ(λ−2)/2)` and its rotation have `ν = λ − 4`.

use super::LichError;
use crate::numerics::jet::Jet;
use crate::numerics::quad::GaussLegendre;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `Y` with its first and second partials in `(θ, φ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SphJet {
    pub v: f64,
    pub t: f64,
    pub p: f64,
    pub tt: f64,
    pub tp: f64,
    pub pp: f64,
}

/// Orthonormal real harmonic `Y_lm`; `m < 0` selects the `sin(|m|φ)` member.
pub fn real_ylm(l: usize, m: i32, theta: f64, phi: f64) -> SphJet {
    let am = m.unsigned_abs() as usize;
    assert!(am <= l);
    let th = Jet::var(theta);
    let (c, s) = (th.cos(), th.sin());
    // normalized associated Legendre recurrence, carried on θ-jets
    let mut pmm = Jet::constant(1.0 / (4.0 * PI).sqrt());
    for k in 1..=am {
        let kf = k as f64;
        pmm = (s * pmm).scale(-((2.0 * kf + 1.0) / (2.0 * kf)).sqrt());
    }
    let p = if l == am {
        pmm
    } else {
        let mf = am as f64;
        let mut p0 = pmm;
        let mut p1 = (c * pmm).scale((2.0 * mf + 3.0).sqrt());
        for ll in am + 2..=l {
            let lf = ll as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let lp = lf - 1.0;
            let a_prev = ((4.0 * lp * lp - 1.0) / (lp * lp - mf * mf)).sqrt();
            let p2 = (c * p1 - p0.scale(1.0 / a_prev)).scale(a);
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    let mf = am as f64;
    let (f, f1, f2) = if m == 0 {
        (1.0, 0.0, 0.0)
    } else if m > 0 {
        let k = 2f64.sqrt();
        (k * (mf * phi).cos(), -k * mf * (mf * phi).sin(), -k * mf * mf * (mf * phi).cos())
    } else {
        let k = 2f64.sqrt();
        (k * (mf * phi).sin(), k * mf * (mf * phi).cos(), -k * mf * mf * (mf * phi).sin())
    };
    SphJet { v: p.v * f, t: p.d1 * f, p: p.v * f1, tt: p.d2 * f, tp: p.d1 * f1, pp: p.v * f2 }
}

/// Which component family of `h` a harmonic belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Coefficient of `g_{S²}`.
    Omega,
    /// Tracefree part on `S²`.
    Chi,
    /// Mixed `dz ⊗ σ + σ ⊗ dz`.
    Sigma,
    /// Coefficient of `dz ⊗ dz`.
    Beta,
}

/// Gradient-type or rotated member of a vector/tensor pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// One eigenfield of the mode system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub family: Family,
    pub l: usize,
    pub m: i32,
    pub parity: Parity,
    /// Eigenvalue of the rough Laplacian on `S²`: `λ`, `μ` or `ν`.
    pub eigenvalue: f64,
}

impl Harmonic {
    /// `κ` in `∂_t c = ∂_z²c − κ c/(−2t)`.
    pub fn damping(&self) -> f64 {
        match self.family {
            Family::Omega | Family::Beta => self.eigenvalue,
            Family::Sigma => self.eigenvalue + 1.0,
            Family::Chi => self.eigenvalue + 4.0,
        }
    }

    pub fn label(&self) -> String {
        let f = match self.family {
            Family::Omega => "omega",
            Family::Chi => "chi",
            Family::Sigma => "sigma",
            Family::Beta => "beta",
        };
        let p = match (self.family, self.parity) {
            (Family::Chi | Family::Sigma, Parity::Even) => "e",
            (Family::Chi | Family::Sigma, Parity::Odd) => "o",
            _ => "",
        };
        format!("{f}{p}_{}_{}", self.l, self.m)
    }

    /// Frame components at `(θ, φ)`: the scalar value for ω/β, the
    /// one-form `(a₁, a₂)` for σ, the symmetric `(s₁₁, s₁₂, s₂₂)` for χ.
    pub fn frame_value(&self, theta: f64, phi: f64) -> FrameValue {
        let y = real_ylm(self.l, self.m, theta, phi);
        let lam = (self.l * (self.l + 1)) as f64;
        let (s, c) = theta.sin_cos();
        match self.family {
            Family::Omega | Family::Beta => FrameValue::Scalar(y.v),
            Family::Sigma => {
                let k = 1.0 / lam.sqrt();
                let (a, b) = (y.t * k, y.p / s * k);
                FrameValue::Form(match self.parity {
                    Parity::Even => [a, b],
                    Parity::Odd => [-b, a],
                })
            }
            Family::Chi => {
                let h11 = y.tt;
                let h12 = (y.tp - c / s * y.p) / s;
                let h22 = (y.pp + s * c * y.t) / (s * s);
                let k = 1.0 / (lam * (lam - 2.0) / 2.0).sqrt();
                let (p, q) = (0.5 * (h11 - h22) * k, h12 * k);
                FrameValue::Tensor(match self.parity {
                    Parity::Even => [p, q, -p],
                    Parity::Odd => [q, -p, -q],
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameValue {
    Scalar(f64),
    Form([f64; 2]),
    Tensor([f64; 3]),
}

impl FrameValue {
    pub fn dot(&self, other: &FrameValue) -> f64 {
        match (self, other) {
            (FrameValue::Scalar(a), FrameValue::Scalar(b)) => a * b,
            (FrameValue::Form(a), FrameValue::Form(b)) => a[0] * b[0] + a[1] * b[1],
            (FrameValue::Tensor(a), FrameValue::Tensor(b)) => a[0] * b[0] + 2.0 * a[1] * b[1] + a[2] * b[2],
            _ => 0.0,
        }
    }
}

/// Product rule: Gauss–Legendre in `cos θ` times the trapezoid rule in `φ`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// Weight of node `(i, j)` is `w_theta[i] · 2π/n_φ`.
    pub w_theta: Vec<f64>,
}

impl SphereQuadrature {
    /// Exact for band-limited integrands of degree below `min(2 n_θ, n_φ)`.
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let gl = GaussLegendre::new(n_theta);
        let theta = gl.nodes.iter().rev().map(|x| x.acos()).collect();
        let w_theta = gl.weights.iter().rev().copied().collect();
        let phi = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
        SphereQuadrature { theta, phi, w_theta }
    }

    /// Rule exact for products of fields with `l ≤ l_max`.
    pub fn for_degree(l_max: usize) -> Self {
        Self::new(l_max + 2, 2 * l_max + 4)
    }

    pub fn len(&self) -> usize {
        self.theta.len() * self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(θ, φ, weight)` for every node.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let dphi = 2.0 * PI / self.phi.len() as f64;
        let mut out = Vec::with_capacity(self.len());
        for (i, &t) in self.theta.iter().enumerate() {
            for &p in &self.phi {
                out.push((t, p, self.w_theta[i] * dphi));
            }
        }
        out
    }
}

/// The harmonics retained in a computation, with eigenvalue tables.
#[derive(Debug, Clone, Serialize)]
pub struct ModeBasis {
    pub l_max: usize,
    pub harmonics: Vec<Harmonic>,
    /// Largest deviation of the quadrature Gram matrix from the identity.
    pub certificate: f64,
}

/// Vector and tensor eigenvalues per degree `l`. Index `l` of `vector`
/// is used for `l ≥ 1`, of `tensor` for `l ≥ 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenTables {
    pub vector: Vec<f64>,
    pub tensor: Vec<f64>,
}

impl EigenTables {
    /// `μ = l(l+1) − 1`, `ν = l(l+1) − 4` for the fields above.
    pub fn round_sphere(l_max: usize) -> Self {
        let lam = |l: usize| (l * (l + 1)) as f64;
        EigenTables {
            vector: (0..=l_max).map(|l| if l >= 1 { lam(l) - 1.0 } else { f64::NAN }).collect(),
            tensor: (0..=l_max).map(|l| if l >= 2 { lam(l) - 4.0 } else { f64::NAN }).collect(),
        }
    }

    /// Check `μ ≥ 1` and `ν > 0`.
    pub fn validate(&self, l_max: usize) -> Result<(), LichError> {
        if self.vector.len() <= l_max || self.tensor.len() <= l_max {
            return Err(LichError::Invalid(format!("eigenvalue tables need entries up to l = {l_max}")));
        }
        for l in 1..=l_max {
            if !(self.vector[l] >= 1.0) {
                return Err(LichError::EigenvalueBound { family: Family::Sigma, l, value: self.vector[l] });
            }
        }
        for l in 2..=l_max {
            if !(self.tensor[l] > 0.0) {
                return Err(LichError::EigenvalueBound { family: Family::Chi, l, value: self.tensor[l] });
            }
        }
        Ok(())
    }
}

impl ModeBasis {
    pub fn new(l_max: usize) -> Self {
        Self::with_tables(l_max, &EigenTables::round_sphere(l_max)).expect("round-sphere tables satisfy the bounds")
    }

    /// All families up to degree `l_max` with the given vector/tensor
    /// eigenvalues; the Gram certificate is computed by quadrature.
    pub fn with_tables(l_max: usize, tables: &EigenTables) -> Result<Self, LichError> {
        tables.validate(l_max)?;
        let mut harmonics = Vec::new();
        let scalar = |family, l: usize, m| Harmonic { family, l, m, parity: Parity::Even, eigenvalue: (l * (l + 1)) as f64 };
        for family in [Family::Omega, Family::Beta] {
            for l in 0..=l_max {
                for m in -(l as i32)..=(l as i32) {
                    harmonics.push(scalar(family, l, m));
                }
            }
        }
        for (family, l0, table) in [(Family::Sigma, 1, &tables.vector), (Family::Chi, 2, &tables.tensor)] {
            for l in l0..=l_max {
                for m in -(l as i32)..=(l as i32) {
                    for parity in [Parity::Even, Parity::Odd] {
                        harmonics.push(Harmonic { family, l, m, parity, eigenvalue: table[l] });
                    }
                }
            }
        }
        let mut basis = ModeBasis { l_max, harmonics, certificate: 0.0 };
        basis.certificate = basis.gram_deviation(&SphereQuadrature::for_degree(l_max));
        Ok(basis)
    }

    pub fn len(&self) -> usize {
        self.harmonics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.harmonics.is_empty()
    }

    pub fn index_of(&self, family: Family, l: usize, m: i32, parity: Parity) -> Option<usize> {
        self.harmonics.iter().position(|h| h.family == family && h.l == l && h.m == m && (h.parity == parity || matches!(family, Family::Omega | Family::Beta)))
    }

    /// `max |⟨e_a, e_b⟩ − δ_ab|` within each family.
    pub fn gram_deviation(&self, q: &SphereQuadrature) -> f64 {
        let pts = q.points();
        let vals: Vec<Vec<FrameValue>> = self.harmonics.iter().map(|h| pts.iter().map(|&(t, p, _)| h.frame_value(t, p)).collect()).collect();
        let mut worst: f64 = 0.0;
        for a in 0..self.len() {
            for b in a..self.len() {
                if self.harmonics[a].family != self.harmonics[b].family {
                    continue;
                }
                let g: f64 = pts.iter().enumerate().map(|(k, p)| p.2 * vals[a][k].dot(&vals[b][k])).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degree_closed_forms() {
        let (t, p) = (0.7, 1.3);
        let y00 = real_ylm(0, 0, t, p).v;
        assert!((y00 - 0.5 / PI.sqrt()).abs() < 1e-15);
        let k = (3.0 / (4.0 * PI)).sqrt();
        assert!((real_ylm(1, 0, t, p).v - k * t.cos()).abs() < 1e-15);
        assert!((real_ylm(1, 1, t, p).v.abs() - k * t.sin() * p.cos()).abs() < 1e-15);
        assert!((real_ylm(1, -1, t, p).v.abs() - k * t.sin() * p.sin()).abs() < 1e-15);
        let y20 = (5.0 / (16.0 * PI)).sqrt() * (3.0 * t.cos().powi(2) - 1.0);
        assert!((real_ylm(2, 0, t, p).v - y20).abs() < 1e-14);
    }

    #[test]
    fn partials_match_differences() {
        let h = 1e-5;
        for (l, m) in [(3, 2), (4, -1), (2, 0)] {
            let (t, p) = (0.9, 2.1);
            let y = real_ylm(l, m, t, p);
            let f = |a: f64, b: f64| real_ylm(l, m, a, b).v;
            assert!((y.t - (f(t + h, p) - f(t - h, p)) / (2.0 * h)).abs() < 1e-8);
            assert!((y.p - (f(t, p + h) - f(t, p - h)) / (2.0 * h)).abs() < 1e-8);
            let ft = |a: f64, b: f64| real_ylm(l, m, a, b).t;
            assert!((y.tp - (ft(t, p + h) - ft(t, p - h)) / (2.0 * h)).abs() < 1e-8);
            assert!((y.tt - (ft(t + h, p) - ft(t - h, p)) / (2.0 * h)).abs() < 1e-8);
        }
    }

    #[test]
    fn bases_are_orthonormal() {
        let b = ModeBasis::new(4);
        assert!(b.certificate < 1e-13, "{}", b.certificate);
        // 2·25 scalars, 2·24 one-forms, 2·21 tensors
        assert_eq!(b.len(), 50 + 48 + 42);
    }

    #[test]
    fn tables_are_checked() {
        let mut t = EigenTables::round_sphere(3);
        assert_eq!(t.vector[1], 1.0);
        assert_eq!(t.tensor[2], 2.0);
        t.tensor[2] = 0.0;
        assert!(matches!(t.validate(3), Err(LichError::EigenvalueBound { family: Family::Chi, l: 2, .. })));
    }
}
