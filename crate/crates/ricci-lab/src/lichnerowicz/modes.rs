//! Splitting symmetric tensors on the cylinder into sphere modes and back.

use super::harmonics::{Family, FrameValue, ModeBasis, SphereQuadrature};
use super::LichError;

/// Components in the orthonormal frame `(∂_θ, (sin θ)⁻¹∂_φ, ∂_z)` of
/// `g_{S²} + dz²`.
pub type FrameTensor = [[f64; 3]; 3];

/// `|h|_{ḡ(t)}` with `ḡ(t) = (−2t)g_{S²} + dz²`.
pub fn gbar_norm(h: &FrameTensor, t: f64) -> f64 {
    let a = -2.0 * t;
    let sphere = h[0][0].powi(2) + h[0][1].powi(2) + h[1][0].powi(2) + h[1][1].powi(2);
    let mixed = h[0][2].powi(2) + h[2][0].powi(2) + h[1][2].powi(2) + h[2][1].powi(2);
    (sphere / (a * a) + mixed / a + h[2][2].powi(2)).sqrt()
}

/// Add `c · e` into `h` for a harmonic value `e` of the given family.
pub fn accumulate(h: &mut FrameTensor, family: Family, e: &FrameValue, c: f64) {
    match (family, e) {
        (Family::Omega, FrameValue::Scalar(y)) => {
            h[0][0] += c * y;
            h[1][1] += c * y;
        }
        (Family::Beta, FrameValue::Scalar(y)) => h[2][2] += c * y,
        (Family::Sigma, FrameValue::Form(q)) => {
            for a in 0..2 {
                h[a][2] += c * q[a];
                h[2][a] += c * q[a];
            }
        }
        (Family::Chi, FrameValue::Tensor(s)) => {
            h[0][0] += c * s[0];
            h[0][1] += c * s[1];
            h[1][0] += c * s[1];
            h[1][1] += c * s[2];
        }
        _ => unreachable!("family and value kind disagree"),
    }
}

/// The part of `h` that pairs with harmonics of `family`.
pub fn family_part(h: &FrameTensor, family: Family) -> FrameValue {
    let w = 0.5 * (h[0][0] + h[1][1]);
    match family {
        Family::Omega => FrameValue::Scalar(w),
        Family::Beta => FrameValue::Scalar(h[2][2]),
        Family::Sigma => FrameValue::Form([h[0][2], h[1][2]]),
        Family::Chi => FrameValue::Tensor([h[0][0] - w, h[0][1], h[1][1] - w]),
    }
}

/// Harmonic values at the nodes of a sphere rule.
#[derive(Debug, Clone)]
pub struct BasisTable {
    pub points: Vec<(f64, f64, f64)>,
    pub values: Vec<Vec<FrameValue>>,
}

impl BasisTable {
    pub fn new(basis: &ModeBasis, q: &SphereQuadrature) -> Self {
        let points = q.points();
        let values = basis.harmonics.iter().map(|h| points.iter().map(|&(t, p, _)| h.frame_value(t, p)).collect()).collect();
        BasisTable { points, values }
    }

    /// `h` at node `k` from one coefficient per harmonic.
    pub fn assemble_at(&self, basis: &ModeBasis, coeffs: impl Fn(usize) -> f64, k: usize) -> FrameTensor {
        let mut h = [[0.0; 3]; 3];
        for (i, harm) in basis.harmonics.iter().enumerate() {
            let c = coeffs(i);
            if c != 0.0 {
                accumulate(&mut h, harm.family, &self.values[i][k], c);
            }
        }
        h
    }

    /// Coefficients of `h` sampled at the nodes.
    pub fn project(&self, basis: &ModeBasis, samples: &[FrameTensor]) -> Vec<f64> {
        basis
            .harmonics
            .iter()
            .enumerate()
            .map(|(i, harm)| self.points.iter().zip(samples).enumerate().map(|(k, (p, h))| p.2 * family_part(h, harm.family).dot(&self.values[i][k])).sum())
            .collect()
    }
}

/// Mode coefficients of `h` on a `(z, t)` grid.
#[derive(Debug, Clone)]
pub struct CylinderTensorModes {
    pub basis: ModeBasis,
    pub z: Vec<f64>,
    pub t: Vec<f64>,
    /// `coeffs[k][it·nz + iz]` for harmonic `k`.
    pub coeffs: Vec<Vec<f64>>,
    /// Scale `L` of the problem, if any.
    pub l_scale: Option<f64>,
}

/// Symmetry tolerance relative to the largest component.
const SYMMETRY_TOL: f64 = 1e-12;

impl CylinderTensorModes {
    pub fn zeros(basis: ModeBasis, z: Vec<f64>, t: Vec<f64>) -> Self {
        let n = z.len() * t.len();
        let coeffs = vec![vec![0.0; n]; basis.len()];
        CylinderTensorModes { basis, z, t, coeffs, l_scale: None }
    }

    pub fn nz(&self) -> usize {
        self.z.len()
    }

    pub fn coefficient(&self, k: usize, iz: usize, it: usize) -> f64 {
        self.coeffs[k][it * self.z.len() + iz]
    }

    /// Assembled `h` at one sphere node of `table`.
    pub fn assemble(&self, table: &BasisTable, k: usize, iz: usize, it: usize) -> FrameTensor {
        table.assemble_at(&self.basis, |i| self.coefficient(i, iz, it), k)
    }

    /// Largest coefficient difference between two mode sets on the same grid.
    pub fn max_difference(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs())).fold(0.0, f64::max)
    }

    /// Rows `label, eigenvalue, damping, z, t, coefficient` for every
    /// `stride`-th grid point in each direction.
    pub fn to_csv(&self, stride: usize) -> String {
        let stride = stride.max(1);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["harmonic", "eigenvalue", "damping", "z", "t", "coefficient"]).unwrap();
        for (k, h) in self.basis.harmonics.iter().enumerate() {
            for it in (0..self.t.len()).step_by(stride) {
                for iz in (0..self.z.len()).step_by(stride) {
                    w.write_record([h.label(), h.eigenvalue.to_string(), h.damping().to_string(), format!("{:e}", self.z[iz]), format!("{:e}", self.t[it]), format!("{:e}", self.coefficient(k, iz, it))]).unwrap();
                }
            }
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// Project `h(θ, φ, z, t)` onto the basis at every grid point.
pub fn decompose<H>(h: H, basis: &ModeBasis, z: &[f64], t: &[f64], q: &SphereQuadrature) -> Result<CylinderTensorModes, LichError>
where
    H: Fn(f64, f64, f64, f64) -> FrameTensor,
{
    let table = BasisTable::new(basis, q);
    let mut modes = CylinderTensorModes::zeros(basis.clone(), z.to_vec(), t.to_vec());
    let nz = z.len();
    for (it, &tt) in t.iter().enumerate() {
        for (iz, &zz) in z.iter().enumerate() {
            let mut samples = Vec::with_capacity(table.points.len());
            for &(th, ph, _) in &table.points {
                let m = h(th, ph, zz, tt);
                check_symmetric(&m, th, ph)?;
                samples.push(m);
            }
            for (k, c) in table.project(basis, &samples).into_iter().enumerate() {
                modes.coeffs[k][it * nz + iz] = c;
            }
        }
    }
    Ok(modes)
}

pub(crate) fn check_symmetric(m: &FrameTensor, theta: f64, phi: f64) -> Result<(), LichError> {
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    for i in 0..3 {
        for j in i + 1..3 {
            let d = (m[i][j] - m[j][i]).abs();
            if d > SYMMETRY_TOL * scale {
                return Err(LichError::NonSymmetric { theta, phi, defect: d });
            }
        }
    }
    Ok(())
}
