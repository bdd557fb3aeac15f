//! Curvature-pinching algebra for the weighted |h|²/(R−ρ)² estimate in three
//! dimensions: the matrix A_ρ, its minors, the reaction term S, and grid
//! certification of the constants (C_#, c_#).
//!
//! Notation: for Ricci eigenvalues r₁ ≤ r₂ ≤ r₃ with R = r₁ + r₂ + r₃ we write
//! a = r₃ − r₁ − r₂, b = r₂ − r₃ − r₁, c = r₁ − r₂ − r₃ and Q = r₁² + r₂² + r₃².

use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PinchingError {
    #[error("invalid Ricci triple: {0}")]
    InvalidTriple(String),
    #[error("the minor identity holds for ρ = 0 only (got ρ = {0})")]
    ShiftNotZero(f64),
    #[error("no candidate C_# gives a positive margin: {0:?}")]
    NoCertifiedConstant(Vec<Attempt>),
    #[error("invalid options: {0}")]
    Options(String),
}

/// Ordered nonnegative Ricci eigenvalues and a shift ρ with R > ρ ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicciTriple {
    pub r: [f64; 3],
    pub rho: f64,
}

impl RicciTriple {
    pub fn new(r1: f64, r2: f64, r3: f64, rho: f64) -> Result<Self, PinchingError> {
        let r = [r1, r2, r3];
        if r.iter().chain([&rho]).any(|x| !x.is_finite()) {
            return Err(PinchingError::InvalidTriple(format!("non-finite entry in {r:?}, ρ = {rho}")));
        }
        if r1 < 0.0 {
            return Err(PinchingError::InvalidTriple(format!("negative eigenvalue in {r:?}")));
        }
        if r1 > r2 || r2 > r3 {
            return Err(PinchingError::InvalidTriple(format!("{r:?} is not increasing")));
        }
        if rho < 0.0 || r1 + r2 + r3 <= rho {
            return Err(PinchingError::InvalidTriple(format!("need R > ρ ≥ 0, got R = {}, ρ = {rho}", r1 + r2 + r3)));
        }
        Ok(RicciTriple { r, rho })
    }

    /// Sorts before validating.
    pub fn from_unsorted(mut r: [f64; 3], rho: f64) -> Result<Self, PinchingError> {
        r.sort_by(f64::total_cmp);
        Self::new(r[0], r[1], r[2], rho)
    }

    pub fn scalar(&self) -> f64 {
        self.r.iter().sum()
    }

    pub fn sum_sq(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum()
    }

    /// (a, b, c).
    pub fn defects(&self) -> [f64; 3] {
        defects(self.r)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self, PinchingError> {
        Self::new(lambda * self.r[0], lambda * self.r[1], lambda * self.r[2], lambda * self.rho)
    }
}

fn defects(r: [f64; 3]) -> [f64; 3] {
    [r[2] - r[0] - r[1], r[1] - r[2] - r[0], r[0] - r[1] - r[2]]
}

/// A_ρ for eigenvalues in any order. Entry (i, j), i ≠ j, is (R − ρ)(r_k − r_i − r_j)
/// with k the remaining index, so the form is permutation-equivariant.
fn a_matrix(r: [f64; 3], rho: f64) -> Matrix3<f64> {
    let big_r = r[0] + r[1] + r[2];
    let d = 2.0 * (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    let s = big_r - rho;
    let [a, b, c] = defects(r);
    Matrix3::new(d, s * a, s * b, s * a, d, s * c, s * b, s * c, d)
}

pub fn build_a_rho(t: &RicciTriple) -> Matrix3<f64> {
    a_matrix(t.r, t.rho)
}

/// Leading principal minors of A_ρ.
pub fn leading_minors(m: &Matrix3<f64>) -> [f64; 3] {
    [m[(0, 0)], m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)], m.determinant()]
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Minor2Check {
    /// 4Q² − R²a².
    pub lhs: f64,
    /// The sum-of-squares expansion.
    pub rhs: f64,
    pub diff: f64,
    /// |diff| / rhs; rhs ≥ 3r₃⁴ > 0.
    pub relative: f64,
}

pub fn minor2_identity_check(t: &RicciTriple) -> Result<Minor2Check, PinchingError> {
    if t.rho != 0.0 {
        return Err(PinchingError::ShiftNotZero(t.rho));
    }
    let [r1, r2, r3] = t.r;
    let (q, big_r, a) = (t.sum_sq(), t.scalar(), t.defects()[0]);
    let lhs = 4.0 * q * q - big_r * big_r * a * a;
    let rhs = (r1 - r2).powi(4)
        + 2.0 * (r1 * r1 - r2 * r2).powi(2)
        + 8.0 * (r1 * r1 + r2 * r2) * r3 * r3
        + 2.0 * (r1 + r2).powi(2) * r3 * r3
        + 3.0 * r3.powi(4);
    let diff = lhs - rhs;
    Ok(Minor2Check { lhs, rhs, diff, relative: diff.abs() / rhs })
}

/// Coefficients of det A_ρ as a cubic in ρ.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DetExpansion {
    pub det0: f64,
    /// 4RQ(a²+b²+c²) − 6R²abc.
    pub linear: f64,
    /// −2Q(a²+b²+c²) + 6R·abc.
    pub quadratic: f64,
    /// −2abc.
    pub cubic: f64,
}

impl DetExpansion {
    pub fn eval(&self, rho: f64) -> f64 {
        self.det0 + rho * (self.linear + rho * (self.quadratic + rho * self.cubic))
    }
}

pub fn det_expansion(r: [f64; 3]) -> DetExpansion {
    let big_r = r[0] + r[1] + r[2];
    let q = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    let [a, b, c] = defects(r);
    let (ss, p, d) = (a * a + b * b + c * c, a * b * c, 2.0 * q);
    // det(dI + sM) = d³ − d s² Σa² + 2 s³ abc with s = R − ρ
    DetExpansion {
        det0: d * d * d - d * big_r * big_r * ss + 2.0 * big_r.powi(3) * p,
        linear: 2.0 * d * big_r * ss - 6.0 * big_r * big_r * p,
        quadratic: -d * ss + 6.0 * big_r * p,
        cubic: -2.0 * p,
    }
}

/// The reaction term S and the quadratic-form bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SBound {
    pub s: f64,
    /// hᵀA_ρh with r the diagonal of Ric in the frame of h.
    pub form: f64,
    /// 2S − hᵀA_ρh.
    pub gap: f64,
    /// |h|²R², for relative tolerances.
    pub scale: f64,
}

/// S from full matrices: h = diag(h) and an arbitrary symmetric Ric.
pub fn s_quantity_frame(h: [f64; 3], ric: &Matrix3<f64>, rho: f64) -> SBound {
    let hm = Matrix3::from_diagonal(&Vector3::from(h));
    let big_r = ric.trace();
    let tr_h = hm.trace();
    let h_sq = hm.norm_squared();
    let inner = ric.component_mul(&(hm * tr_h - hm * hm)).sum();
    let s = -2.0 * (big_r - rho) * inner + 0.5 * big_r * (big_r - rho) * (tr_h * tr_h - h_sq) + h_sq * ric.norm_squared();
    let r = [ric[(0, 0)], ric[(1, 1)], ric[(2, 2)]];
    let hv = Vector3::from(h);
    let form = (hv.transpose() * a_matrix(r, rho) * hv)[(0, 0)];
    SBound { s, form, gap: 2.0 * s - form, scale: h_sq * big_r * big_r }
}

/// The commuting case Ric = diag(r).
pub fn s_quantity(h: [f64; 3], t: &RicciTriple) -> SBound {
    s_quantity_frame(h, &Matrix3::from_diagonal(&Vector3::from(t.r)), t.rho)
}

/// Margins (right minus left) of the bounds on R·abc.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProductMargins {
    pub lhs: f64,
    /// Entry k bounds the product through R times the k-th defect and uses
    /// ½Q times the sum of the other two squared defects.
    pub pairwise: [f64; 3],
    /// ⅓Q(a²+b²+c²) − R·abc.
    pub combined: f64,
    /// R·abc / (Q(a²+b²+c²)); the combined bound asks for ≤ ⅓.
    pub ratio: f64,
    /// R⁴.
    pub scale: f64,
}

pub fn product_inequality_check(t: &RicciTriple) -> ProductMargins {
    let (q, big_r) = (t.sum_sq(), t.scalar());
    let d = t.defects();
    let lhs = big_r * d[0] * d[1] * d[2];
    let sq: [f64; 3] = d.map(|x| x * x);
    let ss = sq[0] + sq[1] + sq[2];
    let pairwise = [0, 1, 2].map(|k| 0.5 * q * (ss - sq[k]) - lhs);
    ProductMargins { lhs, pairwise, combined: q * ss / 3.0 - lhs, ratio: lhs / (q * ss), scale: big_r.powi(4) }
}

/// Ordered points r₁ ≤ r₂ ≤ r₃ of the barycentric grid with `n` subdivisions of
/// the simplex r₁ + r₂ + r₃ = 1.
pub fn ordered_simplex(n: usize) -> Vec<[f64; 3]> {
    let mut pts = Vec::new();
    for i in 0..=n / 3 {
        for j in i..=(n - i) / 2 {
            let k = n - i - j;
            pts.push([i as f64 / n as f64, j as f64 / n as f64, k as f64 / n as f64]);
        }
    }
    pts
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub simplex_n: usize,
    pub rho_samples: usize,
    /// Smallest ρ sampled, as a fraction of 1/C.
    pub rho_min_frac: f64,
    pub candidates: Vec<f64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { simplex_n: 400, rho_samples: 40, rho_min_frac: 1e-8, candidates: vec![10.0, 20.0, 50.0, 100.0] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub c: f64,
    /// min det A_ρ / (ρR⁵) over the grid with ρ ≤ R/C.
    pub min_ratio: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridPoint {
    pub r: [f64; 3],
    pub rho: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub c_sharp: f64,
    /// min det A_ρ/(ρR⁵) on the certified region.
    pub c_flat: f64,
    pub argmin: GridPoint,
    /// min λ_min(A_ρ)/(ρR) on the certified region.
    pub eig_ratio_min: f64,
    pub eig_argmin: GridPoint,
    /// Smallest leading minors over the certified region, each divided by
    /// its natural power of R.
    pub leading_minors_min: [f64; 3],
    /// min det A₀/R⁶ over the simplex.
    pub det0_min: f64,
    /// Fitted remainder constants: max(−quadratic)/R⁴ and max(−cubic)/R³.
    pub remainder_quadratic: f64,
    pub remainder_cubic: f64,
    /// max R·abc/(Q(a²+b²+c²)) over the simplex.
    pub product_ratio_sup: f64,
    pub attempts: Vec<Attempt>,
    pub simplex_n: usize,
    pub simplex_points: usize,
    pub rho_samples: usize,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

fn rho_grid(c: f64, opts: &CertifyOptions) -> Vec<f64> {
    let (hi, lo) = ((1.0 / c).ln(), (opts.rho_min_frac / c).ln());
    (0..opts.rho_samples).map(|k| (lo + (hi - lo) * k as f64 / (opts.rho_samples - 1) as f64).exp()).collect()
}

fn min_by_key<T: Copy>(items: impl Iterator<Item = (f64, T)>) -> (f64, T) {
    items.fold(None, |best: Option<(f64, T)>, x| match best {
        Some(b) if b.0 <= x.0 => Some(b),
        _ => Some(x),
    })
    .expect("nonempty")
}

/// Searches the candidates in increasing order for the smallest C_# with a
/// positive normalized determinant margin on the grid (R = 1).
pub fn certify_constants(opts: &CertifyOptions) -> Result<Certificate, PinchingError> {
    if opts.simplex_n < 3 || opts.rho_samples < 2 || opts.candidates.is_empty() || opts.candidates.iter().any(|&c| !(c > 1.0)) || !(opts.rho_min_frac > 0.0 && opts.rho_min_frac < 1.0) {
        return Err(PinchingError::Options(format!("{opts:?}")));
    }
    let pts = ordered_simplex(opts.simplex_n);
    let exps: Vec<DetExpansion> = pts.iter().map(|&r| det_expansion(r)).collect();
    let mut cands = opts.candidates.clone();
    cands.sort_by(f64::total_cmp);
    let mut attempts = Vec::new();
    let mut chosen = None;
    for &c in &cands {
        let rhos = rho_grid(c, opts);
        let (m, at) = min_by_key(pts.par_iter().zip(&exps).map(|(&r, e)| min_by_key(rhos.iter().map(|&rho| (e.eval(rho) / rho, GridPoint { r, rho })))).collect::<Vec<_>>().into_iter());
        attempts.push(Attempt { c, min_ratio: m });
        if m > 0.0 {
            chosen = Some((c, m, at, rhos));
            break;
        }
    }
    let Some((c_sharp, c_flat, argmin, rhos)) = chosen else {
        return Err(PinchingError::NoCertifiedConstant(attempts));
    };
    let per_point: Vec<((f64, GridPoint), [f64; 3])> = pts
        .par_iter()
        .map(|&r| {
            let mut minors = [f64::INFINITY; 3];
            let eig = min_by_key(rhos.iter().map(|&rho| {
                let m = a_matrix(r, rho);
                let lm = leading_minors(&m);
                for k in 0..3 {
                    minors[k] = minors[k].min(lm[k]);
                }
                (m.symmetric_eigenvalues().min() / rho, GridPoint { r, rho })
            }));
            (eig, minors)
        })
        .collect();
    let (eig_ratio_min, eig_argmin) = min_by_key(per_point.iter().map(|x| x.0));
    let leading_minors_min = per_point.iter().fold([f64::INFINITY; 3], |acc, x| [0, 1, 2].map(|k| acc[k].min(x.1[k])));
    let fold_max = |f: &dyn Fn(&DetExpansion, &[f64; 3]) -> f64| exps.iter().zip(&pts).map(|(e, r)| f(e, r)).fold(f64::NEG_INFINITY, f64::max);
    Ok(Certificate {
        c_sharp,
        c_flat,
        argmin,
        eig_ratio_min,
        eig_argmin,
        leading_minors_min,
        det0_min: exps.iter().map(|e| e.det0).fold(f64::INFINITY, f64::min),
        remainder_quadratic: fold_max(&|e, _| -e.quadratic).max(0.0),
        remainder_cubic: fold_max(&|e, _| -e.cubic).max(0.0),
        product_ratio_sup: fold_max(&|_, r| {
            let t = RicciTriple { r: *r, rho: 0.0 };
            product_inequality_check(&t).ratio
        }),
        attempts,
        simplex_n: opts.simplex_n,
        simplex_points: pts.len(),
        rho_samples: opts.rho_samples,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOptions {
    pub samples: usize,
    pub seed: u64,
    pub chunks: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { samples: 1_000_000, seed: 0x5eed, chunks: 64 }
    }
}

/// Worst cases over random triples. Relative quantities are divided by the
/// `scale` of the corresponding check.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub samples: usize,
    pub minor2_max_relative: f64,
    pub det0_min_relative: f64,
    pub pairwise_violations: [usize; 3],
    pub combined_violations: usize,
    pub product_ratio_sup: f64,
    pub product_ratio_argmax: [f64; 3],
    /// min (2S − hᵀA_ρh)/scale with Ric = diag(r), ρ = R/20.
    pub s_gap_commuting_min: f64,
    /// Same with Ric rotated away from the frame of h.
    pub s_gap_frame_min: f64,
}

/// Eigenvalues spread over six decades with exact zeros mixed in.
fn random_triple(rng: &mut ChaCha8Rng, i: usize) -> [f64; 3] {
    let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
    let mut r = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()].map(|x| x * scale);
    match i % 16 {
        0 => r[0] = 0.0,
        1 => {
            r[0] = 0.0;
            r[1] = 0.0;
        }
        2 => r[1] = r[0],
        _ => {}
    }
    r.sort_by(f64::total_cmp);
    if r[2] == 0.0 {
        r[2] = scale;
    }
    r
}

struct Partial {
    minor2: f64,
    det0: f64,
    pairwise: [usize; 3],
    combined: usize,
    ratio: (f64, [f64; 3]),
    gap_c: f64,
    gap_f: f64,
}

pub fn random_sweep(opts: &SweepOptions) -> Result<SweepReport, PinchingError> {
    if opts.chunks == 0 {
        return Err(PinchingError::Options("chunks must be positive".into()));
    }
    let per = opts.samples.div_ceil(opts.chunks);
    let parts: Vec<Partial> = (0..opts.chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k as u64);
            let mut p = Partial { minor2: 0.0, det0: f64::INFINITY, pairwise: [0; 3], combined: 0, ratio: (f64::NEG_INFINITY, [0.0; 3]), gap_c: f64::INFINITY, gap_f: f64::INFINITY };
            for i in (k * per)..((k + 1) * per).min(opts.samples) {
                let r = random_triple(&mut rng, i);
                let t0 = RicciTriple { r, rho: 0.0 };
                p.minor2 = p.minor2.max(minor2_identity_check(&t0).expect("ρ = 0").relative);
                let big_r = t0.scalar();
                p.det0 = p.det0.min(det_expansion(r).det0 / big_r.powi(6));
                let pm = product_inequality_check(&t0);
                let tol = 1e-12 * pm.scale;
                for j in 0..3 {
                    p.pairwise[j] += usize::from(pm.pairwise[j] < -tol);
                }
                p.combined += usize::from(pm.combined < -tol);
                if pm.ratio > p.ratio.0 {
                    p.ratio = (pm.ratio, r);
                }
                let h = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let t = RicciTriple { r, rho: big_r / 20.0 };
                let sb = s_quantity(h, &t);
                p.gap_c = p.gap_c.min(sb.gap / sb.scale);
                let rot = Rotation3::from_euler_angles(rng.gen_range(-3.2..3.2), rng.gen_range(-1.6..1.6), rng.gen_range(-3.2..3.2));
                let ric = rot.matrix() * Matrix3::from_diagonal(&Vector3::from(r)) * rot.matrix().transpose();
                let sf = s_quantity_frame(h, &ric, t.rho);
                p.gap_f = p.gap_f.min(sf.gap / sf.scale);
            }
            p
        })
        .collect();
    let mut out = SweepReport {
        samples: opts.samples,
        minor2_max_relative: 0.0,
        det0_min_relative: f64::INFINITY,
        pairwise_violations: [0; 3],
        combined_violations: 0,
        product_ratio_sup: f64::NEG_INFINITY,
        product_ratio_argmax: [0.0; 3],
        s_gap_commuting_min: f64::INFINITY,
        s_gap_frame_min: f64::INFINITY,
    };
    for p in parts {
        out.minor2_max_relative = out.minor2_max_relative.max(p.minor2);
        out.det0_min_relative = out.det0_min_relative.min(p.det0);
        for j in 0..3 {
            out.pairwise_violations[j] += p.pairwise[j];
        }
        out.combined_violations += p.combined;
        if p.ratio.0 > out.product_ratio_sup {
            out.product_ratio_sup = p.ratio.0;
            out.product_ratio_argmax = p.ratio.1;
        }
        out.s_gap_commuting_min = out.s_gap_commuting_min.min(p.gap_c);
        out.s_gap_frame_min = out.s_gap_frame_min.min(p.gap_f);
    }
    Ok(out)
}
