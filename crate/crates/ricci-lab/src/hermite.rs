//! Hermite analysis under the Gaussian weight `e^{−ξ²/4}`.
//!
//! The basis is `H_n(ξ/2)` (physicists' Hermite polynomials), orthogonal
//! in `𝓗 = L²(e^{−ξ²/4}dξ)` with `‖H_n(ξ/2)‖² = 2^{n+1} n! √π`. These are
//! the eigenfunctions of `𝓛f = −f'' + ½ξf' − f` with eigenvalues `n/2 − 1`.
//! `𝓗₊ = span{H₀, H₁}` collects the modes that grow forward in τ, `𝓗₀ =
//! span{H₂}` is neutral, and `𝓗₋` is the rest.

use crate::numerics::quad::GaussLegendre;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HermiteError {
    #[error("Gauss–Hermite node {index} did not converge")]
    Quadrature { index: usize },
    #[error("G is not available at τ = {tau} (data cover [{lo}, {hi}])")]
    WindowNotCovered { tau: f64, lo: f64, hi: f64 },
    #[error("need δ_j for j = {j}")]
    MissingDelta { j: usize },
    #[error("sequences too short: {len} < {min}")]
    TooShort { len: usize, min: usize },
    #[error("sequence lengths differ")]
    LengthMismatch,
}

/// Nodes and weights of `∫ e^{−x²} f(x) dx ≈ Σ w_k f(x_k)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Orthonormal Hermite polynomials `p̃_k` (weight `e^{−x²}`) for `k = n−1, n`.
fn orthonormal_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 0.0;
    let mut p1 = PI.powf(-0.25);
    for k in 0..n {
        let kf = k as f64;
        let p2 = (2.0 / (kf + 1.0)).sqrt() * x * p1 - (kf / (kf + 1.0)).sqrt() * p0;
        p0 = p1;
        p1 = p2;
    }
    (p0, p1)
}

impl GaussHermite {
    /// Golub–Welsch for starting values, then Newton on `p̃_n` with
    /// `p̃_n' = √(2n) p̃_{n−1}`; weights `1/(n p̃_{n−1}(x)²)`.
    pub fn new(n: usize) -> Result<Self, HermiteError> {
        assert!(n >= 1);
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let b = (k as f64 / 2.0).sqrt();
            jac[(k, k - 1)] = b;
            jac[(k - 1, k)] = b;
        }
        let mut nodes: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let nf = n as f64;
        let mut weights = Vec::with_capacity(n);
        for (i, x) in nodes.iter_mut().enumerate() {
            let mut ok = false;
            for _ in 0..50 {
                let (pm, p) = orthonormal_pair(n, *x);
                let dx = p / ((2.0 * nf).sqrt() * pm);
                *x -= dx;
                if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Err(HermiteError::Quadrature { index: i });
            }
            let (pm, _) = orthonormal_pair(n, *x);
            weights.push(1.0 / (nf * pm * pm));
        }
        // symmetrize
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = 0.5 * (nodes[j] - nodes[i]);
            let w = 0.5 * (weights[i] + weights[j]);
            nodes[i] = -x;
            nodes[j] = x;
            weights[i] = w;
            weights[j] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(GaussHermite { nodes, weights })
    }
}

/// `H_n(x)` by the three-term recurrence.
pub fn hermite_h(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return 1.0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `‖H_n(ξ/2)‖²_𝓗 = 2^{n+1} n! √π`.
pub fn hermite_norm_sq(n: usize) -> f64 {
    let mut v = 2.0 * PI.sqrt();
    for k in 1..=n {
        v *= 2.0 * k as f64;
    }
    v
}

/// Orthonormal basis values `e_0(ξ), …, e_{n_max}(ξ)` with
/// `e_n = H_n(ξ/2)/‖H_n(ξ/2)‖`.
pub fn orthonormal_basis(n_max: usize, xi: f64) -> Vec<f64> {
    let x = 0.5 * xi;
    let mut out = Vec::with_capacity(n_max + 1);
    let (mut p0, mut p1) = (0.0, PI.powf(-0.25));
    out.push(p1 / 2f64.sqrt());
    for k in 0..n_max {
        let kf = k as f64;
        let p2 = (2.0 / (kf + 1.0)).sqrt() * x * p1 - (kf / (kf + 1.0)).sqrt() * p0;
        p0 = p1;
        p1 = p2;
        out.push(p1 / 2f64.sqrt());
    }
    out
}

/// The drift operator on pointwise data `(f, f', f'')`.
pub fn drift_operator(xi: f64, f: f64, f1: f64, f2: f64) -> f64 {
    -f2 + 0.5 * xi * f1 - f
}

/// Default quadrature order and truncation.
pub const DEFAULT_ORDER: usize = 64;
pub const DEFAULT_N_MAX: usize = 32;

/// Weighted inner product by Gauss–Hermite after `x = ξ/2`.
#[derive(Debug, Clone)]
pub struct HermiteSpace {
    pub n_max: usize,
    xi: Vec<f64>,
    w: Vec<f64>,
    /// `basis[k][n] = e_n(ξ_k)`.
    basis: Vec<Vec<f64>>,
}

impl HermiteSpace {
    pub fn new(order: usize, n_max: usize) -> Result<Self, HermiteError> {
        let gh = GaussHermite::new(order)?;
        let xi: Vec<f64> = gh.nodes.iter().map(|x| 2.0 * x).collect();
        let w: Vec<f64> = gh.weights.iter().map(|w| 2.0 * w).collect();
        let basis = xi.iter().map(|&x| orthonormal_basis(n_max, x)).collect();
        Ok(HermiteSpace { n_max, xi, w, basis })
    }

    pub fn default_space() -> Result<Self, HermiteError> {
        Self::new(DEFAULT_ORDER, DEFAULT_N_MAX)
    }

    /// `∫ e^{−ξ²/4} f g dξ`; exact for polynomial `fg` of degree below
    /// twice the rule's order.
    pub fn inner<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(&self, f: F, g: G) -> f64 {
        self.xi.iter().zip(&self.w).map(|(&x, &w)| w * f(x) * g(x)).sum()
    }

    pub fn norm_sq<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.xi.iter().zip(&self.w).map(|(&x, &w)| w * f(x).powi(2)).sum()
    }

    /// Coefficients in `H_n(ξ/2)`, `n ≤ n_max`.
    pub fn coefficients<F: Fn(f64) -> f64>(&self, f: F) -> HermiteCoefficients {
        let vals: Vec<f64> = self.xi.iter().map(|&x| f(x)).collect();
        let coeffs = (0..=self.n_max)
            .map(|n| {
                let a: f64 = (0..self.xi.len()).map(|k| self.w[k] * vals[k] * self.basis[k][n]).sum();
                a / hermite_norm_sq(n).sqrt()
            })
            .collect();
        HermiteCoefficients { coeffs }
    }

    /// `(P₊f, P₀f, P₋f)` within the truncation space.
    pub fn project<F: Fn(f64) -> f64>(&self, f: F) -> Projection {
        self.coefficients(f).split()
    }

    /// `‖𝓛H − (n/2−1)H‖_𝓗` for `H = H_n(ξ/2)` with `𝓛` applied pointwise.
    pub fn eigen_defect(&self, n: usize) -> f64 {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        let h = HermiteCoefficients { coeffs: c };
        let lam = 0.5 * n as f64 - 1.0;
        self.norm_sq(|x| {
            let (f, f1, f2) = h.eval3(x);
            drift_operator(x, f, f1, f2) - lam * f
        })
        .sqrt()
    }

    /// `dist(f/‖f‖, span{H₂(ξ/2)})` in 𝓗.
    pub fn distance_to_neutral<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let nrm = self.norm_sq(&f);
        let a2: f64 = (0..self.xi.len()).map(|k| self.w[k] * f(self.xi[k]) * self.basis[k][2]).sum();
        (1.0 - a2 * a2 / nrm).max(0.0).sqrt()
    }
}

/// Expansion `f ≈ Σ c_n H_n(ξ/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermiteCoefficients {
    pub coeffs: Vec<f64>,
}

/// The three spectral components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    pub plus: HermiteCoefficients,
    pub zero: HermiteCoefficients,
    pub minus: HermiteCoefficients,
}

impl HermiteCoefficients {
    pub fn zeros(n_max: usize) -> Self {
        HermiteCoefficients { coeffs: vec![0.0; n_max + 1] }
    }

    /// `(f, f', f'')` using `d/dξ H_n(ξ/2) = n H_{n−1}(ξ/2)`.
    pub fn eval3(&self, xi: f64) -> (f64, f64, f64) {
        let x = 0.5 * xi;
        let n = self.coeffs.len();
        let h: Vec<f64> = (0..n).map(|k| hermite_h(k, x)).collect();
        let mut out = (0.0, 0.0, 0.0);
        for (k, &c) in self.coeffs.iter().enumerate() {
            out.0 += c * h[k];
            if k >= 1 {
                out.1 += c * k as f64 * h[k - 1];
            }
            if k >= 2 {
                out.2 += c * (k * (k - 1)) as f64 * h[k - 2];
            }
        }
        out
    }

    pub fn eval(&self, xi: f64) -> f64 {
        self.eval3(xi).0
    }

    /// `Σ c_n² ‖H_n(ξ/2)‖²`.
    pub fn parseval(&self) -> f64 {
        self.coeffs.iter().enumerate().map(|(n, c)| c * c * hermite_norm_sq(n)).sum()
    }

    fn keep(&self, range: std::ops::Range<usize>) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(n, &c)| if range.contains(&n) { c } else { 0.0 }).collect();
        HermiteCoefficients { coeffs }
    }

    pub fn split(&self) -> Projection {
        let n = self.coeffs.len();
        Projection { plus: self.keep(0..2), zero: self.keep(2..3), minus: self.keep(3..n.max(3)) }
    }

    pub fn add(&self, other: &Self) -> Self {
        HermiteCoefficients { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "coefficient"]).unwrap();
        for (n, c) in self.coeffs.iter().enumerate() {
            w.write_record([n.to_string(), format!("{c:e}")]).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// C² cutoff: 1 on `[−½, ½]`, 0 outside `[−1, 1]`, quintic smoothstep between.
pub fn cutoff(x: f64) -> f64 {
    let a = x.abs();
    if a <= 0.5 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        let t = 2.0 * (1.0 - a);
        t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

/// Per-window suprema and their tail suprema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaSequences {
    /// Index of the first window, `[−j₀−1, −j₀]`.
    pub j0: usize,
    pub gamma: Vec<f64>,
    pub gamma_plus: Vec<f64>,
    pub gamma_zero: Vec<f64>,
    pub gamma_minus: Vec<f64>,
    /// `Γ_k = sup_{j ≥ k} γ_j` over the available windows.
    pub big_gamma: Vec<f64>,
    pub big_plus: Vec<f64>,
    pub big_zero: Vec<f64>,
    pub big_minus: Vec<f64>,
    pub delta: Vec<f64>,
    /// Largest of `max(Σ/γ, γ/Σ)` with `Σ = γ⁺ + γ⁰ + γ⁻` over windows with `γ > 0`.
    pub equivalence_constant: f64,
}

fn tail_sup(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] = out[i].max(out[i + 1]);
    }
    out
}

/// Options for [`gamma_sequences`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaOptions {
    /// Sample times per window, endpoints included.
    pub tau_samples: usize,
    /// Gauss–Legendre panels on `[−R, R]`.
    pub panels: usize,
    /// The weight is below 1e-170 beyond this `|ξ|`.
    pub xi_cap: f64,
}

impl Default for GammaOptions {
    fn default() -> Self {
        GammaOptions { tau_samples: 11, panels: 240, xi_cap: 40.0 }
    }
}

/// `γ_j, γ_j^±, γ_j^0` for windows `j = j0, …, j0 + deltas.len() − 1`.
///
/// `g(ξ, τ)` must be defined for `τ ∈ tau_cover`. For each sampled time the
/// truncated function `G χ(δ_j^{1/100} ξ)` on `|ξ| ≤ δ_j^{−1/100}` is
/// projected by composite Gauss–Legendre quadrature (the cutoff is only C²,
/// so Gauss–Hermite loses its exactness); `P₋` is the exact complement
/// of `P₊ + P₀`.
pub fn gamma_sequences<G: Fn(f64, f64) -> f64>(g: G, tau_cover: (f64, f64), j0: usize, deltas: &[f64], opts: &GammaOptions) -> Result<GammaSequences, HermiteError> {
    let m = deltas.len();
    let gl = GaussLegendre::new(8);
    let (mut gam, mut gp, mut gz, mut gm) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut equiv: f64 = 1.0;
    for (idx, &delta) in deltas.iter().enumerate() {
        let j = (j0 + idx) as f64;
        let (lo, hi) = (-j - 1.0, -j);
        for tau in [lo, hi] {
            if tau < tau_cover.0 - 1e-12 || tau > tau_cover.1 + 1e-12 {
                return Err(HermiteError::WindowNotCovered { tau, lo: tau_cover.0, hi: tau_cover.1 });
            }
        }
        let scale = delta.powf(0.01);
        let r = (1.0 / scale).min(opts.xi_cap);
        let breaks: Vec<f64> = (0..=opts.panels).map(|i| -r + 2.0 * r * i as f64 / opts.panels as f64).collect();
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        for w in breaks.windows(2) {
            let (x, wt) = gl.nodes_weights(w[0], w[1]);
            xs.extend(x);
            ws.extend(wt.into_iter().zip(&xs[xs.len() - 8..]).map(|(wt, &x)| wt * (-0.25 * x * x).exp()));
        }
        let e: Vec<[f64; 3]> = xs.iter().map(|&x| {
            let b = orthonormal_basis(2, x);
            [b[0], b[1], b[2]]
        }).collect();
        let (mut sp, mut sz, mut sm, mut st) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        let ns = opts.tau_samples.max(2);
        for k in 0..ns {
            let tau = lo + (hi - lo) * k as f64 / (ns - 1) as f64;
            let mut a = [0.0; 3];
            let mut total = 0.0;
            for i in 0..xs.len() {
                let v = g(xs[i], tau) * cutoff(scale * xs[i]);
                total += ws[i] * v * v;
                for n in 0..3 {
                    a[n] += ws[i] * v * e[i][n];
                }
            }
            let plus = a[0] * a[0] + a[1] * a[1];
            let zero = a[2] * a[2];
            let minus = (total - plus - zero).max(0.0);
            st = st.max(total);
            sp = sp.max(plus);
            sz = sz.max(zero);
            sm = sm.max(minus);
        }
        gam[idx] = st;
        gp[idx] = sp;
        gz[idx] = sz;
        gm[idx] = sm;
        if st > 0.0 {
            let sum = sp + sz + sm;
            equiv = equiv.max(sum / st).max(st / sum);
        }
    }
    Ok(GammaSequences {
        j0,
        big_gamma: tail_sup(&gam),
        big_plus: tail_sup(&gp),
        big_zero: tail_sup(&gz),
        big_minus: tail_sup(&gm),
        gamma: gam,
        gamma_plus: gp,
        gamma_zero: gz,
        gamma_minus: gm,
        delta: deltas.to_vec(),
        equivalence_constant: equiv,
    })
}

impl GammaSequences {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["j", "delta", "gamma", "gamma_plus", "gamma_zero", "gamma_minus", "Gamma", "Gamma_plus", "Gamma_zero", "Gamma_minus"]).unwrap();
        for i in 0..self.gamma.len() {
            let row = [
                (self.j0 + i).to_string(),
                format!("{:e}", self.delta[i]),
                format!("{:e}", self.gamma[i]),
                format!("{:e}", self.gamma_plus[i]),
                format!("{:e}", self.gamma_zero[i]),
                format!("{:e}", self.gamma_minus[i]),
                format!("{:e}", self.big_gamma[i]),
                format!("{:e}", self.big_plus[i]),
                format!("{:e}", self.big_zero[i]),
                format!("{:e}", self.big_minus[i]),
            ];
            w.write_record(row).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// Outcome of the dominance test.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "label", rename_all = "snake_case")]
pub enum Dominance {
    /// `Γ⁰ + Γ⁻ ≤ o(1) Γ⁺`.
    PlusDominated { ratio: f64 },
    /// `Γ⁺ + Γ⁻ ≤ o(1) Γ⁰`.
    ZeroDominated { ratio: f64 },
    /// Neither ratio is small and decreasing over the tail of the data.
    Inconclusive { plus_ratio: f64, zero_ratio: f64 },
    /// A structural property or recursion inequality fails at index `k`.
    HypothesesViolated { k: usize, reason: String },
}

/// Parameters of the dominance test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceOptions {
    /// Constant of the recursion inequalities.
    pub c: f64,
    /// A ratio below `eps` at the end of the data declares dominance.
    pub eps: f64,
    /// Relative slack when checking monotonicity and recursions.
    pub slack: f64,
    /// Ratio changes below this are treated as roundoff in the trend test.
    pub noise_floor: f64,
}

impl Default for DominanceOptions {
    fn default() -> Self {
        DominanceOptions { c: 1.0, eps: 0.1, slack: 1e-12, noise_floor: 1e-10 }
    }
}

pub const MIN_SEQUENCE_LEN: usize = 10;

/// Check the recursions
///
/// - `Γ⁺_{k+1} ≤ e⁻¹Γ⁺_k + Cδ_k^{1/200}Γ_k`,
/// - `|Γ⁰_{k+1} − Γ⁰_k| ≤ Cδ_k^{1/200}Γ_k`,
/// - `Γ⁻_{k+1} ≥ eΓ⁻_k − Cδ_k^{1/200}Γ_k`,
///
/// and that every sequence is nonincreasing and each part is at most `Γ`.
/// Then decide which alternative the last third of the data exhibits.
pub fn merle_zaag_classify(plus: &[f64], zero: &[f64], minus: &[f64], total: &[f64], delta: &[f64], opts: &DominanceOptions) -> Result<Dominance, HermiteError> {
    let n = plus.len();
    if zero.len() != n || minus.len() != n || total.len() != n || delta.len() != n {
        return Err(HermiteError::LengthMismatch);
    }
    if n < MIN_SEQUENCE_LEN {
        return Err(HermiteError::TooShort { len: n, min: MIN_SEQUENCE_LEN });
    }
    let tol = |x: f64| opts.slack * x.abs().max(f64::MIN_POSITIVE);
    let e = std::f64::consts::E;
    for k in 0..n {
        for (name, s) in [("Γ⁺", plus), ("Γ⁰", zero), ("Γ⁻", minus)] {
            if s[k] > total[k] + tol(total[k]) {
                return Ok(Dominance::HypothesesViolated { k, reason: format!("{name} exceeds Γ") });
            }
        }
        if k + 1 == n {
            break;
        }
        for (name, s) in [("Γ", total), ("Γ⁺", plus), ("Γ⁰", zero), ("Γ⁻", minus)] {
            if s[k + 1] > s[k] + tol(s[k]) {
                return Ok(Dominance::HypothesesViolated { k, reason: format!("{name} increases") });
            }
        }
        let err = opts.c * delta[k].powf(1.0 / 200.0) * total[k];
        if plus[k + 1] > plus[k] / e + err + tol(plus[k]) {
            return Ok(Dominance::HypothesesViolated { k, reason: "Γ⁺ recursion".into() });
        }
        if (zero[k + 1] - zero[k]).abs() > err + tol(zero[k]) {
            return Ok(Dominance::HypothesesViolated { k, reason: "Γ⁰ recursion".into() });
        }
        if minus[k + 1] < e * minus[k] - err - tol(minus[k]) {
            return Ok(Dominance::HypothesesViolated { k, reason: "Γ⁻ recursion".into() });
        }
    }
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { f64::INFINITY };
    let rp: Vec<f64> = (0..n).map(|k| ratio(zero[k] + minus[k], plus[k])).collect();
    let rz: Vec<f64> = (0..n).map(|k| ratio(plus[k] + minus[k], zero[k])).collect();
    let tail = n - n / 3;
    let settles = |r: &[f64]| {
        let t = &r[tail..];
        t.last().is_some_and(|&v| v <= opts.eps) && t.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + opts.noise_floor)
    };
    Ok(if settles(&rp) {
        Dominance::PlusDominated { ratio: rp[n - 1] }
    } else if settles(&rz) {
        Dominance::ZeroDominated { ratio: rz[n - 1] }
    } else {
        Dominance::Inconclusive { plus_ratio: rp[n - 1], zero_ratio: rz[n - 1] }
    })
}

/// Classify a [`GammaSequences`] table.
pub fn classify_sequences(s: &GammaSequences, opts: &DominanceOptions) -> Result<Dominance, HermiteError> {
    merle_zaag_classify(&s.big_plus, &s.big_zero, &s.big_minus, &s.big_gamma, &s.delta, opts)
}
