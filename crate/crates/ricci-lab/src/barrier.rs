//! The barrier ψ_a: the correction ζ, the inner correction β_a, the
//! piecewise assembly and the inequalities it has to satisfy.
//!
//! `ζ` solves `d/ds[(s⁻²−1)⁻¹ζ] = (s⁻²−1)⁻²(2s⁻³ − 5s⁻⁶ − ½s²⁷)`. The right
//! side is `K(s)/(s²(1+s)²) − (7/8)(1−s)⁻²` with a polynomial `K`, so
//! `ζ(s) = (1+s)s⁻²(−7/8 + (1−s)W(s))` where `W' = K/(s²(1+s)²)` and
//! `W(1) = 0` fixes the free multiple of `s⁻² − 1`.

use crate::numerics::interp::QuinticHermite;
use crate::numerics::jet::Jet;
use crate::numerics::ode::{dopri5, Dopri5Options, Flow, OdeError};
use crate::numerics::quad::GaussLegendre;
use crate::numerics::roots::bisect;
use crate::soliton::{SolitonError, SolitonProfile};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BarrierError {
    #[error("grid must lie in (0, 9/8]: {0}")]
    Grid(String),
    #[error("s = {s} outside the barrier domain [{lo}, {hi}]")]
    OutOfDomain { s: f64, lo: f64, hi: f64 },
    #[error("soliton profile: {0}")]
    Soliton(#[from] SolitonError),
    #[error("β integration failed: {0}")]
    Beta(#[from] OdeError),
    #[error("junction jump {jump:e} exceeds tolerance")]
    Junction { jump: f64 },
    #[error("no N ≤ {max_n} makes D[ψ_a] negative for all tested a")]
    SearchExhausted { max_n: u32 },
    #[error("ψ_a = {value:e} ≤ 0 at s = {s}")]
    NonPositive { s: f64, value: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// Right end of the barrier domain.
pub const S_MAX: f64 = 9.0 / 8.0;
/// Relative tolerance on the C¹ junction.
pub const JUNCTION_TOL: f64 = 1e-8;

/// Coefficients (ascending) of `K(s) = [2s³ − 5 − ½s³³ + (7/8)s²(1+s)²]/(1−s)²`.
fn k_polynomial() -> Vec<f64> {
    let mut m = vec![0.0; 34];
    m[3] += 2.0;
    m[0] -= 5.0;
    m[33] -= 0.5;
    // (7/8)(s² + 2s³ + s⁴)
    m[2] += 0.875;
    m[3] += 1.75;
    m[4] += 0.875;
    // divide twice by (s − 1); (1−s)² = (s−1)²
    let divide = |p: &[f64]| -> (Vec<f64>, f64) {
        let n = p.len() - 1;
        let mut q = vec![0.0; n];
        let mut carry = p[n];
        for k in (0..n).rev() {
            q[k] = carry;
            carry = p[k] + carry;
        }
        (q, carry)
    };
    let (q1, rem1) = divide(&m);
    let (q2, rem2) = divide(&q1);
    debug_assert!(rem1.abs() < 1e-12 && rem2.abs() < 1e-12);
    q2
}

/// The correction function ζ on `(s_min, 9/8]`.
#[derive(Debug, Clone)]
pub struct ZetaFunction {
    s_grid: Vec<f64>,
    /// `W(s)` at the grid nodes; `W(1) = 0`.
    w_reg: Vec<f64>,
    zeta: Vec<f64>,
    k: Vec<f64>,
    gl: GaussLegendre,
}

/// Description of the integration constant convention.
pub const ZETA_ANTIDERIVATIVE_BASE: &str = "regularized antiderivative vanishing at s = 1";

impl ZetaFunction {
    /// Default grid: `n_log` log-spaced nodes on `[s_min, 1]` and `n_right`
    /// uniform nodes on `[1, 9/8]`.
    pub fn default_grid(s_min: f64, n_log: usize, n_right: usize) -> Vec<f64> {
        let mut g: Vec<f64> = (0..n_log).map(|i| s_min * (1.0 / s_min).powf(i as f64 / (n_log - 1) as f64)).collect();
        *g.last_mut().unwrap() = 1.0;
        for i in 1..=n_right {
            g.push(1.0 + (S_MAX - 1.0) * i as f64 / n_right as f64);
        }
        g
    }

    /// `Q_reg(s) = K(s)/(s²(1+s)²)` as a jet.
    fn q_reg(&self, s: Jet) -> Jet {
        let mut acc = Jet::constant(0.0);
        for &c in self.k.iter().rev() {
            acc = acc * s + c;
        }
        let d = s * (1.0 + s);
        acc / (d * d)
    }

    fn q_reg_value(&self, s: f64) -> f64 {
        self.q_reg(Jet::constant(s)).v
    }

    pub fn s_grid(&self) -> &[f64] {
        &self.s_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.zeta
    }

    pub fn s_min(&self) -> f64 {
        self.s_grid[0]
    }

    /// `W(s) = ∫_1^s Q_reg`.
    fn w_at(&self, s: f64) -> f64 {
        let i = match self.s_grid.binary_search_by(|p| p.partial_cmp(&s).unwrap()) {
            Ok(i) => return self.w_reg[i],
            Err(i) => i.clamp(1, self.s_grid.len() - 1) - 1,
        };
        // nearest node toward s = 1 keeps the remainder interval short
        let (base, node) = if self.s_grid[i] < 1.0 { (self.w_reg[i + 1], self.s_grid[i + 1]) } else { (self.w_reg[i], self.s_grid[i]) };
        base + self.gl.integrate(|x| self.q_reg_value(x), node, s)
    }

    /// `(ζ, ζ', ζ'')` at `s`.
    pub fn eval3(&self, s: f64) -> Result<(f64, f64, f64), BarrierError> {
        if !(s >= self.s_min() && s <= S_MAX) {
            return Err(BarrierError::OutOfDomain { s, lo: self.s_min(), hi: S_MAX });
        }
        let w = self.w_at(s);
        let q = self.q_reg(Jet::var(s));
        // B = −7/8 + (1−s)W with B' = −W + (1−s)Q, B'' = −2Q + (1−s)Q'
        let b = Jet::new(-0.875 + (1.0 - s) * w, -w + (1.0 - s) * q.v, -2.0 * q.v + (1.0 - s) * q.d1);
        let sj = Jet::var(s);
        let e = (1.0 + sj) / (sj * sj);
        let z = e * b;
        Ok((z.v, z.d1, z.d2))
    }

    pub fn eval(&self, s: f64) -> Result<f64, BarrierError> {
        Ok(self.eval3(s)?.0)
    }

    /// Least-squares value of `lim s³ζ(s)` from `s³ζ = c0 + c1 s + c2 s²`
    /// on `[lo, hi]`.
    pub fn small_s_coefficient(&self, lo: f64, hi: f64, samples: usize) -> Result<f64, BarrierError> {
        let xs: Vec<f64> = (0..samples).map(|i| lo * (hi / lo).powf(i as f64 / (samples - 1) as f64)).collect();
        let ys: Vec<f64> = xs.iter().map(|&s| self.eval(s).map(|z| s * s * s * z)).collect::<Result<_, _>>()?;
        let c = crate::numerics::fit::linear_least_squares(&xs, &ys, &[&|_| 1.0, &|s| s, &|s| s * s])
            .ok_or_else(|| BarrierError::Parameter("degenerate fit".into()))?;
        Ok(c[0])
    }
}

/// Build ζ on `grid`, which must contain 1 and lie in `(0, 9/8]`.
pub fn build_zeta(grid: &[f64]) -> Result<ZetaFunction, BarrierError> {
    if grid.len() < 3 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BarrierError::Grid("need ≥ 3 strictly increasing nodes".into()));
    }
    if grid[0] <= 0.0 || *grid.last().unwrap() > S_MAX {
        return Err(BarrierError::Grid(format!("range [{}, {}]", grid[0], grid.last().unwrap())));
    }
    let i1 = grid.iter().position(|&s| s == 1.0).ok_or_else(|| BarrierError::Grid("s = 1 must be a node".into()))?;
    let mut z = ZetaFunction { s_grid: grid.to_vec(), w_reg: vec![0.0; grid.len()], zeta: vec![0.0; grid.len()], k: k_polynomial(), gl: GaussLegendre::new(12) };
    for i in i1 + 1..grid.len() {
        z.w_reg[i] = z.w_reg[i - 1] + z.gl.integrate(|x| z.q_reg_value(x), grid[i - 1], grid[i]);
    }
    for i in (0..i1).rev() {
        z.w_reg[i] = z.w_reg[i + 1] - z.gl.integrate(|x| z.q_reg_value(x), grid[i], grid[i + 1]);
    }
    for i in 0..grid.len() {
        let s = grid[i];
        z.zeta[i] = (1.0 + s) / (s * s) * (-0.875 + (1.0 - s) * z.w_reg[i]);
    }
    Ok(z)
}

/// Coefficient of `(1−s)⁻²` in the right-hand side of the ζ equation,
/// read off from `(1−s)²·rhs` as `s → 1`.
pub fn zeta_rhs_singular_coefficient() -> f64 {
    let n = |s: f64| 2.0 * s - 5.0 / (s * s) - 0.5 * s.powi(31);
    n(1.0) / 4.0
}

/// Tabulated solution of the linear β_a equation on `[r_*, N]`.
#[derive(Debug, Clone)]
pub struct BetaSolution {
    spline: QuinticHermite,
    pub a: f64,
    pub n_junction: f64,
}

/// `β''` from the linear equation.
fn beta_second(r: f64, b: f64, b1: f64, phi: (f64, f64, f64)) -> f64 {
    let (f, f1, f2) = phi;
    let r2 = r * r;
    (-1.0 - f2 * b + f1 * b1 - (1.0 - f) * (r * b1 + 2.0 * b) / r2 + b * (r * f1 + 2.0 * f) / r2) / f
}

impl BetaSolution {
    /// `(β, β', β'')` at `r ∈ [r_*, N]`.
    pub fn eval3(&self, r: f64) -> (f64, f64, f64) {
        self.spline.eval3(r)
    }

    pub fn r_grid(&self) -> &[f64] {
        self.spline.nodes()
    }

    pub fn values(&self) -> &[f64] {
        self.spline.values()
    }

    /// Residual `φβ'' + φ''β − φ'β' + … + 1` at `r` using interpolated β,
    /// divided by the summed magnitude of its terms.
    pub fn residual(&self, soliton: &SolitonProfile, r: f64) -> Result<f64, BarrierError> {
        let (b, b1, b2) = self.eval3(r);
        let (f, f1, f2) = soliton.eval3(r)?;
        let r2 = r * r;
        let terms = [f * b2, f2 * b, -f1 * b1, (1.0 - f) * (r * b1 + 2.0 * b) / r2, -b * (r * f1 + 2.0 * f) / r2, 1.0];
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        Ok(terms.iter().sum::<f64>() / scale)
    }
}

/// Integrate the β_a equation backward from `r = N` to `r = r_*`.
pub fn build_beta(a: f64, n_junction: f64, zeta: &ZetaFunction, soliton: &SolitonProfile) -> Result<BetaSolution, BarrierError> {
    let r_star = soliton.r_star;
    if !(n_junction > r_star) {
        return Err(BarrierError::Parameter(format!("N = {n_junction} must exceed r_* = {r_star}")));
    }
    if n_junction / a < zeta.s_min() {
        return Err(BarrierError::Parameter(format!("a = {a} too large for the ζ grid")));
    }
    let (z, z1, _) = zeta.eval3(n_junction / a)?;
    let b0 = a.powi(-3) * z - 1.0 / a;
    let b1 = a.powi(-4) * z1;
    let opts = Dopri5Options { rtol: 1e-13, atol: 1e-15, h_max: 2e-3 * n_junction, ..Default::default() };
    let mut nodes: Vec<(f64, f64, f64)> = vec![(n_junction, b0, b1)];
    let mut eval_err = None;
    let rhs = |r: f64, y: &[f64; 2]| -> [f64; 2] {
        match soliton.eval3(r) {
            Ok(phi) => [y[1], beta_second(r, y[0], y[1], phi)],
            Err(_) => [f64::NAN, f64::NAN],
        }
    };
    dopri5(rhs, n_junction, [b0, b1], r_star, &opts, |r, y| {
        if !y[0].is_finite() {
            eval_err = Some(r);
            return Flow::Stop;
        }
        nodes.push((r, y[0], y[1]));
        Flow::Continue
    })?;
    if let Some(r) = eval_err {
        return Err(BarrierError::Beta(OdeError::NonFinite { t: r }));
    }
    nodes.reverse();
    let mut x = Vec::with_capacity(nodes.len());
    let mut f = Vec::with_capacity(nodes.len());
    let mut d1 = Vec::with_capacity(nodes.len());
    let mut d2 = Vec::with_capacity(nodes.len());
    for (r, b, bp) in nodes {
        if x.last().is_some_and(|&l: &f64| r <= l) {
            continue;
        }
        let phi = soliton.eval3(r)?;
        x.push(r);
        f.push(b);
        d1.push(bp);
        d2.push(beta_second(r, b, bp, phi));
    }
    Ok(BetaSolution { spline: QuinticHermite::new(x, f, d1, d2), a, n_junction })
}

/// The assembled barrier
/// `ψ_a(s) = φ(as) − a⁻² + a⁻⁴ζ(s)` on `[N/a, 9/8]`,
/// `ψ_a(s) = φ(as) + a⁻¹β_a(as)` on `[r_*/a, N/a]`.
#[derive(Debug, Clone)]
pub struct BarrierFunction {
    pub a: f64,
    pub n_junction: f64,
    pub r_star: f64,
    pub zeta: Arc<ZetaFunction>,
    pub beta: BetaSolution,
    pub soliton: Arc<SolitonProfile>,
}

/// Relative value and derivative jumps at the junction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionReport {
    pub value_jump: f64,
    pub derivative_jump: f64,
}

/// Build β_a and assemble ψ_a, checking the C¹ junction.
pub fn assemble_psi(a: f64, n_junction: f64, zeta: Arc<ZetaFunction>, soliton: Arc<SolitonProfile>) -> Result<BarrierFunction, BarrierError> {
    let beta = build_beta(a, n_junction, &zeta, &soliton)?;
    let psi = BarrierFunction { a, n_junction, r_star: soliton.r_star, zeta, beta, soliton };
    let j = psi.junction_jumps()?;
    let worst = j.value_jump.max(j.derivative_jump);
    if !(worst <= JUNCTION_TOL) {
        return Err(BarrierError::Junction { jump: worst });
    }
    Ok(psi)
}

impl BarrierFunction {
    pub fn s_lo(&self) -> f64 {
        self.r_star / self.a
    }

    pub fn s_junction(&self) -> f64 {
        self.n_junction / self.a
    }

    fn check(&self, s: f64) -> Result<(), BarrierError> {
        if s >= self.s_lo() * (1.0 - 1e-14) && s <= S_MAX {
            Ok(())
        } else {
            Err(BarrierError::OutOfDomain { s, lo: self.s_lo(), hi: S_MAX })
        }
    }

    /// Outer formula, valid for `s ≥ N/a`.
    pub fn outer3(&self, s: f64) -> Result<(f64, f64, f64), BarrierError> {
        Ok(outer_split(self.a, s, &self.zeta, &self.soliton)?.total())
    }

    /// Inner formula, valid for `s ≤ N/a`.
    pub fn inner3(&self, s: f64) -> Result<(f64, f64, f64), BarrierError> {
        let a = self.a;
        let r = (a * s).max(self.r_star);
        let (f, f1, f2) = self.soliton.eval3(r)?;
        let (b, b1, b2) = self.beta.eval3(r);
        Ok((f + b / a, a * f1 + b1, a * a * f2 + a * b2))
    }

    /// `(ψ, ψ', ψ'')` at `s`.
    pub fn eval3(&self, s: f64) -> Result<(f64, f64, f64), BarrierError> {
        self.check(s)?;
        if s >= self.s_junction() {
            self.outer3(s)
        } else {
            self.inner3(s)
        }
    }

    pub fn psi(&self, s: f64) -> Result<f64, BarrierError> {
        Ok(self.eval3(s)?.0)
    }

    pub fn junction_jumps(&self) -> Result<JunctionReport, BarrierError> {
        let s = self.s_junction();
        let o = self.outer3(s)?;
        let i = self.inner3(s)?;
        Ok(JunctionReport { value_jump: (o.0 - i.0).abs() / o.0.abs(), derivative_jump: (o.1 - i.1).abs() / o.1.abs() })
    }

    /// `D[ψ](s) = ψψ'' − ½ψ'² + s⁻²(1−ψ)(sψ' + 2ψ) − sψ'`.
    pub fn barrier_operator(&self, s: f64) -> Result<f64, BarrierError> {
        self.check(s)?;
        if s >= self.s_junction() {
            Ok(outer_split(self.a, s, &self.zeta, &self.soliton)?.operator(s))
        } else {
            Ok(operator_d(s, self.inner3(s)?))
        }
    }

    /// `ψ(s) − a⁻²(s⁻² − 1)`, exact in the outer piece.
    pub fn excess_over_cylinder(&self, s: f64) -> Result<f64, BarrierError> {
        self.check(s)?;
        if s >= self.s_junction() {
            Ok(outer_split(self.a, s, &self.zeta, &self.soliton)?.rest.0)
        } else {
            Ok(self.inner3(s)?.0 - (s.powi(-2) - 1.0) / (self.a * self.a))
        }
    }

    /// Sample `D[ψ]` on `n` points of `[lo, hi]` (log-spaced).
    pub fn operator_samples(&self, lo: f64, hi: f64, n: usize) -> Result<Vec<(f64, f64)>, BarrierError> {
        log_grid(lo, hi, n).into_iter().map(|s| Ok((s, self.barrier_operator(s)?))).collect()
    }
}

/// The barrier operator applied to pointwise data `(ψ, ψ', ψ'')`.
pub fn operator_d(s: f64, p: (f64, f64, f64)) -> f64 {
    let (f, f1, f2) = p;
    f * f2 - 0.5 * f1 * f1 + (1.0 - f) * (s * f1 + 2.0 * f) / (s * s) - s * f1
}

/// Outer piece written as `ε(s⁻² − 1) + R(s)` with `ε = a⁻²` and
/// `R = φ(as) − (as)⁻² + a⁻⁴ζ(s)`.
#[derive(Debug, Clone, Copy)]
struct OuterSplit {
    eps: f64,
    s: f64,
    rest: (f64, f64, f64),
}

impl OuterSplit {
    fn cylinder(s: f64) -> (f64, f64, f64) {
        ((1.0 - s) * (1.0 + s) / (s * s), -2.0 / (s * s * s), 6.0 / (s * s * s * s))
    }

    fn total(&self) -> (f64, f64, f64) {
        let (h, h1, h2) = Self::cylinder(self.s);
        (self.eps * h + self.rest.0, self.eps * h1 + self.rest.1, self.eps * h2 + self.rest.2)
    }

    /// `D = L₀[R] + Q[ψ]`: the linear part kills `s⁻² − 1` exactly.
    fn operator(&self, s: f64) -> f64 {
        let (r0, r1, _) = self.rest;
        let lin = (1.0 / s - s) * r1 + 2.0 * r0 / (s * s);
        let (f, f1, f2) = self.total();
        lin + f * f2 - 0.5 * f1 * f1 - f * (s * f1 + 2.0 * f) / (s * s)
    }
}

fn outer_split(a: f64, s: f64, zeta: &ZetaFunction, soliton: &SolitonProfile) -> Result<OuterSplit, BarrierError> {
    let (e, e1, e2) = soliton.eval3_excess(a * s)?;
    let (z, z1, z2) = zeta.eval3(s)?;
    let a4 = a.powi(-4);
    Ok(OuterSplit { eps: a.powi(-2), s, rest: (e + a4 * z, a * e1 + a4 * z1, a * a * e2 + a4 * z2) })
}

/// `n ≥ 2` log-spaced points on `[lo, hi]`, endpoints exact.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

/// Largest `D[·]` of the outer formula on `[N/a, 9/8]`.
fn outer_max(a: f64, n: f64, zeta: &ZetaFunction, soliton: &SolitonProfile, samples: usize) -> Result<f64, BarrierError> {
    let mut worst = f64::NEG_INFINITY;
    for s in log_grid(n / a, S_MAX, samples) {
        worst = worst.max(outer_split(a, s, zeta, soliton)?.operator(s));
    }
    Ok(worst)
}

/// Smallest integer `N > r_*` such that the outer formula has `D < 0` on
/// `[N/a, 9/8]` for every tested `a ≥ a_min`.
pub fn find_n(a_min: f64, a_values: &[f64], zeta: &ZetaFunction, soliton: &SolitonProfile, samples: usize, max_n: u32) -> Result<u32, BarrierError> {
    let tested: Vec<f64> = a_values.iter().copied().filter(|&a| a >= a_min).collect();
    if tested.is_empty() {
        return Err(BarrierError::Parameter(format!("no tested a ≥ {a_min}")));
    }
    let start = soliton.r_star.floor() as u32 + 1;
    for n in start..=max_n {
        let mut ok = true;
        for &a in &tested {
            if outer_max(a, n as f64, zeta, soliton, samples)? >= 0.0 {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(n);
        }
    }
    Err(BarrierError::SearchExhausted { max_n })
}

/// Outcome of the positivity checks.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub theta: f64,
    /// `2 + ζ(1)`.
    pub two_plus_zeta1: f64,
    /// Smallest `a⁴(ψ − a⁻²(s⁻²−1)) − 1/16` on `[1−θ, 1+θ]`.
    pub inequality_margin: f64,
    /// Smallest `a⁴ψ − 1/32` on `[r_*/a, 1 + a⁻²/100]`.
    pub floor_margin: f64,
    pub passed: bool,
}

/// Largest `θ ≤ 1/8` with `2s⁻⁴ + ζ(s) ≥ 1/8` on `[1−θ, 1+θ]`, scanning
/// `n` steps outward and refining the first crossing by bisection.
pub fn find_theta(zeta: &ZetaFunction, n: usize) -> Result<f64, BarrierError> {
    let g = |s: f64| zeta.eval(s).map(|z| 2.0 * s.powi(-4) + z - 0.125);
    let cap = S_MAX - 1.0;
    let mut prev = 0.0;
    for k in 1..=n {
        let th = cap * k as f64 / n as f64;
        let lo = g(1.0 - th)?;
        let hi = g(1.0 + th)?;
        if lo < 0.0 || hi < 0.0 {
            let f = |t: f64| g(1.0 - t).unwrap_or(-1.0).min(g(1.0 + t).unwrap_or(-1.0));
            return Ok(bisect(f, prev, th, 1e-14).unwrap_or(prev));
        }
        prev = th;
    }
    Ok(cap)
}

/// Check the positivity inequalities on `samples` points per interval.
pub fn verify_positivity(psi: &BarrierFunction, theta_steps: usize, samples: usize) -> Result<PositivityReport, BarrierError> {
    let a = psi.a;
    let theta = find_theta(&psi.zeta, theta_steps)?;
    let a4 = a.powi(4);
    let mut m1 = f64::INFINITY;
    for k in 0..samples {
        let s = 1.0 - theta + 2.0 * theta * k as f64 / (samples - 1) as f64;
        m1 = m1.min(a4 * psi.excess_over_cylinder(s)? - 1.0 / 16.0);
    }
    let mut m2 = f64::INFINITY;
    for s in log_grid(psi.s_lo(), 1.0 + 0.01 / (a * a), samples) {
        m2 = m2.min(a4 * psi.psi(s)? - 1.0 / 32.0);
    }
    let two_plus_zeta1 = 2.0 + psi.zeta.eval(1.0)?;
    Ok(PositivityReport { theta, two_plus_zeta1, inequality_margin: m1, floor_margin: m2, passed: m1 >= 0.0 && m2 >= 0.0 && theta > 0.0 })
}

/// `∫_{r_*/a}^{1/4} ψ_a^{−1/2} ds` with the ratio to `a`, compared against
/// the cylinder level `ψ_c = a⁻²(s⁻²−1) + a⁻⁴/16`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapIntegral {
    pub integral: f64,
    pub ratio: f64,
    /// Closed form `(a/k)[√(1−k s₀²) − √(1−k/16)]`, `k = 1 − a⁻²/16`.
    pub cylinder_level: f64,
    /// The same cylinder integral by quadrature.
    pub cylinder_quadrature: f64,
    /// `∫ (ψ_c^{−1/2} − ψ^{−1/2})`, evaluated from `ψ − ψ_c` without cancellation.
    pub gap: f64,
}

pub fn cap_diameter_integral(psi: &BarrierFunction) -> Result<CapIntegral, BarrierError> {
    let a = psi.a;
    let lo = psi.s_lo();
    let hi = 0.25;
    let mid = psi.s_junction().clamp(lo, hi);
    let mut breaks = log_grid(lo, mid, 201);
    breaks.extend(log_grid(mid, hi, 801).into_iter().skip(1));
    let gl = GaussLegendre::new(10);
    let cyl = |s: f64| (1.0 - s) * (1.0 + s) / (s * s * a * a) + a.powi(-4) / 16.0;
    let mut bad = None;
    let mut sample = |s: f64| -> (f64, f64) {
        let v = psi.psi(s).unwrap_or(f64::NAN);
        if !(v > 0.0) {
            bad.get_or_insert((s, v));
            return (0.0, 0.0);
        }
        let c = cyl(s);
        let diff = psi.excess_over_cylinder(s).unwrap_or(f64::NAN) - a.powi(-4) / 16.0;
        (1.0 / v.sqrt(), diff / (v.sqrt() * c.sqrt() * (v.sqrt() + c.sqrt())))
    };
    let (mut integral, mut gap) = (0.0, 0.0);
    for w in breaks.windows(2) {
        let (x, wt) = gl.nodes_weights(w[0], w[1]);
        for (xi, wi) in x.into_iter().zip(wt) {
            let (f, g) = sample(xi);
            integral += wi * f;
            gap += wi * g;
        }
    }
    if let Some((s, value)) = bad {
        return Err(BarrierError::NonPositive { s, value });
    }
    let cylinder_quadrature = gl.integrate_panels(|s| 1.0 / cyl(s).sqrt(), &breaks);
    let k = 1.0 - 1.0 / (16.0 * a * a);
    let cylinder_level = a / k * ((1.0 - k * lo * lo).sqrt() - (1.0 - k * hi * hi).sqrt());
    Ok(CapIntegral { integral, ratio: integral / a, cylinder_level, cylinder_quadrature, gap })
}
