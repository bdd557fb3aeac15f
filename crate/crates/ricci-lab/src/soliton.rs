//! The singular steady soliton φ(r).
//!
//! Bryant's ODE `du/ds = u(1−u²)s²/((2−s²)(u+s))` on `s ∈ (−√2, 0)` is
//! integrated in three regions, each in variables that stay well
//! conditioned:
//!
//! - near `s = −√2`: `σ = s + √2`, `w = 1 − u`, integrated in `(ln σ, ln w)`.
//!   Solutions leave the corner as `w ≈ A σ^{2+√2}` with a free amplitude `A`.
//! - towards `s = 0`: `x = −s`, `u = x − x³y`. The trajectory is attracted
//!   to a slow manifold `y = 1/2 + x²/4 + …`, strongly (rate `~2/x³`).
//! - far field `x ≤ x_series`: the slow-manifold power series in `x²`.
//!
//! The profile is `φ(r) = s²/(2−s²)` at `r² = (1−u²)/(u²(2−s²))`,
//! rescaled `φ(r) ← φ(cr)` so that `r²φ → 1`.

use crate::geometry::PointJet;
use crate::numerics::fit::linear_least_squares;
use crate::numerics::interp::QuinticHermite;
use crate::numerics::jet::Jet;
use crate::numerics::ode::{dopri5, Dopri5Options, Flow, OdeError};
use crate::numerics::roots::bisect;
use std::f64::consts::SQRT_2;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolitonError {
    #[error("no amplitude in the search list produced a trajectory reaching s = 0")]
    ShootingFailure,
    #[error("u + s changed sign at s = {s} (wrong branch)")]
    WrongBranch { s: f64 },
    #[error("integration failed: {0}")]
    Integration(#[from] OdeError),
    #[error("r(s) is not monotone near r = {r}")]
    NonMonotone { r: f64 },
    #[error("tail fit ill-conditioned: {0}")]
    TailFit(String),
    #[error("φ = {target} is not attained on the tabulated range")]
    RootNotBracketed { target: f64 },
    #[error("radius {r} lies below the tabulated range")]
    OutOfRange { r: f64 },
    #[error("invalid option: {0}")]
    InvalidOption(String),
}

/// Number of fitted tail coefficients.
pub const TAIL_TERMS: usize = 6;

/// `p = 2 + √2`, the exponent of `1 − u` at `s = −√2`.
pub const CORNER_EXPONENT: f64 = 2.0 + SQRT_2;

#[derive(Debug, Clone)]
pub struct SolitonOptions {
    /// Relative tolerance of the adaptive integration.
    pub rtol: f64,
    /// Largest step in `ln σ` near the corner (controls node density).
    pub max_log_step: f64,
    /// Tabulation starts where φ drops below this value.
    pub phi_max: f64,
    /// Hand-over from corner variables to slow-manifold variables.
    pub x_switch: f64,
    /// Below this `x` the slow-manifold series replaces integration.
    pub x_series: f64,
    /// Smallest `x` tabulated (largest radius `≈ √2/x` after scaling).
    pub x_min: f64,
    /// Amplitudes tried in order when searching for a connecting trajectory.
    pub amplitudes: Vec<f64>,
    /// Window of the tail fit in normalized radius.
    pub fit_window: (f64, f64),
}

impl Default for SolitonOptions {
    fn default() -> Self {
        SolitonOptions {
            rtol: 1e-12,
            max_log_step: 4e-3,
            phi_max: 50.0,
            x_switch: 0.3,
            x_series: 0.05,
            x_min: 1e-4,
            amplitudes: vec![1.0, 0.1, 10.0, 0.01, 100.0, 1e-3, 1e3],
            fit_window: (10.0, 100.0),
        }
    }
}

/// Coefficients of the slow manifold `y = Σ y_k X^k`, `X = x²`.
///
/// The series is asymptotic (coefficients grow factorially), so it is only
/// summed for small `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlowManifoldSeries {
    pub coeffs: Vec<f64>,
}

fn ser_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n];
    for (i, &ai) in a.iter().enumerate().take(n) {
        for (j, &bj) in b.iter().enumerate().take(n - i) {
            c[i + j] += ai * bj;
        }
    }
    c
}

impl SlowManifoldSeries {
    /// Order-by-order solution of
    /// `2X²Y_X (2−X) Y = (1−3XY)(2−X)Y − (1−XY)(1 − X(1−XY)²)`.
    pub fn new(terms: usize) -> Self {
        let n = terms;
        let mut y = vec![0.0; n];
        let residual = |y: &[f64]| -> Vec<f64> {
            let mut x = vec![0.0; n];
            if n > 1 {
                x[1] = 1.0;
            }
            let mut two_minus_x = vec![0.0; n];
            two_minus_x[0] = 2.0;
            if n > 1 {
                two_minus_x[1] = -1.0;
            }
            // 2X²Y_X = Σ 2k y_k X^{k+1}
            let mut lhs1 = vec![0.0; n];
            for k in 1..n {
                if k + 1 < n {
                    lhs1[k + 1] = 2.0 * k as f64 * y[k];
                }
            }
            let lhs = ser_mul(&ser_mul(&lhs1, &two_minus_x, n), y, n);
            let xy = ser_mul(&x, y, n);
            let mut one_m3xy = xy.iter().map(|v| -3.0 * v).collect::<Vec<_>>();
            one_m3xy[0] += 1.0;
            let mut one_mxy = xy.iter().map(|v| -v).collect::<Vec<_>>();
            one_mxy[0] += 1.0;
            let sq = ser_mul(&one_mxy, &one_mxy, n);
            let mut inner = ser_mul(&x, &sq, n).iter().map(|v| -v).collect::<Vec<_>>();
            inner[0] += 1.0;
            let rhs_a = ser_mul(&ser_mul(&one_m3xy, &two_minus_x, n), y, n);
            let rhs_b = ser_mul(&one_mxy, &inner, n);
            (0..n).map(|k| rhs_a[k] - rhs_b[k] - lhs[k]).collect()
        };
        for k in 0..n {
            y[k] = 0.0;
            let e = residual(&y)[k];
            y[k] = -e / 2.0;
        }
        SlowManifoldSeries { coeffs: y }
    }

    /// `y(x)` with its first two x-derivatives.
    pub fn jet(&self, x: Jet) -> Jet {
        let xx = x * x;
        let mut acc = Jet::constant(0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * xx + c;
        }
        acc
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.jet(Jet::constant(x)).v
    }
}

/// One tabulated point of the trajectory, stored in the variables of the
/// region it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryNode {
    /// `σ = s + √2`, `w = 1 − u`.
    NearCorner { sigma: f64, w: f64 },
    /// `x = −s`, `u = x − x³y`; `series` marks the analytic tail.
    FarField { x: f64, y: f64, series: bool },
}

impl TrajectoryNode {
    pub fn s(&self) -> f64 {
        match *self {
            TrajectoryNode::NearCorner { sigma, .. } => sigma - SQRT_2,
            TrajectoryNode::FarField { x, .. } => -x,
        }
    }

    pub fn u(&self) -> f64 {
        match *self {
            TrajectoryNode::NearCorner { w, .. } => 1.0 - w,
            TrajectoryNode::FarField { x, y, .. } => x * (1.0 - x * x * y),
        }
    }
}

/// `d(ln w)/d(ln σ)` near the corner.
fn corner_rhs(tau: Jet, lnw: Jet) -> Jet {
    let sigma = tau.exp();
    let w = lnw.exp();
    let s = sigma - SQRT_2;
    let u_plus_s = (1.0 - w) + s;
    -((1.0 - w) * (2.0 - w) * s * s) / ((2.0 * SQRT_2 - sigma) * u_plus_s)
}

/// `dy/dx` on the slow-manifold side.
fn far_rhs(x: Jet, y: Jet) -> Jet {
    let xx = x * x;
    let u = x * (1.0 - xx * y);
    let f = 1.0 - 3.0 * xx * y - (1.0 - xx * y) * (1.0 - u * u) / ((2.0 - xx) * y);
    f / (xx * x)
}

/// Connecting trajectory of Bryant's ODE.
#[derive(Debug, Clone)]
pub struct BryantTrajectory {
    /// Corner amplitude `A = lim w/σ^{2+√2}`.
    pub amplitude: f64,
    /// Nodes ordered from the corner towards `s = 0`.
    pub nodes: Vec<TrajectoryNode>,
    /// `u(−1)`.
    pub u_at_minus_one: f64,
    /// `|y_integrated − y_series|` at the hand-over to the series.
    pub landing_defect: f64,
    pub series: SlowManifoldSeries,
}

impl BryantTrajectory {
    /// `(s, u)` at the first and last node.
    pub fn endpoints(&self) -> ((f64, f64), (f64, f64)) {
        let a = self.nodes.first().unwrap();
        let b = self.nodes.last().unwrap();
        ((a.s(), a.u()), (b.s(), b.u()))
    }
}

/// Smallest σ used to start the corner integration, where `w = Aσ^p` holds
/// to roundoff.
const SIGMA_START: f64 = 1e-16;
/// Accepted `|y − y_series|` at the hand-over.
const LANDING_TOL: f64 = 1e-9;

fn record_corner(tau: f64, lnw: f64, nodes: &mut Vec<TrajectoryNode>, err: &mut Option<f64>) -> Flow {
    let sigma = tau.exp();
    let w = lnw.exp();
    if (1.0 - w) + (sigma - SQRT_2) >= 0.0 || !(0.0..1.0).contains(&w) {
        err.get_or_insert(sigma - SQRT_2);
        return Flow::Stop;
    }
    nodes.push(TrajectoryNode::NearCorner { sigma, w });
    Flow::Continue
}

/// Integrate one trajectory with corner amplitude `amplitude`.
pub fn integrate_with_amplitude(amplitude: f64, opts: &SolitonOptions) -> Result<BryantTrajectory, SolitonError> {
    validate(opts)?;
    let series = SlowManifoldSeries::new(12);
    let tau0 = SIGMA_START.ln();
    let lnw0 = amplitude.ln() + CORNER_EXPONENT * tau0;
    // tabulation starts once φ ≈ 1/(√2σ) < phi_max
    let sigma_tab = 1.0 / (SQRT_2 * opts.phi_max);
    let tau_tab = sigma_tab.ln();
    let tau_m1 = (SQRT_2 - 1.0).ln();
    let tau_sw = (SQRT_2 - opts.x_switch).ln();
    let ode_opts = Dopri5Options { rtol: opts.rtol, atol: 1e-14, h_max: opts.max_log_step, ..Default::default() };
    let g = |t: f64, y: &[f64; 1]| [corner_rhs(Jet::constant(t), Jet::constant(y[0])).v];

    let mut nodes = Vec::new();
    let mut branch_error = None;
    let (_, y_tab) = dopri5(g, tau0, [lnw0], tau_tab, &ode_opts, |_, _| Flow::Continue)?;
    nodes.push(TrajectoryNode::NearCorner { sigma: sigma_tab, w: y_tab[0].exp() });
    let (_, y_m1) = dopri5(g, tau_tab, y_tab, tau_m1, &ode_opts, |t, y| record_corner(t, y[0], &mut nodes, &mut branch_error))?;
    if let Some(s) = branch_error {
        return Err(SolitonError::WrongBranch { s });
    }
    let u_at_minus_one = 1.0 - y_m1[0].exp();
    let (_, y_sw) = dopri5(g, tau_m1, y_m1, tau_sw, &ode_opts, |t, y| record_corner(t, y[0], &mut nodes, &mut branch_error))?;
    if let Some(s) = branch_error {
        return Err(SolitonError::WrongBranch { s });
    }

    // slow-manifold variables
    let x0 = opts.x_switch;
    let u0 = 1.0 - y_sw[0].exp();
    let y0 = (x0 - u0) / (x0 * x0 * x0);
    if y0 <= 0.0 {
        return Err(SolitonError::WrongBranch { s: -x0 });
    }
    let far_opts = Dopri5Options { rtol: opts.rtol, atol: 1e-14, h_max: opts.max_log_step * opts.x_series, ..Default::default() };
    let mut far_bad = None;
    let (_, y_end) = dopri5(
        |x, y: &[f64; 1]| [far_rhs(Jet::constant(x), Jet::constant(y[0])).v],
        x0,
        [y0],
        opts.x_series,
        &far_opts,
        |x, y| {
            if !(y[0] > 0.0) || y[0] > 1e6 {
                far_bad = Some(-x);
                return Flow::Stop;
            }
            nodes.push(TrajectoryNode::FarField { x, y: y[0], series: false });
            Flow::Continue
        },
    )?;
    if let Some(s) = far_bad {
        return Err(SolitonError::WrongBranch { s });
    }
    let landing_defect = (y_end[0] - series.eval(opts.x_series)).abs();
    if !(landing_defect <= LANDING_TOL) {
        return Err(SolitonError::ShootingFailure);
    }
    // analytic tail, log-spaced in x
    let steps = ((opts.x_series / opts.x_min).ln() / opts.max_log_step).ceil() as usize;
    for k in 1..=steps {
        let x = opts.x_series * (opts.x_min / opts.x_series).powf(k as f64 / steps as f64);
        nodes.push(TrajectoryNode::FarField { x, y: series.eval(x), series: true });
    }
    Ok(BryantTrajectory { amplitude, nodes, u_at_minus_one, landing_defect, series })
}

fn validate(opts: &SolitonOptions) -> Result<(), SolitonError> {
    let ok = opts.rtol > 0.0
        && opts.max_log_step > 0.0
        && opts.phi_max > 2.0
        && opts.x_series > opts.x_min
        && opts.x_min > 0.0
        && opts.x_switch > opts.x_series
        && opts.x_switch < SQRT_2 - 1.0
        && opts.fit_window.1 > opts.fit_window.0
        && opts.fit_window.0 > 0.0;
    if ok {
        Ok(())
    } else {
        Err(SolitonError::InvalidOption("soliton options out of range".into()))
    }
}

/// Search the amplitude list for a trajectory that lands on the slow
/// manifold. Every amplitude in a wide range works; the first success is
/// returned.
pub fn integrate_bryant_ode(opts: &SolitonOptions) -> Result<BryantTrajectory, SolitonError> {
    validate(opts)?;
    for &a in &opts.amplitudes {
        match integrate_with_amplitude(a, opts) {
            Ok(t) => return Ok(t),
            Err(SolitonError::InvalidOption(m)) => return Err(SolitonError::InvalidOption(m)),
            Err(_) => continue,
        }
    }
    Err(SolitonError::ShootingFailure)
}

/// `(r, φ, φ_r, φ_rr)` at a node, before rescaling.
fn node_phi(node: &TrajectoryNode, series: &SlowManifoldSeries) -> (f64, f64, f64, f64) {
    let (r2, phi) = match *node {
        TrajectoryNode::NearCorner { sigma, w } => {
            let tau = sigma.ln();
            let lnw = w.ln();
            let d1 = corner_rhs(Jet::constant(tau), Jet::constant(lnw)).v;
            let d2 = corner_rhs(Jet::var(tau), Jet::new(lnw, d1, 0.0)).d1;
            let tau = Jet::var(tau);
            let w = Jet::new(lnw, d1, d2).exp();
            let sigma = tau.exp();
            let d = sigma * (2.0 * SQRT_2 - sigma);
            let one_m_w = 1.0 - w;
            let r2 = w * (2.0 - w) / (one_m_w * one_m_w * d);
            let s = sigma - SQRT_2;
            (r2, s * s / d)
        }
        TrajectoryNode::FarField { x, y, series: analytic } => {
            let xj = Jet::var(x);
            let yj = if analytic {
                series.jet(xj)
            } else {
                let d1 = far_rhs(Jet::constant(x), Jet::constant(y)).v;
                let d2 = far_rhs(xj, Jet::new(y, d1, 0.0)).d1;
                Jet::new(y, d1, d2)
            };
            let xx = xj * xj;
            let u = xj * (1.0 - xx * yj);
            let r2 = (1.0 - u * u) / (u * u * (2.0 - xx));
            (r2, xx / (2.0 - xx))
        }
    };
    let r = r2.sqrt();
    let phi_r = phi.d1 / r.d1;
    let phi_rr = (phi.d2 * r.d1 - phi.d1 * r.d2) / (r.d1 * r.d1 * r.d1);
    (r.v, phi.v, phi_r, phi_rr)
}

/// Tabulated profile φ(r) with exact node derivatives.
#[derive(Debug, Clone)]
pub struct SolitonProfile {
    spline: QuinticHermite,
    /// Fitted coefficients of `r²φ = c2 + c4 r⁻² + c6 r⁻⁴ + …` (six terms).
    pub tail: [f64; TAIL_TERMS],
    pub tail_c2: f64,
    pub tail_c4: f64,
    /// Radius with `φ(r_star) = 2`.
    pub r_star: f64,
    /// Applied normalization `φ(r) ← φ_raw(c r)`.
    pub scale_c: f64,
    /// Corner amplitude of the underlying trajectory.
    pub amplitude: f64,
}

/// Build the unnormalized profile (`scale_c = 1`) from a trajectory.
pub fn to_phi_profile(traj: &BryantTrajectory) -> Result<SolitonProfile, SolitonError> {
    let mut r = Vec::with_capacity(traj.nodes.len());
    let mut f = Vec::with_capacity(traj.nodes.len());
    let mut d1 = Vec::with_capacity(traj.nodes.len());
    let mut d2 = Vec::with_capacity(traj.nodes.len());
    for node in &traj.nodes {
        let (ri, fi, a, b) = node_phi(node, &traj.series);
        if let Some(&last) = r.last() {
            if ri <= last {
                if (ri - last).abs() <= 1e-13 * last {
                    continue; // duplicate node at a region hand-over
                }
                return Err(SolitonError::NonMonotone { r: ri });
            }
        }
        r.push(ri);
        f.push(fi);
        d1.push(a);
        d2.push(b);
    }
    Ok(SolitonProfile {
        spline: QuinticHermite::new(r, f, d1, d2),
        tail: [f64::NAN; TAIL_TERMS],
        tail_c2: f64::NAN,
        tail_c4: f64::NAN,
        r_star: f64::NAN,
        scale_c: 1.0,
        amplitude: traj.amplitude,
    })
}

impl SolitonProfile {
    /// Run the full pipeline: integrate, tabulate, normalize, locate r_*.
    pub fn build(opts: &SolitonOptions) -> Result<Self, SolitonError> {
        let traj = integrate_bryant_ode(opts)?;
        let raw = to_phi_profile(&traj)?;
        let mut p = normalize_tail(&raw, opts.fit_window)?;
        p.r_star = find_r_star(&p)?;
        Ok(p)
    }

    pub fn r_grid(&self) -> &[f64] {
        self.spline.nodes()
    }

    pub fn phi(&self) -> &[f64] {
        self.spline.values()
    }

    pub fn phi_r(&self) -> &[f64] {
        self.spline.first()
    }

    pub fn phi_rr(&self) -> &[f64] {
        self.spline.second()
    }

    pub fn r_min(&self) -> f64 {
        self.spline.lo()
    }

    pub fn r_max(&self) -> f64 {
        self.spline.hi()
    }

    /// `(φ, φ', φ'')` at `r`; beyond the table the fitted tail is used.
    pub fn eval3(&self, r: f64) -> Result<(f64, f64, f64), SolitonError> {
        if r < self.r_min() {
            return Err(SolitonError::OutOfRange { r });
        }
        if r <= self.r_max() || self.tail[0].is_nan() {
            return Ok(self.spline.eval3(r));
        }
        let rr = Jet::var(r);
        let inv2 = (rr * rr).recip();
        let mut acc = Jet::constant(0.0);
        for &c in self.tail.iter().rev() {
            acc = acc * inv2 + c;
        }
        let phi = acc * inv2;
        Ok((phi.v, phi.d1, phi.d2))
    }

    /// `φ(r) − r⁻²` with derivatives. Beyond the table the leading tail
    /// term is dropped symbolically, so no cancellation occurs at large `r`.
    pub fn eval3_excess(&self, r: f64) -> Result<(f64, f64, f64), SolitonError> {
        let rr = Jet::var(r);
        let inv2 = (rr * rr).recip();
        if r <= self.r_max() || self.tail[0].is_nan() {
            let (f, f1, f2) = self.eval3(r)?;
            return Ok((f - inv2.v, f1 - inv2.d1, f2 - inv2.d2));
        }
        let mut acc = Jet::constant(0.0);
        for (k, &c) in self.tail.iter().enumerate().rev() {
            acc = acc * inv2 + if k == 0 { c - 1.0 } else { c };
        }
        let e = acc * inv2;
        Ok((e.v, e.d1, e.d2))
    }

    pub fn eval(&self, r: f64) -> Result<f64, SolitonError> {
        Ok(self.eval3(r)?.0)
    }

    pub fn jet(&self, r: f64) -> Result<PointJet, SolitonError> {
        let (f, a, b) = self.eval3(r)?;
        Ok(PointJet::new(r, f, a, b))
    }

    /// Steady-equation residual `pde_rhs(φ)` at every node.
    pub fn node_residuals(&self) -> Vec<f64> {
        (0..self.r_grid().len())
            .map(|i| PointJet::new(self.r_grid()[i], self.phi()[i], self.phi_r()[i], self.phi_rr()[i]).pde_rhs())
            .collect()
    }

    /// Steady residual at interval midpoints, divided by the size of its
    /// terms before cancellation (interpolation error is relative).
    pub fn midpoint_residuals(&self) -> Vec<(f64, f64)> {
        self.r_grid()
            .windows(2)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                let (f, a, b) = self.spline.eval3(m);
                let scale = (f * b).abs() + 0.5 * a * a + (1.0 - f).abs() * ((m * a).abs() + 2.0 * f.abs()) / (m * m);
                (m, PointJet::new(m, f, a, b).pde_rhs() / scale)
            })
            .collect()
    }

    /// Tail fit of `r²φ` over `[lo, hi]` in the basis `r⁻²ᵏ`, `k < 6`.
    pub fn fit_tail(&self, lo: f64, hi: f64) -> Result<[f64; TAIL_TERMS], SolitonError> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .r_grid()
            .iter()
            .zip(self.phi())
            .filter(|(r, _)| **r >= lo && **r <= hi)
            .map(|(r, f)| (*r, r * r * f))
            .unzip();
        if xs.len() < 12 || hi > self.r_max() {
            return Err(SolitonError::TailFit(format!("{} nodes in [{lo}, {hi}]", xs.len())));
        }
        // scaled basis (r/lo)⁻²ᵏ keeps the columns of comparable size
        let basis: Vec<Box<dyn Fn(f64) -> f64>> =
            (0..TAIL_TERMS).map(|k| Box::new(move |r: f64| (r / lo).powi(-2 * k as i32)) as Box<dyn Fn(f64) -> f64>).collect();
        let refs: Vec<&dyn Fn(f64) -> f64> = basis.iter().map(|b| b.as_ref()).collect();
        let c = linear_least_squares(&xs, &ys, &refs).ok_or_else(|| SolitonError::TailFit("singular least-squares system".into()))?;
        let mut out = [0.0; TAIL_TERMS];
        for k in 0..TAIL_TERMS {
            out[k] = c[k] * lo.powi(2 * k as i32);
        }
        Ok(out)
    }

    fn rescaled(&self, c: f64) -> SolitonProfile {
        let s = &self.spline;
        let r = s.nodes().iter().map(|r| r / c).collect();
        let d1 = s.first().iter().map(|d| d * c).collect();
        let d2 = s.second().iter().map(|d| d * c * c).collect();
        SolitonProfile {
            spline: QuinticHermite::new(r, s.values().to_vec(), d1, d2),
            tail: [f64::NAN; TAIL_TERMS],
            tail_c2: f64::NAN,
            tail_c4: f64::NAN,
            r_star: f64::NAN,
            scale_c: self.scale_c * c,
            amplitude: self.amplitude,
        }
    }
}

/// Choose `c` so that the fitted leading coefficient of `r²φ(cr)` is 1 on
/// `window`; the `r⁻⁴` coefficient is then reported, not fitted to 2.
pub fn normalize_tail(raw: &SolitonProfile, window: (f64, f64)) -> Result<SolitonProfile, SolitonError> {
    let mut c = 1.0;
    let mut p = raw.rescaled(1.0);
    for _ in 0..20 {
        let fit = p.fit_tail(window.0, window.1)?;
        if !(fit[0] > 0.0) {
            return Err(SolitonError::TailFit("nonpositive leading coefficient".into()));
        }
        let step = fit[0].sqrt();
        c *= step;
        p = raw.rescaled(c);
        if (step - 1.0).abs() < 1e-15 {
            break;
        }
    }
    let fit = p.fit_tail(window.0, window.1)?;
    p.tail = fit;
    p.tail_c2 = fit[0];
    p.tail_c4 = fit[1];
    p.r_star = raw.r_star;
    Ok(p)
}

/// Root of `φ(r) = 2` by bisection on the interpolant.
pub fn find_r_star(profile: &SolitonProfile) -> Result<f64, SolitonError> {
    find_level(profile, 2.0)
}

/// Root of `φ(r) = level` on the tabulated (decreasing) range.
pub fn find_level(profile: &SolitonProfile, level: f64) -> Result<f64, SolitonError> {
    let r = profile.r_grid();
    let f = profile.phi();
    let i = f.iter().position(|&v| v < level).ok_or(SolitonError::RootNotBracketed { target: level })?;
    if i == 0 {
        return Err(SolitonError::RootNotBracketed { target: level });
    }
    bisect(|x| profile.spline.eval(x) - level, r[i - 1], r[i], 1e-15 * r[i]).ok_or(SolitonError::RootNotBracketed { target: level })
}
