//! The scenarios behind the subcommands. Check names carry the number of the
//! acceptance criterion they belong to (`c01_…` to `c16_…`); checks without
//! a number are supplementary.

use super::config::{Scenario, ScenarioConfig};
use super::report::{Check, Table};
use crate::barrier::{assemble_psi, build_zeta, cap_diameter_integral, find_n, verify_positivity, BarrierFunction, ZetaFunction, S_MAX};
use crate::flow::evolve::{sphere_u, uniform_grid};
use crate::flow::{comparison_check, compute_f, evolve, residual_f, ComparisonOptions, Edge, EvolveOptions, FlowTrajectory, InitialShape, StepControl};
use crate::geometry::RadialProfile;
use crate::hermite::{classify_sequences, gamma_sequences, hermite_norm_sq, merle_zaag_classify, Dominance, DominanceOptions, GammaOptions, HermiteCoefficients, HermiteSpace};
use crate::lichnerowicz::{
    cylinder_grid, decay_study, harmonic, lichnerowicz_residual, lie_derivative_invariant_check, mode_evolve, run_central_decay, BoundaryData, ChartWindow, CylinderField, Family, ModeBasis, ModeProblem, ModeScheme, Parity, CentralDecayOptions,
    SphereQuadrature, TestTensor, ZProfile,
};
use crate::numerics::fit::observed_orders;
use crate::pinching::{certify_constants, random_sweep, CertifyOptions, SweepOptions};
use crate::soliton::{SolitonOptions, SolitonProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cell::OnceCell;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

/// Checks, tables and extra files produced by one scenario.
#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    /// `(file name, contents)` written verbatim.
    pub files: Vec<(String, String)>,
}

impl Outcome {
    fn extend(&mut self, other: Outcome) {
        self.checks.extend(other.checks);
        self.tables.extend(other.tables);
        self.files.extend(other.files);
    }
}

/// Shared inputs built on first use.
pub struct Context<'a> {
    pub cfg: &'a ScenarioConfig,
    soliton: OnceCell<Result<Arc<SolitonProfile>, String>>,
    zeta: OnceCell<Result<Arc<ZetaFunction>, String>>,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a ScenarioConfig) -> Self {
        Context { cfg, soliton: OnceCell::new(), zeta: OnceCell::new() }
    }

    fn soliton(&self) -> Result<Arc<SolitonProfile>, String> {
        self.soliton
            .get_or_init(|| {
                let s = &self.cfg.soliton;
                let opts = SolitonOptions { amplitudes: vec![s.amplitude], fit_window: (s.fit_window[0], s.fit_window[1]), ..Default::default() };
                SolitonProfile::build(&opts).map(Arc::new).map_err(|e| e.to_string())
            })
            .clone()
    }

    fn zeta(&self) -> Result<Arc<ZetaFunction>, String> {
        self.zeta
            .get_or_init(|| {
                let b = &self.cfg.barrier;
                build_zeta(&ZetaFunction::default_grid(b.zeta_s_min, b.zeta_log_nodes, b.zeta_right_nodes)).map(Arc::new).map_err(|e| e.to_string())
            })
            .clone()
    }
}

pub fn run_scenario(ctx: &Context, scenario: Scenario) -> Outcome {
    match scenario {
        Scenario::Soliton => soliton(ctx),
        Scenario::Barrier => barrier(ctx),
        Scenario::Evolve => evolve_scenario(ctx),
        Scenario::NeckSpectral => neck_spectral(ctx),
        Scenario::Lichnerowicz => lichnerowicz(ctx),
        Scenario::AndersonChow => anderson_chow(ctx),
        Scenario::VerifyAll => {
            let mut out = Outcome::default();
            for s in [Scenario::Soliton, Scenario::Barrier, Scenario::Evolve, Scenario::NeckSpectral, Scenario::Lichnerowicz, Scenario::AndersonChow] {
                out.extend(run_scenario(ctx, s));
            }
            out.checks.push(determinism(ctx.cfg));
            out
        }
    }
}

fn max_abs<'a>(v: impl IntoIterator<Item = &'a f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn soliton(ctx: &Context) -> Outcome {
    let mut out = Outcome::default();
    let start = Instant::now();
    let p = match ctx.soliton() {
        Ok(p) => p,
        Err(e) => {
            out.checks.push(Check::error("c01_soliton_tail", &e));
            out.checks.push(Check::error("c02_steady_residual", &e));
            return out;
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    let tail_err = (p.tail_c2 - 1.0).abs().max((p.tail_c4 - 2.0).abs() / 2.0);
    out.checks.push(Check::at_most("c01_soliton_tail", tail_err, ctx.cfg.soliton.tail_tol).with_detail(format!("c2={:?}, c4={:?}", p.tail_c2, p.tail_c4)));
    out.checks.push(Check::flag("c01_soliton_runtime", elapsed < Scenario::Soliton.budget()));
    let node = p.node_residuals();
    let mid: Vec<f64> = p.midpoint_residuals().into_iter().map(|x| x.1).collect();
    out.checks.push(Check::at_most("c02_steady_residual", max_abs(&node).max(max_abs(&mid)), ctx.cfg.soliton.residual_tol));

    let mut t = Table::new("soliton_profile", &["r", "phi", "phi_r", "phi_rr", "residual"]);
    for i in 0..p.r_grid().len() {
        t.push(vec![p.r_grid()[i].into(), p.phi()[i].into(), p.phi_r()[i].into(), p.phi_rr()[i].into(), node[i].into()]);
    }
    out.tables.push(t);
    let mut t = Table::new("soliton_tail", &["power", "coefficient"]);
    for (k, c) in p.tail.iter().enumerate() {
        t.push(vec![(-(2.0 * k as f64 + 2.0)).into(), (*c).into()]);
    }
    t.push(vec!["r_star".into(), p.r_star.into()]);
    out.tables.push(t);
    out
}

struct BarrierRow {
    a: f64,
    psi: BarrierFunction,
    max_d: f64,
    samples: Vec<(f64, f64)>,
}

fn barrier_rows(ctx: &Context, sol: &Arc<SolitonProfile>, zeta: &Arc<ZetaFunction>, n: u32, a_values: &[f64]) -> Result<Vec<BarrierRow>, String> {
    let b = &ctx.cfg.barrier;
    a_values
        .iter()
        .map(|&a| {
            let psi = assemble_psi(a, n as f64, zeta.clone(), sol.clone()).map_err(|e| e.to_string())?;
            let samples = psi.operator_samples(psi.s_lo(), S_MAX, b.samples).map_err(|e| e.to_string())?;
            let max_d = samples.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
            Ok(BarrierRow { a, psi, max_d, samples })
        })
        .collect()
}

fn barrier(ctx: &Context) -> Outcome {
    let mut out = Outcome::default();
    let b = &ctx.cfg.barrier;
    let names = ["c03_zeta_anchor", "c04_barrier_negativity", "c05_junction", "c06_positivity"];
    let (sol, zeta) = match (ctx.soliton(), ctx.zeta()) {
        (Ok(s), Ok(z)) => (s, z),
        (Err(e), _) | (_, Err(e)) => {
            out.checks.extend(names.iter().map(|n| Check::error(n, &e)));
            return out;
        }
    };

    match (zeta.eval(1.0), zeta.small_s_coefficient(1e-3, 1e-2, 50)) {
        (Ok(z1), Ok(lead)) => {
            out.checks.push(Check::at_most("c03_zeta_anchor", (z1 + 1.75).abs(), b.anchor_tol));
            out.checks.push(Check::at_most("c03_zeta_leading_coefficient", ((lead - 5.0) / 5.0).abs(), b.lead_tol).with_detail(format!("lim s³ζ = {lead:?}")));
        }
        (Err(e), _) | (_, Err(e)) => out.checks.push(Check::error("c03_zeta_anchor", e)),
    }

    let a_min = b.a_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let n = match find_n(a_min, &b.a_values, &zeta, &sol, b.samples, b.max_n) {
        Ok(n) => n,
        Err(e) => {
            out.checks.extend(names[1..].iter().map(|n| Check::error(n, &e)));
            return out;
        }
    };
    let (small, large) = match (barrier_rows(ctx, &sol, &zeta, n, &b.a_values), barrier_rows(ctx, &sol, &zeta, n, &b.large_a)) {
        (Ok(s), Ok(l)) => (s, l),
        (Err(e), _) | (_, Err(e)) => {
            out.checks.extend(names[1..].iter().map(|n| Check::error(n, &e)));
            return out;
        }
    };

    let worst = small.iter().map(|r| r.max_d).fold(f64::NEG_INFINITY, f64::max);
    let neg = Check { name: "c04_barrier_negativity".into(), pass: worst < 0.0, value: Some(worst), tolerance: Some(0.0), detail: format!("N = {n}, max D[ψ_a] over a = {:?}", b.a_values) };
    out.checks.push(neg);
    let top = small.iter().max_by(|x, y| x.a.total_cmp(&y.a)).expect("a_values nonempty");
    match top.psi.barrier_operator(1.0) {
        Ok(d1) => {
            let v = d1 * top.a.powi(4);
            let pass = (b.slope_window[0]..=b.slope_window[1]).contains(&v);
            out.checks.push(Check { name: "c04_operator_at_one".into(), pass, value: Some(v), tolerance: None, detail: format!("a = {:?}, window {:?}", top.a, b.slope_window) });
        }
        Err(e) => out.checks.push(Check::error("c04_operator_at_one", e)),
    }
    let worst_large = large.iter().map(|r| r.max_d).fold(f64::NEG_INFINITY, f64::max);
    out.checks.push(Check { name: "barrier_negativity_large_a".into(), pass: worst_large < 0.0, value: Some(worst_large), tolerance: Some(0.0), detail: format!("a = {:?}", b.large_a) });

    let mut jump: f64 = 0.0;
    let mut summary = Table::new("barrier_summary", &["a", "n", "max_d", "value_jump", "derivative_jump", "theta", "inequality_margin", "floor_margin", "cap_integral"]);
    let (mut ineq, mut floor, mut zeta_err) = (f64::INFINITY, f64::INFINITY, 0.0f64);
    let mut errors = Vec::new();
    for r in small.iter().chain(&large) {
        let j = match r.psi.junction_jumps() {
            Ok(j) => j,
            Err(e) => {
                errors.push(e.to_string());
                continue;
            }
        };
        jump = jump.max(j.value_jump).max(j.derivative_jump);
        let pos = match verify_positivity(&r.psi, 2_000, 4_000) {
            Ok(p) => p,
            Err(e) => {
                errors.push(e.to_string());
                continue;
            }
        };
        ineq = ineq.min(pos.inequality_margin);
        floor = floor.min(pos.floor_margin);
        zeta_err = zeta_err.max((pos.two_plus_zeta1 - 0.25).abs());
        let cap = cap_diameter_integral(&r.psi).map(|c| c.integral).unwrap_or(f64::NAN);
        summary.push(vec![r.a.into(), (n as f64).into(), r.max_d.into(), j.value_jump.into(), j.derivative_jump.into(), pos.theta.into(), pos.inequality_margin.into(), pos.floor_margin.into(), cap.into()]);
    }
    if errors.is_empty() {
        out.checks.push(Check::at_most("c05_junction", jump, b.junction_tol));
        out.checks.push(Check::at_least("c06_positivity_inequality", ineq, 0.0));
        out.checks.push(Check::at_least("c06_positivity_floor", floor, 0.0).with_detail("min a⁴ψ_a − 1/32 over all tested a"));
        out.checks.push(Check::at_most("c06_two_plus_zeta_one", zeta_err, b.positivity_tol));
    } else {
        out.checks.push(Check::error("c05_junction", errors.join("; ")));
        out.checks.push(Check::error("c06_positivity", errors.join("; ")));
    }
    out.tables.push(summary);
    for r in small.iter().chain(&large) {
        let mut t = Table::new(&format!("barrier_a{}", r.a), &["s", "psi", "d_psi"]);
        for &(s, d) in &r.samples {
            t.push(vec![s.into(), r.psi.psi(s).unwrap_or(f64::NAN).into(), d.into()]);
        }
        out.tables.push(t);
    }
    out
}

const SPHERE_RHO0: f64 = 2.0;

fn sphere_run(dt: f64, rbar0: Option<f64>) -> Result<FlowTrajectory, String> {
    let init = RadialProfile::from_fn(uniform_grid(0.0, 1.0, 41), 0.0, true, |r| sphere_u(SPHERE_RHO0, r, 0.0)).map_err(|e| e.to_string())?.flag_positive_curvature();
    let opts = EvolveOptions {
        step: StepControl { dt, dt_start: Some(dt * dt), ..Default::default() },
        right: Edge::Value(Arc::new(|t| sphere_u(SPHERE_RHO0, 1.0, t))),
        marked_radius: rbar0,
        ..Default::default()
    };
    evolve(&init, 0.5, &opts).map_err(|e| e.to_string())
}

fn sphere_error(traj: &FlowTrajectory) -> f64 {
    let mut worst: f64 = 0.0;
    for p in &traj.snapshots {
        for (&r, &u) in p.r().iter().zip(p.u()) {
            worst = worst.max((u - sphere_u(SPHERE_RHO0, r, p.t())).abs());
        }
    }
    worst
}

fn static_drift(p: &RadialProfile, dt: f64) -> Result<f64, String> {
    let opts = EvolveOptions { step: StepControl { dt, ..Default::default() }, snapshot_every: 5, ..Default::default() };
    evolve(p, 1.0, &opts).map(|t| t.max_drift()).map_err(|e| e.to_string())
}

fn evolve_scenario(ctx: &Context) -> Outcome {
    let mut out = Outcome::default();
    let e = &ctx.cfg.evolve;
    let sol = ctx.soliton();
    let zeta = ctx.zeta();

    // comparison
    let psi = match (&sol, &zeta) {
        (Ok(s), Ok(z)) => assemble_psi(e.comparison_a, 5.0, z.clone(), s.clone()).map_err(|e| e.to_string()),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    match psi {
        Ok(psi) => {
            let mut t = Table::new("comparison", &["shape", "a", "min_gap", "argmin_s", "argmin_tau", "min_relative_gap", "time_factor", "steps"]);
            let mut worst = f64::INFINITY;
            let mut factor = f64::INFINITY;
            let mut errors = Vec::new();
            for shape in InitialShape::standard_suite(psi.a) {
                match comparison_check(&psi, shape, &ComparisonOptions::default()) {
                    Ok(r) => {
                        worst = worst.min(r.min_gap);
                        factor = factor.min(r.time_factor);
                        t.push(vec![format!("{shape:?}").into(), r.a.into(), r.min_gap.into(), r.argmin_s.into(), r.argmin_tau.into(), r.min_relative_gap.into(), r.time_factor.into(), r.steps.into()]);
                    }
                    Err(err) => errors.push(format!("{shape:?}: {err}")),
                }
            }
            if errors.is_empty() {
                out.checks.push(Check::at_least("c07_comparison_gap", worst, -e.gap_tol).with_detail(format!("5 initial data at a = {:?}", psi.a)));
                out.checks.push(Check::at_least("c07_time_span_factor", factor, 2.0 - 1e-12));
            } else {
                out.checks.push(Check::error("c07_comparison_gap", errors.join("; ")));
            }
            out.tables.push(t);
        }
        Err(err) => out.checks.push(Check::error("c07_comparison_gap", err)),
    }

    // exact solutions
    let runs: Result<Vec<FlowTrajectory>, String> = e.sphere_dt.iter().map(|&dt| sphere_run(dt, Some(0.6))).collect();
    match runs {
        Ok(runs) => {
            let errs: Vec<f64> = runs.iter().map(sphere_error).collect();
            let orders = observed_orders(&errs);
            let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
            out.checks.push(Check::at_least("c08_sphere_order", min_order, e.order_min).with_detail(format!("errors {errs:?}")));
            let res: Result<Vec<f64>, String> = runs
                .iter()
                .map(|traj| {
                    let rb = traj.marked_radii().ok_or("no marked radius")?;
                    residual_f(traj, &rb, 40, 1e-3).map(|r| r.sup).map_err(|e| e.to_string())
                })
                .collect();
            let mut t = Table::new("sphere_convergence", &["dt", "max_error", "residual_f"]);
            match res {
                Ok(res) => {
                    let ro = observed_orders(&res).into_iter().fold(f64::INFINITY, f64::min);
                    out.checks.push(Check::at_least("c09_residual_f_order", ro, e.order_min).with_detail(format!("sup residuals {res:?}")));
                    for k in 0..runs.len() {
                        t.push(vec![e.sphere_dt[k].into(), errs[k].into(), res[k].into()]);
                    }
                }
                Err(err) => out.checks.push(Check::error("c09_residual_f_order", err)),
            }
            out.tables.push(t);
            let mut defect: f64 = 0.0;
            for p in runs[0].snapshots.iter().step_by(10) {
                match compute_f(p, 0.5) {
                    Ok(a) => defect = defect.max(a.identity_defects().max()).max(a.midpoint_defects().max()),
                    Err(_) => defect = f64::INFINITY,
                }
            }
            if let Ok(s) = &sol {
                let bryant = crate::barrier::log_grid(s.r_star, 200.0, 3000);
                match RadialProfile::from_fn(bryant, 0.0, false, |r| s.eval(r).unwrap_or(f64::NAN)).map_err(|e| e.to_string()).and_then(|p| compute_f(&p, 2.0).map_err(|e| e.to_string())) {
                    Ok(a) => defect = defect.max(a.identity_defects().max()).max(a.midpoint_defects().max()),
                    Err(_) => defect = f64::INFINITY,
                }
            }
            out.checks.push(Check::at_most("c09_f_identities", defect, e.identity_tol));
        }
        Err(err) => {
            out.checks.push(Check::error("c08_sphere_order", &err));
            out.checks.push(Check::error("c09_f_identities", &err));
        }
    }
    let flat = RadialProfile::from_fn(uniform_grid(0.0, 3.0, 31), 0.0, true, |_| 1.0).map_err(|e| e.to_string()).and_then(|p| static_drift(&p, 0.05));
    let bryant = sol.and_then(|s| RadialProfile::from_fn(crate::barrier::log_grid(s.r_star, 20.0, 4000), 0.0, false, |r| s.eval(r).unwrap_or(f64::NAN)).map_err(|e| e.to_string())).and_then(|p| static_drift(&p, 0.05));
    match (flat, bryant) {
        (Ok(f), Ok(b)) => {
            out.checks.push(Check::at_most("c08_flat_static", f, e.static_tol));
            out.checks.push(Check::at_most("c08_bryant_static", b, e.static_tol));
        }
        (Err(err), _) | (_, Err(err)) => out.checks.push(Check::error("c08_static", err)),
    }
    out
}

fn coefficient_defect(a: &HermiteCoefficients, b: &HermiteCoefficients) -> f64 {
    HermiteCoefficients { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect() }.parseval().sqrt()
}

/// Reconstruction, idempotence and orthogonality defects of the three
/// projections of `f`, relative to `max(‖f‖, 1)`.
fn projection_algebra(sp: &HermiteSpace, f: impl Fn(f64) -> f64) -> f64 {
    let norm = sp.norm_sq(&f).sqrt().max(1.0);
    let c = sp.coefficients(&f);
    let p = c.split();
    let sum = p.plus.add(&p.zero).add(&p.minus);
    let mut worst = sp.norm_sq(|x| sum.eval(x) - f(x)).sqrt();
    let zero = HermiteCoefficients::zeros(sp.n_max);
    for (k, part) in [&p.plus, &p.zero, &p.minus].into_iter().enumerate() {
        let again = sp.coefficients(|x| part.eval(x)).split();
        for (j, q) in [&again.plus, &again.zero, &again.minus].into_iter().enumerate() {
            worst = worst.max(coefficient_defect(q, if j == k { part } else { &zero }));
        }
    }
    for (a, b) in [(&p.plus, &p.zero), (&p.plus, &p.minus), (&p.zero, &p.minus)] {
        worst = worst.max(sp.inner(|x| a.eval(x), |x| b.eval(x)).abs() / norm);
    }
    worst / norm
}

struct Suite {
    name: &'static str,
    expect: &'static str,
    plus: Vec<f64>,
    zero: Vec<f64>,
    minus: Vec<f64>,
    total: Option<Vec<f64>>,
    delta: f64,
    c: f64,
}

impl Suite {
    fn new(name: &'static str, expect: &'static str, n: usize, delta: f64, c: f64, p: impl Fn(f64) -> f64, z: impl Fn(f64) -> f64, m: impl Fn(f64) -> f64) -> Self {
        let k = (0..n).map(|k| k as f64);
        Suite { name, expect, plus: k.clone().map(p).collect(), zero: k.clone().map(z).collect(), minus: k.map(m).collect(), total: None, delta, c }
    }

    fn classify(&self) -> Result<Dominance, String> {
        let total = self.total.clone().unwrap_or_else(|| (0..self.plus.len()).map(|k| self.plus[k] + self.zero[k] + self.minus[k]).collect());
        let opts = DominanceOptions { c: self.c, ..Default::default() };
        merle_zaag_classify(&self.plus, &self.zero, &self.minus, &total, &vec![self.delta; self.plus.len()], &opts).map_err(|e| e.to_string())
    }
}

fn label(d: &Dominance) -> &'static str {
    match d {
        Dominance::PlusDominated { .. } => "plus_dominated",
        Dominance::ZeroDominated { .. } => "zero_dominated",
        Dominance::Inconclusive { .. } => "inconclusive",
        Dominance::HypothesesViolated { .. } => "hypotheses_violated",
    }
}

/// Six labelled suites (two per outcome) and two adversarial ones.
fn classifier_suites(c: f64) -> Vec<Suite> {
    let tiny = 1e-300;
    let mut v = vec![
        Suite::new("plus_geometric", "plus_dominated", 15, 0.5, c, |k| (-k).exp(), |k| (-2.0 * k).exp(), |k| (-3.0 * k).exp()),
        Suite::new("plus_no_minus", "plus_dominated", 12, 0.5, c, |k| 2.0 * (-k).exp(), |k| 0.5 * (-1.5 * k).exp(), |_| 0.0),
        Suite::new("zero_flat", "zero_dominated", 15, 0.5, c, |k| (-k).exp(), |_| 1.0, |k| (-k).exp()),
        Suite::new("zero_settling", "zero_dominated", 12, 0.5, c, |k| 0.3 * (-2.0 * k).exp(), |k| 1.0 + (-k).exp(), |k| 0.1 * (-k).exp()),
        Suite::new("violated_flat_plus", "hypotheses_violated", 12, tiny, 1.0, |_| 1.0, |_| 0.0, |_| 0.0),
        Suite::new("violated_decaying_minus", "hypotheses_violated", 12, tiny, 1.0, |_| 0.0, |_| 1.0, |k| (-k).exp()),
    ];
    let mut growing = Suite::new("adversarial_growing_minus", "hypotheses_violated", 12, 0.5, c, |k| (-k).exp(), |_| 0.0, |k| 1e-6 * k.exp());
    growing.total = Some(vec![1.0; 12]);
    v.push(growing);
    v.push(Suite::new("adversarial_zero_jump", "hypotheses_violated", 12, tiny, 1.0, |k| 1e-3 * (-k).exp(), |k| if k < 6.0 { 1.0 } else { 0.2 }, |_| 0.0));
    v
}

fn neck_spectral(ctx: &Context) -> Outcome {
    let mut out = Outcome::default();
    let h = &ctx.cfg.neck_spectral;
    let sp = match HermiteSpace::new(h.order, h.n_max) {
        Ok(s) => s,
        Err(e) => {
            out.checks.push(Check::error("c10_hermite", &e));
            return out;
        }
    };
    let mut t = Table::new("hermite_eigen", &["n", "relative_defect"]);
    let mut worst: f64 = 0.0;
    for n in 0..=h.eigen_n {
        let d = sp.eigen_defect(n) / hermite_norm_sq(n).sqrt();
        worst = worst.max(d);
        t.push(vec![n.into(), d.into()]);
    }
    out.tables.push(t);
    out.checks.push(Check::at_most("c10_eigenrelation", worst, h.eigen_tol));
    let mass = (sp.inner(|_| 1.0, |_| 1.0) - 2.0 * PI.sqrt()).abs();
    out.checks.push(Check::at_most("c10_weighted_mass", mass, h.algebra_tol));
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let mut alg: f64 = 0.0;
    let degree = 10.min(h.n_max);
    for _ in 0..16 {
        let c: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
        alg = alg.max(projection_algebra(&sp, |x| c.iter().rev().fold(0.0, |acc, &a| acc * x + a)));
    }
    out.checks.push(Check::at_most("c10_projection_algebra", alg, h.algebra_tol).with_detail(format!("16 seeded polynomials of degree {degree}")));

    let mut t = Table::new("classifier_suites", &["suite", "expected", "label"]);
    let mut labelled = (0, 0);
    let mut adversarial = (0, 0);
    for s in classifier_suites(h.c) {
        let got = s.classify().map(|d| label(&d).to_string()).unwrap_or_else(|e| format!("error: {e}"));
        let ok = got == s.expect;
        if s.name.starts_with("adversarial") {
            adversarial = (adversarial.0 + usize::from(ok), adversarial.1 + 1);
        } else {
            labelled = (labelled.0 + usize::from(ok), labelled.1 + 1);
        }
        t.push(vec![s.name.into(), s.expect.into(), got.into()]);
    }
    out.tables.push(t);
    out.checks.push(Check { name: "c11_synthetic_suites".into(), pass: labelled.0 == labelled.1, value: Some(labelled.0 as f64), tolerance: Some(labelled.1 as f64), detail: String::new() });
    out.checks.push(Check { name: "c11_adversarial_suites".into(), pass: adversarial.0 == adversarial.1, value: Some(adversarial.0 as f64), tolerance: Some(adversarial.1 as f64), detail: String::new() });

    // a neutral mode injected into a rescaled neck, run end to end
    let deltas: Vec<f64> = (0..12).map(|j| 10f64.powi(-150 - j)).collect();
    let gopts = GammaOptions { tau_samples: 7, panels: 120, xi_cap: 40.0 };
    match gamma_sequences(|x, tau| tau.exp() * crate::hermite::hermite_h(2, 0.5 * x), (-20.0, 0.0), 0, &deltas, &gopts) {
        Ok(g) => {
            let d = classify_sequences(&g, &DominanceOptions { c: 10.0, ..Default::default() });
            let pass = matches!(d, Ok(Dominance::ZeroDominated { .. }));
            out.checks.push(Check::flag("neutral_injection_classified", pass).with_detail(format!("{d:?}")));
            if let Ok(t) = Table::from_csv("gamma_neutral", &g.to_csv()) {
                out.tables.push(t);
            }
        }
        Err(e) => out.checks.push(Check::error("neutral_injection_classified", e)),
    }
    out
}

fn residual_cases() -> [(Family, usize, i32, Parity); 7] {
    [
        (Family::Omega, 1, 0, Parity::Even),
        (Family::Omega, 3, 2, Parity::Even),
        (Family::Beta, 2, 1, Parity::Even),
        (Family::Sigma, 1, -1, Parity::Even),
        (Family::Sigma, 2, 1, Parity::Odd),
        (Family::Chi, 2, 0, Parity::Even),
        (Family::Chi, 3, -2, Parity::Odd),
    ]
}

fn heat_kernel(z: f64, s: f64) -> f64 {
    (1.0 / (1.0 + s)).sqrt() * (-z * z / (4.0 * (1.0 + s))).exp()
}

/// Largest relative difference of the damped and substituted solvers on a
/// Gaussian datum with exact heat-kernel boundary values.
fn solver_agreement() -> Result<f64, String> {
    let t: Vec<f64> = (0..400).map(|i| -40.0 + 39.0 * i as f64 / 399.0).collect();
    let z: Vec<f64> = (0..401).map(|i| -20.0 + 0.1 * i as f64).collect();
    let init: Vec<f64> = z.iter().map(|x| (-x * x / 4.0).exp()).collect();
    let mut worst: f64 = 0.0;
    for kappa in [0.0, 2.0, 6.0, 10.0] {
        let bc: Vec<f64> = t.iter().map(|&tt| ((-tt) / (-t[0])).powf(0.5 * kappa) * heat_kernel(20.0, tt - t[0])).collect();
        let p = ModeProblem { kappa, z: &z, t: &t, initial: &init, left: &bc, right: &bc };
        let a = mode_evolve(&p, ModeScheme::Substituted).map_err(|e| e.to_string())?;
        let b = mode_evolve(&p, ModeScheme::Damped).map_err(|e| e.to_string())?;
        let scale = max_abs(&a);
        worst = worst.max(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale);
    }
    Ok(worst)
}

fn lichnerowicz(ctx: &Context) -> Outcome {
    let mut out = Outcome::default();
    let l = &ctx.cfg.lichnerowicz;
    let basis = ModeBasis::new(l.l_max);
    let opts = CentralDecayOptions::default();

    match decay_study(&basis, &l.lengths, l.l_data, ctx.cfg.seed, &opts) {
        Ok(rep) => {
            let tol = l.exponent_tol;
            for (name, got, want) in [("c12_chi_exponent", rep.chi_exponent, -1.0), ("c12_sigma_exponent", rep.sigma_exponent, -0.5), ("c12_beta_exponent", rep.beta_exponent, -1.0)] {
                out.checks.push(Check::at_most(name, (got - want).abs(), tol).with_detail(format!("exponent {got:?}, target {want:?}")));
            }
            out.checks.push(Check::at_most("c12_total_exponent", rep.total_exponent, l.total_max));
            let mut t = Table::new("decay", &["length", "total", "omega", "chi", "sigma", "beta", "psi_m1", "psi_0", "psi_p1", "nz", "nt"]);
            for r in &rep.reports {
                t.push(vec![r.l.into(), r.total.into(), r.omega.into(), r.chi.into(), r.sigma.into(), r.beta.into(), r.psi[0].into(), r.psi[1].into(), r.psi[2].into(), r.nz.into(), r.nt.into()]);
            }
            out.tables.push(t);
            let mut t = Table::new("decay_exponents", &["piece", "exponent"]);
            for (k, v) in [("total", rep.total_exponent), ("omega", rep.omega_exponent), ("chi", rep.chi_exponent), ("sigma", rep.sigma_exponent), ("beta", rep.beta_exponent)] {
                t.push(vec![k.into(), v.into()]);
            }
            out.tables.push(t);
        }
        Err(e) => out.checks.push(Check::error("c12_decay", e)),
    }

    let rbasis = ModeBasis::new(3);
    let mut t = Table::new("residual_orders", &["tensor", "eta", "sup_residual"]);
    let mut min_order = f64::INFINITY;
    let mut errors = Vec::new();
    for (fam, deg, m, par) in residual_cases() {
        let tt = TestTensor { terms: vec![(harmonic(&rbasis, fam, deg, m, par), ZProfile { amp: 1.0, k: 0.7, phase: 0.3 })] };
        let etas = [0.02, 0.01, 0.005];
        let errs: Result<Vec<f64>, String> = etas.iter().map(|&e| lichnerowicz_residual(&tt, -1.5, &ChartWindow::default(), e).map(|r| r.sup).map_err(|e| e.to_string())).collect();
        match errs {
            Ok(errs) => {
                min_order = observed_orders(&errs).into_iter().fold(min_order, f64::min);
                let name = tt.terms[0].0.label();
                for (e, s) in etas.iter().zip(&errs) {
                    t.push(vec![name.clone().into(), (*e).into(), (*s).into()]);
                }
            }
            Err(e) => errors.push(e),
        }
    }
    out.tables.push(t);
    if errors.is_empty() {
        out.checks.push(Check::at_least("c13_residual_order", min_order, l.order_min));
    } else {
        out.checks.push(Check::error("c13_residual_order", errors.join("; ")));
    }
    match solver_agreement() {
        Ok(v) => out.checks.push(Check::at_most("c13_damped_vs_substituted", v, l.solver_tol)),
        Err(e) => out.checks.push(Check::error("c13_damped_vs_substituted", e)),
    }

    let nbasis = ModeBasis::new(2);
    let q = [0.1, -0.2, 0.05];
    let (z, tg) = cylinder_grid(64.0, opts.dz, opts.dt_max, opts.dt_rel);
    match run_central_decay(&nbasis, &BoundaryData::neutral(&nbasis, q, z, tg), &opts) {
        Ok(rep) => {
            let err = (0..3).map(|j| (rep.psi[j] - q[j]).abs()).fold(0.0, f64::max);
            out.checks.push(Check::at_most("c14_neutral_psi", err, l.psi_tol));
            out.checks.push(Check::at_most("c14_neutral_remainder", rep.total, l.neutral_tol));
        }
        Err(e) => out.checks.push(Check::error("c14_neutral_psi", e)),
    }

    let (z, tg) = cylinder_grid(12.0, 0.5, 0.5, 0.1);
    let mut lie: f64 = 0.0;
    for field in [CylinderField::Rotation { axis: [0.0, 0.0, 1.0] }, CylinderField::Translation, CylinderField::Conformal { axis: [0.6, 0.0, 0.8] }] {
        match lie_derivative_invariant_check(&field, &nbasis, &z, &tg, ModeScheme::Substituted) {
            Ok(r) => lie = lie.max(r.identity_defect / r.sup_norm.max(1.0)).max(r.evolution_residual / r.sup_norm.max(1.0)),
            Err(_) => lie = f64::INFINITY,
        }
    }
    out.checks.push(Check::at_most("lie_derivative_invariance", lie, 1e-12));
    out
}

fn anderson_chow(ctx: &Context) -> Outcome {
    let mut out = Outcome::default();
    let a = &ctx.cfg.anderson_chow;
    let start = Instant::now();
    let sweep = random_sweep(&SweepOptions { samples: a.samples, seed: ctx.cfg.seed, chunks: 64 });
    let cert = certify_constants(&CertifyOptions { simplex_n: a.simplex_n, rho_samples: a.rho_samples, candidates: a.candidates.clone(), ..Default::default() });
    let elapsed = start.elapsed().as_secs_f64();
    match sweep {
        Ok(s) => {
            out.checks.push(Check::at_most("c15_minor2_identity", s.minor2_max_relative, a.identity_tol).with_detail(format!("{} samples", s.samples)));
            let violations = s.combined_violations + s.pairwise_violations.iter().sum::<usize>();
            out.checks.push(
                Check { name: "c15_product_inequalities".into(), pass: violations == 0, value: Some(violations as f64), tolerance: Some(0.0), detail: String::new() }.with_detail(format!(
                    "combined {} and pairwise {:?} violations; sup R·abc/(QΣa²) = {:?} at {:?}",
                    s.combined_violations, s.pairwise_violations, s.product_ratio_sup, s.product_ratio_argmax
                )),
            );
            out.checks.push(Check::at_least("s_bound_gap", s.s_gap_commuting_min.min(s.s_gap_frame_min), -1e-12));
            out.files.push(("pinching_sweep.json".into(), serde_json::to_string_pretty(&s).expect("sweep serializes") + "\n"));
        }
        Err(e) => out.checks.push(Check::error("c15_minor2_identity", e)),
    }
    match cert {
        Ok(c) => {
            out.checks.push(Check::at_least("c15_det_a0", c.det0_min, -a.det_tol).with_detail("min det A₀/R⁶ on the simplex grid"));
            let pass = c.c_sharp <= a.c_max && c.c_flat > 0.0;
            out.checks.push(Check { name: "c15_certified_constants".into(), pass, value: Some(c.c_flat), tolerance: Some(0.0), detail: format!("C_# = {:?}, c_# = {:?}", c.c_sharp, c.c_flat) });
            let mut t = Table::new("pinching_attempts", &["c", "min_ratio"]);
            for at in &c.attempts {
                t.push(vec![at.c.into(), at.min_ratio.into()]);
            }
            out.tables.push(t);
            out.files.push(("certificate.json".into(), c.to_json() + "\n"));
        }
        Err(e) => out.checks.push(Check::error("c15_certified_constants", e)),
    }
    out.checks.push(Check::flag("c15_runtime", elapsed < Scenario::AndersonChow.budget()));
    out
}

/// Re-run the seeded, parallel pieces and compare their serialized results.
/// Whole-run determinism is checked by running `verify-all` twice.
fn determinism(cfg: &ScenarioConfig) -> Check {
    let opts = SweepOptions { samples: 100_000, seed: cfg.seed, chunks: 64 };
    let sweep = || random_sweep(&opts).map(|s| serde_json::to_string(&s).expect("sweep serializes")).ok();
    let basis = ModeBasis::new(2);
    let data = || {
        let (z, t) = cylinder_grid(64.0, 0.25, 1.0, 0.05);
        let d = BoundaryData::random(&basis, 2, cfg.seed, z, t, &SphereQuadrature::new(12, 24));
        serde_json::to_string(&(d.initial, d.left, d.right)).expect("data serialize")
    };
    let pass = sweep().is_some() && sweep() == sweep() && data() == data();
    Check::flag("c16_determinism_in_process", pass)
}
