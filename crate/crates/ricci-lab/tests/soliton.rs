use ricci_lab::soliton::*;

/// Independent corner integration: RK4 in (τ = ln σ, W = ln(1−u)), σ = √2 + s,
/// with fixed steps and one Richardson extrapolation.
fn rk4_u_at_minus_one(steps: usize) -> f64 {
    let sqrt2 = 2f64.sqrt();
    let p = 2.0 + sqrt2;
    let f = |tau: f64, big_w: f64| {
        let sigma = tau.exp();
        let w = big_w.exp();
        let s = sigma - sqrt2;
        let u = 1.0 - w;
        -u * (2.0 - w) * s * s / ((2.0 * sqrt2 - sigma) * (u + s))
    };
    let t0 = 1e-16f64.ln();
    let t1 = (sqrt2 - 1.0).ln();
    let h = (t1 - t0) / steps as f64;
    let mut w = p * t0;
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let k1 = f(t, w);
        let k2 = f(t + 0.5 * h, w + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, w + 0.5 * h * k2);
        let k4 = f(t + h, w + h * k3);
        w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    1.0 - w.exp()
}

fn profile() -> SolitonProfile {
    SolitonProfile::build(&SolitonOptions::default()).unwrap()
}

#[test]
fn u_at_minus_one_matches_rk4_oracle() {
    let coarse = rk4_u_at_minus_one(40_000);
    let fine = rk4_u_at_minus_one(80_000);
    let oracle = fine + (fine - coarse) / 15.0;
    assert!((fine - coarse).abs() < 1e-9);
    // frozen value, also reproduced by an 8th-order adaptive integrator
    assert!((oracle - 0.748_840_120_67).abs() < 1e-10, "{oracle}");
    let opts = SolitonOptions { amplitudes: vec![1.0], ..Default::default() };
    let traj = integrate_bryant_ode(&opts).unwrap();
    assert!((traj.u_at_minus_one - oracle).abs() < 1e-10, "{} vs {oracle}", traj.u_at_minus_one);
}

#[test]
fn trajectory_connects_the_corners() {
    let traj = integrate_bryant_ode(&SolitonOptions::default()).unwrap();
    let ((s0, u0), (s1, u1)) = traj.endpoints();
    // first tabulated node sits where φ reaches phi_max, close to the corner
    assert!((s0 + 2f64.sqrt()).abs() < 0.02 && (u0 - 1.0).abs() < 1e-5);
    assert!(s1.abs() < 1e-3 && u1.abs() < 1e-3 && u1 > 0.0);
    assert!(traj.landing_defect <= 1e-9);
    for n in &traj.nodes {
        let u = n.u();
        assert!(u > 0.0 && u < 1.0 || (u - 1.0).abs() < 1e-12);
    }
}

#[test]
fn raw_profile_substitution_at_s_minus_one() {
    let traj = integrate_bryant_ode(&SolitonOptions::default()).unwrap();
    let raw = to_phi_profile(&traj).unwrap();
    let u = traj.u_at_minus_one;
    let r = ((1.0 - u * u) / (u * u)).sqrt();
    // φ(r(s)) = s²/(2 − s²) = 1 at s = −1
    assert!((raw.eval(r).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn tail_normalization() {
    let p = profile();
    assert!((p.tail_c2 - 1.0).abs() < 1e-6);
    assert!((p.tail_c4 - 2.0).abs() < 0.04, "c4 = {}", p.tail_c4);
    let wide = p.fit_tail(10.0, 200.0).unwrap();
    assert!(((wide[1] - p.tail_c4) / p.tail_c4).abs() < 5e-3);
    // the scale comes out at 1/2 for the default amplitude
    assert!((p.scale_c - 0.5).abs() < 1e-8, "{}", p.scale_c);
    let worst = p
        .r_grid()
        .iter()
        .zip(p.phi())
        .filter(|(r, _)| (10.0..=100.0).contains(*r))
        .map(|(r, f)| ((r * r * f - 1.0 - 2.0 / (r * r)) * r.powi(4)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 20.0, "{worst}");
}

#[test]
fn r_star_and_monotonicity() {
    let p = profile();
    assert!((p.eval(p.r_star).unwrap() - 2.0).abs() <= 1e-10);
    assert!(p.phi().iter().all(|&f| f > 0.0));
    assert!(p.phi_r().iter().all(|&d| d < 0.0));
    assert!(p.phi()[0] > 40.0);
    let crossings = p.phi().windows(2).filter(|w| (w[0] - 2.0) * (w[1] - 2.0) <= 0.0).count();
    assert_eq!(crossings, 1);
}

#[test]
fn steady_residual() {
    let p = profile();
    let node = p.node_residuals().iter().fold(0.0f64, |m, r| m.max(r.abs()));
    assert!(node <= 1e-6, "{node}");
    let mid = p.midpoint_residuals().iter().fold(0.0f64, |m, r| m.max(r.1.abs()));
    assert!(mid <= 1e-6, "{mid}");
}

#[test]
fn every_amplitude_normalizes_to_the_same_tail() {
    // members of the family differ near the tip but share the asymptotics
    let base = profile();
    for a in [0.01, 100.0] {
        let p = SolitonProfile::build(&SolitonOptions { amplitudes: vec![a], ..Default::default() }).unwrap();
        assert!((p.tail_c4 - 2.0).abs() < 0.04);
        assert!((p.scale_c - base.scale_c).abs() < 1e-9);
        assert!((p.r_star - base.r_star).abs() > 0.1);
        let mid = p.midpoint_residuals().iter().fold(0.0f64, |m, r| m.max(r.1.abs()));
        assert!(mid <= 1e-6, "{mid}");
    }
}
