use ricci_lab::barrier::*;
use ricci_lab::soliton::*;
use std::sync::{Arc, OnceLock};

fn fixture() -> &'static (Arc<SolitonProfile>, Arc<ZetaFunction>) {
    static F: OnceLock<(Arc<SolitonProfile>, Arc<ZetaFunction>)> = OnceLock::new();
    F.get_or_init(|| {
        let sol = SolitonProfile::build(&SolitonOptions::default()).unwrap();
        let zeta = build_zeta(&ZetaFunction::default_grid(1e-9, 10_000, 500)).unwrap();
        (Arc::new(sol), Arc::new(zeta))
    })
}

fn psi(a: f64) -> BarrierFunction {
    let (sol, zeta) = fixture();
    assemble_psi(a, 5.0, zeta.clone(), sol.clone()).unwrap()
}

const SPEC_A: [f64; 3] = [100.0, 200.0, 400.0];
const LARGE_A: [f64; 3] = [1e7, 2e7, 4e7];

#[test]
fn zeta_matches_symbolic_antiderivative() {
    // (s, ζ, ζ', ζ'') from the exact partial-fraction antiderivative of the
    // regularized right-hand side, evaluated in rational arithmetic
    let table = [
        (0.001, 5008814454.7543457366, -15017643925152.616626, 60052946775472849.893),
        (0.01, 5086786.8463265043788, -1517508920.1573166074, 605267677547.34499723),
        (0.3, 226.98895905217772599, -2333.9307812803686347, 30122.647929477136316),
        (0.5, 40.128999488890028060, -315.35466394198857975, 2532.1279835774256725),
        (0.9, -0.99594956213632895394, -16.888929925609452116, 185.86280289117741544),
        (0.99, -1.7645661218178802264, 0.31629340133990472824, 222.77250922513135030),
        (1.0, -1.75, 2.625, 239.625),
        (1.05, -1.2664760547968151083, 18.092516335787049481, 407.32216525520088755),
        (1.1, 0.29127673304057628679, 47.895361926546515317, 855.09573476849944214),
        (1.125, 1.7967191555564147856, 74.379714406501411474, 1298.2099267354418657),
    ];
    let (_, zeta) = fixture();
    for (s, z, z1, z2) in table {
        let (a, b, c) = zeta.eval3(s).unwrap();
        let close = |x: f64, y: f64| ((x - y) / y.abs().max(1.0)).abs() < 1e-10;
        assert!(close(a, z) && close(b, z1) && close(c, z2), "s={s}: {a} {b} {c}");
    }
}

#[test]
fn zeta_anchors() {
    let (_, zeta) = fixture();
    assert!((zeta.eval(1.0).unwrap() + 1.75).abs() <= 1e-6);
    let lead = zeta.small_s_coefficient(1e-3, 1e-2, 50).unwrap();
    assert!((lead - 5.0).abs() <= 0.05, "{lead}");
    assert_eq!(zeta_rhs_singular_coefficient(), -0.875);
    // no jump in value or slope across s = 1
    let h = 1e-6;
    let (l, r) = (zeta.eval3(1.0 - h).unwrap(), zeta.eval3(1.0 + h).unwrap());
    assert!((l.0 - r.0).abs() < 1e-5 && (l.1 - r.1).abs() < 1e-3);
}

#[test]
fn zeta_grid_errors() {
    assert!(build_zeta(&[0.0, 0.5, 1.0]).is_err());
    assert!(build_zeta(&[0.5, 1.0, 1.2]).is_err());
    assert!(build_zeta(&[0.5, 0.9, 1.1]).is_err());
    let (_, zeta) = fixture();
    assert!(zeta.eval(1.2).is_err());
}

#[test]
fn refining_the_zeta_grid_changes_nothing() {
    let (_, zeta) = fixture();
    let coarse = build_zeta(&ZetaFunction::default_grid(1e-9, 2_000, 100)).unwrap();
    for s in [1e-6, 1e-3, 0.4, 0.95, 1.07] {
        let (a, b) = (zeta.eval(s).unwrap(), coarse.eval(s).unwrap());
        assert!(((a - b) / a).abs() < 1e-12, "{s}");
    }
}

#[test]
fn beta_boundary_values_and_residual() {
    let (sol, zeta) = fixture();
    for a in SPEC_A {
        let n = 5.0;
        let beta = build_beta(a, n, zeta, sol).unwrap();
        let (b, b1, _) = beta.eval3(n);
        let (z, z1, _) = zeta.eval3(n / a).unwrap();
        assert_eq!(b, a.powi(-3) * z - 1.0 / a);
        assert_eq!(b1, a.powi(-4) * z1);
        let worst = beta.r_grid().windows(2).map(|w| beta.residual(sol, 0.5 * (w[0] + w[1])).unwrap().abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-8, "a={a}: {worst}");
    }
}

#[test]
fn beta_is_bounded_uniformly_in_a() {
    let sups: Vec<f64> = SPEC_A.iter().chain(&LARGE_A).map(|&a| psi(a).beta.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))).collect();
    let (lo, hi) = sups.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    assert!(hi / lo < 1.01, "{sups:?}");
}

#[test]
fn junction_and_anchor_values() {
    let (sol, zeta) = fixture();
    for a in SPEC_A.iter().chain(&LARGE_A).copied() {
        let p = psi(a);
        let j = p.junction_jumps().unwrap();
        assert!(j.value_jump <= 1e-8 && j.derivative_jump <= 1e-8, "{j:?}");
        let tip = p.psi(p.s_lo()).unwrap();
        assert!((tip - (2.0 + p.beta.eval3(sol.r_star).0 / a)).abs() < 1e-12 * tip.abs().max(1.0));
        let one = p.psi(1.0).unwrap();
        let direct = sol.eval(a).unwrap() - a.powi(-2) + a.powi(-4) * zeta.eval(1.0).unwrap();
        assert!((one - direct).abs() <= 1e-14 * a.powi(-2), "a={a}: {one} vs {direct}");
    }
}

#[test]
fn operator_matches_the_outer_expansion() {
    for a in SPEC_A.iter().chain(&LARGE_A).copied() {
        let p = psi(a);
        let d1 = p.barrier_operator(1.0).unwrap() * a.powi(4);
        assert!((-1.6..=-1.4).contains(&d1), "a={a}: {d1}");
        let s: f64 = 9.0 / 8.0;
        let expected = 4.0 * s.powi(-4) - 5.0 * s.powi(-5) - 0.5 * s.powi(28);
        let d98 = p.barrier_operator(s).unwrap() * a.powi(4);
        assert!(((d98 - expected) / expected).abs() < 2e-3, "a={a}: {d98} vs {expected}");
    }
    assert!(psi(100.0).barrier_operator(1.2).is_err());
}

#[test]
fn junction_search() {
    let (sol, zeta) = fixture();
    let n = find_n(100.0, &SPEC_A, zeta, sol, 10_000, 50).unwrap();
    assert_eq!(n, 5);
    for a_min in [200.0, 400.0] {
        assert!(find_n(a_min, &SPEC_A, zeta, sol, 10_000, 50).unwrap() <= n);
    }
    // same N for a different range of a
    assert_eq!(find_n(1e7, &LARGE_A, zeta, sol, 10_000, 50).unwrap(), n);
    assert!(find_n(100.0, &SPEC_A, zeta, sol, 10_000, 3).is_err());
}

#[test]
fn outer_piece_is_a_strict_supersolution() {
    for a in SPEC_A.iter().chain(&LARGE_A).copied() {
        let p = psi(a);
        let worst = p.operator_samples(p.s_junction(), S_MAX, 10_000).unwrap().iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        assert!(worst < 0.0, "a={a}: {worst}");
    }
}

#[test]
fn whole_barrier_is_a_strict_supersolution_for_large_a() {
    for a in LARGE_A {
        let p = psi(a);
        let worst = p.operator_samples(p.s_lo(), S_MAX, 20_000).unwrap().iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        assert!(worst < 0.0, "a={a}: {worst}");
    }
}

#[test]
fn inner_piece_needs_a_beyond_the_quadratic_beta_terms() {
    // D = −a + (terms quadratic in β) on the inner piece; with |β| ≈ 6e3 the
    // quadratic part is ≈ 6e6, so small a cannot work
    let p = psi(100.0);
    let worst = p.operator_samples(p.s_lo(), p.s_junction(), 2_000).unwrap().iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    assert!(worst > 1e6);
    assert!(p.psi(p.s_lo()).unwrap() < 0.0);
}

#[test]
fn positivity_inequalities() {
    for a in SPEC_A.iter().chain(&LARGE_A).copied() {
        let rep = verify_positivity(&psi(a), 2_000, 4_000).unwrap();
        assert!((rep.two_plus_zeta1 - 0.25).abs() <= 1e-6);
        assert!(rep.theta > 0.0);
        assert!(rep.inequality_margin >= 0.0, "a={a}: {rep:?}");
        if LARGE_A.contains(&a) {
            assert!(rep.passed && rep.floor_margin >= 0.0, "a={a}: {rep:?}");
        }
    }
    let (_, zeta) = fixture();
    let (t1, t2) = (find_theta(zeta, 500).unwrap(), find_theta(zeta, 4_000).unwrap());
    assert!(((t1 - t2) / t2).abs() < 0.05);
}

#[test]
fn cap_integral() {
    let mut last = 0.0;
    for a in LARGE_A {
        let cap = cap_diameter_integral(&psi(a)).unwrap();
        assert!(cap.ratio > 0.03, "{cap:?}");
        assert!(cap.integral > last);
        assert!(((cap.cylinder_quadrature - cap.cylinder_level) / cap.cylinder_level).abs() < 1e-12, "{cap:?}");
        assert!(cap.gap > 0.0 && cap.cylinder_level > cap.integral, "{cap:?}");
        assert!((cap.cylinder_level - cap.integral - cap.gap).abs() < 1e-9 * cap.integral);
        last = cap.integral;
    }
    assert!(matches!(cap_diameter_integral(&psi(100.0)), Err(BarrierError::NonPositive { .. })));
}
