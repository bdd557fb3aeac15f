use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use ricci_lab::pinching::*;

fn triple(r1: f64, r2: f64, r3: f64, rho: f64) -> RicciTriple {
    RicciTriple::new(r1, r2, r3, rho).unwrap()
}

#[test]
fn a_rho_examples() {
    let m = build_a_rho(&triple(1.0, 1.0, 1.0, 0.0));
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(m[(i, j)], if i == j { 6.0 } else { -3.0 });
        }
    }
    assert!(m.determinant().abs() < 1e-12);
    assert!((m * Vector3::new(1.0, 1.0, 1.0)).norm() == 0.0);

    let m = build_a_rho(&triple(0.0, 0.0, 1.0, 0.0));
    assert_eq!(m, Matrix3::new(2.0, 1.0, -1.0, 1.0, 2.0, -1.0, -1.0, -1.0, 2.0));

    // ρ = R is outside the valid range, but the formula still zeroes the coupling
    let m = build_a_rho(&RicciTriple { r: [0.2, 0.7, 1.1], rho: 2.0 });
    assert!((0..3).all(|i| (0..3).all(|j| i == j || m[(i, j)] == 0.0)));
}

#[test]
fn minor2_examples() {
    let c = minor2_identity_check(&triple(1.0, 1.0, 1.0, 0.0)).unwrap();
    assert_eq!((c.lhs, c.rhs), (27.0, 27.0));
    let c = minor2_identity_check(&triple(0.0, 0.0, 1.0, 0.0)).unwrap();
    assert_eq!((c.lhs, c.rhs), (3.0, 3.0));
    assert!(matches!(minor2_identity_check(&triple(1.0, 1.0, 1.0, 0.5)), Err(PinchingError::ShiftNotZero(_))));
}

#[test]
fn s_examples() {
    let one = triple(1.0, 1.0, 1.0, 0.0);
    let b = s_quantity([1.0, 0.0, 0.0], &one);
    assert_eq!((b.s, b.form, b.gap), (3.0, 6.0, 0.0));
    let b = s_quantity([1.0, 1.0, 1.0], &one);
    assert_eq!((b.s, b.form, b.gap), (0.0, 0.0, 0.0));
}

#[test]
fn s_bound_in_a_rotated_frame_picks_up_the_off_diagonal_norm() {
    // Ric with one off-diagonal entry e: |Ric|² exceeds the diagonal sum by 2e²,
    // so the gap is 2·2e²|h|²
    let e = 0.3;
    let ric = Matrix3::new(1.0, e, 0.0, e, 2.0, 0.0, 0.0, 0.0, 4.0);
    let h = [0.5, -1.0, 2.0];
    let b = s_quantity_frame(h, &ric, 0.35);
    let h_sq: f64 = h.iter().map(|x| x * x).sum();
    assert!((b.gap - 4.0 * e * e * h_sq).abs() < 1e-12 * b.scale, "{b:?}");
}

#[test]
fn product_examples() {
    let p = product_inequality_check(&triple(1.0, 1.0, 1.0, 0.0));
    assert_eq!(p.lhs, -3.0);
    assert_eq!(p.combined, 6.0);
    let p = product_inequality_check(&triple(0.0, 0.0, 1.0, 0.0));
    assert_eq!(p.lhs, 1.0);
    assert_eq!(p.combined, 0.0);
    assert_eq!(p.pairwise[0], 0.0);
}

#[test]
fn combined_product_bound_fails_at_one_one_ten() {
    // a = 8, b = c = −10, R = 12, Q = 102: R·abc = 9600, ⅓Q·264 = 8976
    let p = product_inequality_check(&triple(1.0, 1.0, 10.0, 0.0));
    assert_eq!(p.lhs, 9600.0);
    assert!((p.combined + 624.0).abs() < 1e-9);
    assert!((p.pairwise[0] - 600.0).abs() < 1e-9);
    assert!((p.pairwise[1] + 1236.0).abs() < 1e-9);
    assert!((p.pairwise[2] + 1236.0).abs() < 1e-9);
}

/// sup over r = (x, x, 1) of R·abc/(Q·Σa²), by golden section on the closed form.
fn diagonal_family_sup() -> f64 {
    let f = |x: f64| (1.0 + 2.0 * x) * (1.0 - 2.0 * x) / ((1.0 + 2.0 * x * x) * ((1.0 - 2.0 * x).powi(2) + 2.0));
    let (mut lo, mut hi) = (0.0, 0.5);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    f(0.5 * (lo + hi))
}

#[test]
fn product_ratio_supremum() {
    let sup = diagonal_family_sup();
    assert!(sup > 1.0 / 3.0 + 0.02 && sup < 2.0 / 3.0, "{sup}");
    let rep = random_sweep(&SweepOptions { samples: 200_000, ..Default::default() }).unwrap();
    assert!(rep.product_ratio_sup <= sup + 1e-9, "{} vs {sup}", rep.product_ratio_sup);
    assert!(rep.product_ratio_sup >= sup - 1e-4);
    let cert = certify_constants(&CertifyOptions::default()).unwrap();
    assert!((cert.product_ratio_sup - sup).abs() < 1e-5);
}

#[test]
fn determinant_expansion_at_the_symmetric_point() {
    // r = (1,1,1)/3: A_ρ = (2/3)I − ((1−ρ)/3)(J − I)
    let r = [1.0 / 3.0; 3];
    let rho = 0.1;
    let s: f64 = 1.0 - rho;
    let exact = (2.0f64 / 3.0).powi(3) - (2.0 / 3.0) * s * s / 3.0 - 2.0 * s.powi(3) / 27.0;
    assert!((det_expansion(r).eval(rho) - exact).abs() < 1e-15);
    let eig = build_a_rho(&RicciTriple { r, rho }).symmetric_eigenvalues().min();
    assert!((eig - 2.0 * rho / 3.0).abs() < 1e-14);
}

#[test]
fn certified_constants() {
    let cert = certify_constants(&CertifyOptions::default()).unwrap();
    assert!(cert.c_sharp <= 100.0 && cert.c_sharp >= 10.0);
    assert!(cert.c_flat > 0.0);
    // the minimum sits at the symmetric point with ρ = R/C, which the default
    // grid (400 subdivisions) misses by one node
    let s: f64 = 0.9;
    let symmetric = ((2.0f64 / 3.0).powi(3) - (2.0 / 3.0) * s * s / 3.0 - 2.0 * s.powi(3) / 27.0) / 0.1;
    assert!((cert.c_flat - symmetric).abs() < 1e-4, "{} vs {symmetric}", cert.c_flat);
    let exact = certify_constants(&CertifyOptions { simplex_n: 399, ..Default::default() }).unwrap();
    assert!((exact.c_flat - symmetric).abs() < 1e-12);
    assert!(cert.eig_ratio_min > 0.0 && (cert.eig_ratio_min - 2.0 / 3.0).abs() < 1e-3);
    assert!(cert.leading_minors_min.iter().all(|&m| m > 0.0));
    assert!(cert.det0_min >= -1e-10);
    assert!(cert.remainder_quadratic > 0.0 && cert.remainder_cubic > 0.0);
    let json: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
    assert_eq!(json["c_sharp"], 10.0);
    assert!(json["argmin"]["r"].is_array());
}

#[test]
fn det_a0_nonnegative_on_the_simplex() {
    for r in ordered_simplex(400) {
        assert!(det_expansion(r).det0 >= -1e-10, "{r:?}");
    }
}

#[test]
fn certified_ratios_are_scale_invariant() {
    let cert = certify_constants(&CertifyOptions::default()).unwrap();
    let p = cert.argmin;
    let base = RicciTriple { r: p.r, rho: p.rho };
    let ratio = |t: &RicciTriple| build_a_rho(t).determinant() / (t.rho * t.scalar().powi(5));
    let eig = |t: &RicciTriple| build_a_rho(t).symmetric_eigenvalues().min() / (t.rho * t.scalar());
    for lambda in [0.1, 10.0] {
        let t = base.scaled(lambda).unwrap();
        assert!((ratio(&t) - ratio(&base)).abs() < 1e-8 * ratio(&base).abs());
        assert!((eig(&t) - eig(&base)).abs() < 1e-10);
    }
}

#[test]
fn a_rho_stays_definite_for_every_admissible_shift() {
    // with ρ → R the coupling vanishes and det A_ρ/ρ → (2Q)³/R, which is (2/3)³ at the symmetric point
    let opts = CertifyOptions { candidates: vec![1.0001], simplex_n: 120, rho_samples: 60, ..Default::default() };
    let cert = certify_constants(&opts).unwrap();
    assert!(cert.c_flat > 0.29, "{cert:?}");
    for bad in [vec![], vec![1.0], vec![0.5, 10.0]] {
        assert!(matches!(certify_constants(&CertifyOptions { candidates: bad, ..Default::default() }), Err(PinchingError::Options(_))));
    }
    assert!(certify_constants(&CertifyOptions { rho_samples: 1, ..Default::default() }).is_err());
}

#[test]
fn sweep_is_deterministic_and_clean() {
    let opts = SweepOptions { samples: 100_000, seed: 7, chunks: 16 };
    let (a, b) = (random_sweep(&opts).unwrap(), random_sweep(&opts).unwrap());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.minor2_max_relative <= 1e-12);
    assert!(a.det0_min_relative >= -1e-10);
    assert_eq!(a.pairwise_violations[0], 0);
    assert!(a.s_gap_commuting_min >= -1e-12 && a.s_gap_frame_min >= -1e-12);
}

proptest! {
    #[test]
    fn expansion_matches_the_determinant(x in 0.0f64..1.0, y in 0.0f64..1.0, z in 0.01f64..1.0, f in 0.0f64..0.99) {
        let t = RicciTriple::from_unsorted([x, y, z], 0.0).unwrap();
        let rho = f * t.scalar();
        let m = build_a_rho(&RicciTriple { rho, ..t });
        let d = det_expansion(t.r).eval(rho);
        prop_assert!((m.determinant() - d).abs() <= 1e-12 * t.scalar().powi(6));
    }

    #[test]
    fn positive_definite_beyond_the_certified_threshold(x in 0.0f64..1.0, y in 0.0f64..1.0, z in 0.01f64..1.0, f in 1e-6f64..0.1) {
        let t = RicciTriple::from_unsorted([x, y, z], 0.0).unwrap();
        let t = RicciTriple { rho: f * t.scalar(), ..t };
        let m = build_a_rho(&t);
        prop_assert!(leading_minors(&m).iter().all(|&v| v > 0.0));
        prop_assert!(m.symmetric_eigenvalues().min() > 0.6 * t.rho * t.scalar());
    }

    #[test]
    fn two_s_bounds_the_form(x in 0.0f64..1.0, y in 0.0f64..1.0, z in 0.01f64..1.0, h in prop::array::uniform3(-1.0f64..1.0)) {
        let t = RicciTriple::from_unsorted([x, y, z], 0.0).unwrap();
        let t = RicciTriple { rho: t.scalar() / 20.0, ..t };
        let b = s_quantity(h, &t);
        prop_assert!(b.gap >= -1e-12 * b.scale.max(1e-300));
    }
}
