use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ricci_lab::lichnerowicz::*;
use ricci_lab::numerics::fit::observed_orders;
use std::f64::consts::PI;

fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn decompose_simple_tensors() {
    let basis = ModeBasis::new(2);
    let q = SphereQuadrature::for_degree(2);
    let (z, t) = (vec![-1.0, 0.0, 1.0], vec![-2.0, -1.0]);
    let metric = |_: f64, _: f64, _: f64, _: f64| [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
    let m = decompose(metric, &basis, &z, &t, &q).unwrap();
    let k0 = basis.index_of(Family::Omega, 0, 0, Parity::Even).unwrap();
    // ω ≡ 1 is (4π)^{1/2} Y₀₀
    for (k, c) in m.coeffs.iter().enumerate() {
        let want = if k == k0 { (4.0 * PI).sqrt() } else { 0.0 };
        assert!(c.iter().all(|v| (v - want).abs() < 1e-13), "{}", basis.harmonics[k].label());
    }
    let dz2 = |_: f64, _: f64, _: f64, _: f64| [[0.0; 3], [0.0; 3], [0.0, 0.0, 1.0]];
    let m = decompose(dz2, &basis, &z, &t, &q).unwrap();
    let kb = basis.index_of(Family::Beta, 0, 0, Parity::Even).unwrap();
    assert!((m.coefficient(kb, 1, 0) - (4.0 * PI).sqrt()).abs() < 1e-13);
    assert!(m.coeffs.iter().enumerate().filter(|(k, _)| *k != kb).all(|(_, c)| c.iter().all(|v| v.abs() < 1e-13)));
    let skew = |_: f64, _: f64, _: f64, _: f64| [[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
    assert!(matches!(decompose(skew, &basis, &z, &t, &q), Err(LichError::NonSymmetric { .. })));
}

#[test]
fn random_band_limited_round_trip() {
    let basis = ModeBasis::new(3);
    let q = SphereQuadrature::for_degree(3);
    let table = BasisTable::new(&basis, &q);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let c: Vec<f64> = (0..basis.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let samples: Vec<FrameTensor> = (0..table.points.len()).map(|k| table.assemble_at(&basis, |i| c[i], k)).collect();
    let back = table.project(&basis, &samples);
    let err = c.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-10, "{err}");
    // same through the closure interface at off-grid points
    let h = |th: f64, ph: f64, _: f64, _: f64| {
        let mut m = [[0.0; 3]; 3];
        for (i, harm) in basis.harmonics.iter().enumerate() {
            ricci_lab::lichnerowicz::modes::accumulate(&mut m, harm.family, &harm.frame_value(th, ph), c[i]);
        }
        m
    };
    let modes = decompose(h, &basis, &[0.0], &[-1.0], &q).unwrap();
    let err = (0..basis.len()).map(|k| (modes.coefficient(k, 0, 0) - c[k]).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-10, "{err}");
}

#[test]
fn gbar_norm_convention() {
    let t = -3.0;
    let h = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
    assert!((gbar_norm(&h, t) - 2f64.sqrt() / 6.0).abs() < 1e-15);
    let s = [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
    assert!((gbar_norm(&s, t) - (2.0 / 6.0f64).sqrt()).abs() < 1e-15);
}

fn gaussian_problem(kappa: f64, t: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let z = uniform(-20.0, 20.0, 401);
    let init: Vec<f64> = z.iter().map(|x| (-x * x / 4.0).exp()).collect();
    let f = |tt: f64| (-tt).powf(0.5 * kappa) / (-t[0]).powf(0.5 * kappa);
    let bc: Vec<f64> = t.iter().map(|&tt| f(tt) * heat_kernel(20.0, tt - t[0])).collect();
    (z, init, bc.clone(), bc)
}

/// Solution of `u_t = u_zz` from `e^{−z²/4}` after time `s`.
fn heat_kernel(z: f64, s: f64) -> f64 {
    (1.0 / (1.0 + s)).sqrt() * (-z * z / (4.0 * (1.0 + s))).exp()
}

#[test]
fn pure_heat_equation_matches_closed_form() {
    let mut errs = Vec::new();
    for k in [1, 2, 4] {
        let z = uniform(-20.0, 20.0, 200 * k + 1);
        let t = uniform(-3.0, -1.0, 20 * k + 1);
        let init: Vec<f64> = z.iter().map(|x| (-x * x / 4.0).exp()).collect();
        let bc: Vec<f64> = t.iter().map(|tt| heat_kernel(20.0, tt + 3.0)).collect();
        let p = ModeProblem { kappa: 0.0, z: &z, t: &t, initial: &init, left: &bc, right: &bc };
        let c = mode_evolve(&p, ModeScheme::Substituted).unwrap();
        let last = &c[(t.len() - 1) * z.len()..];
        errs.push(z.iter().zip(last).map(|(x, v)| (v - heat_kernel(*x, 2.0)).abs()).fold(0.0, f64::max));
    }
    let orders = observed_orders(&errs);
    assert!(orders.iter().all(|&p| p > 1.8), "{errs:?}");
}

#[test]
fn damped_and_substituted_agree() {
    let t = uniform(-40.0, -1.0, 400);
    for kappa in [0.0, 2.0, 6.0, 10.0] {
        let (z, init, l, r) = gaussian_problem(kappa, &t);
        let p = ModeProblem { kappa, z: &z, t: &t, initial: &init, left: &l, right: &r };
        let a = mode_evolve(&p, ModeScheme::Substituted).unwrap();
        let b = mode_evolve(&p, ModeScheme::Damped).unwrap();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale;
        assert!(err <= 1e-8, "κ={kappa}: {err}");
    }
}

#[test]
fn direct_crank_nicolson_converges_at_second_order() {
    let kappa = 6.0;
    let mut errs = Vec::new();
    for n in [48, 96, 192] {
        let t = uniform(-4.0, -1.0, n + 1);
        let (z, init, l, r) = gaussian_problem(kappa, &t);
        let p = ModeProblem { kappa, z: &z, t: &t, initial: &init, left: &l, right: &r };
        let direct = mode_evolve(&p, ModeScheme::DirectCn).unwrap();
        let subst = mode_evolve(&p, ModeScheme::Substituted).unwrap();
        let k = n * z.len();
        errs.push(direct[k..].iter().zip(&subst[k..]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    let orders = observed_orders(&errs);
    assert!(orders.iter().all(|&p| p > 1.8), "{errs:?} {orders:?}");
}

#[test]
fn neutral_mode_is_exact() {
    let z = uniform(-10.0, 10.0, 81);
    let t = uniform(-16.0, -1.0, 31);
    let init = vec![16.0 * 0.7; z.len()];
    let bc: Vec<f64> = t.iter().map(|tt| -tt * 0.7).collect();
    let p = ModeProblem { kappa: 2.0, z: &z, t: &t, initial: &init, left: &bc, right: &bc };
    for scheme in [ModeScheme::Substituted, ModeScheme::Damped] {
        let c = mode_evolve(&p, scheme).unwrap();
        for (it, tt) in t.iter().enumerate() {
            for v in &c[it * z.len()..(it + 1) * z.len()] {
                assert!((v - (-tt) * 0.7).abs() <= 1e-14 * (-tt), "{scheme:?}");
            }
        }
    }
}

#[test]
fn solver_errors() {
    let z = uniform(-1.0, 1.0, 11);
    let init = vec![0.0; 11];
    let t = vec![-1.0, -0.5, 0.0];
    let bc = vec![0.0; 3];
    let p = ModeProblem { kappa: 1.0, z: &z, t: &t, initial: &init, left: &bc, right: &bc };
    assert!(matches!(mode_evolve(&p, ModeScheme::Substituted), Err(LichError::TimeCrossesZero { .. })));
    let t = vec![-2.0, -1.0];
    let bc = vec![0.0; 2];
    let p = ModeProblem { kappa: 1.0, z: &z, t: &t, initial: &init, left: &bc, right: &bc };
    assert!(matches!(mode_evolve(&p, ModeScheme::Explicit), Err(LichError::Cfl { .. })));
    let t = uniform(-2.0, -1.0, 201);
    let bc = vec![0.0; 201];
    let p = ModeProblem { kappa: 1.0, z: &z, t: &t, initial: &init, left: &bc, right: &bc };
    assert!(mode_evolve(&p, ModeScheme::Explicit).is_ok());
}

#[test]
fn explicit_scheme_agrees_with_implicit() {
    let t = uniform(-3.0, -1.0, 2001);
    let (z, init, l, r) = gaussian_problem(2.0, &t);
    let p = ModeProblem { kappa: 2.0, z: &z, t: &t, initial: &init, left: &l, right: &r };
    let a = mode_evolve(&p, ModeScheme::Explicit).unwrap();
    let b = mode_evolve(&p, ModeScheme::Substituted).unwrap();
    let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(err < 1e-4, "{err}");
}

fn test_tensor(basis: &ModeBasis, family: Family, l: usize, m: i32, parity: Parity) -> TestTensor {
    TestTensor { terms: vec![(harmonic(basis, family, l, m, parity), ZProfile { amp: 1.0, k: 0.7, phase: 0.3 })] }
}

#[test]
fn chart_laplacian_matches_mode_system() {
    let basis = ModeBasis::new(3);
    let cases = [
        (Family::Omega, 1, 0, Parity::Even),
        (Family::Omega, 3, 2, Parity::Even),
        (Family::Beta, 2, 1, Parity::Even),
        (Family::Sigma, 1, -1, Parity::Even),
        (Family::Sigma, 2, 1, Parity::Odd),
        (Family::Chi, 2, 0, Parity::Even),
        (Family::Chi, 3, -2, Parity::Odd),
    ];
    for (fam, l, m, par) in cases {
        let tt = test_tensor(&basis, fam, l, m, par);
        let errs: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&e| lichnerowicz_residual(&tt, -1.5, &ChartWindow::default(), e).unwrap().sup).collect();
        let orders = observed_orders(&errs);
        assert!(orders.iter().all(|&p| p >= 1.8), "{fam:?} {l} {m}: {errs:?}");
    }
}

#[test]
fn chart_laplacian_of_beta_and_zero() {
    let basis = ModeBasis::new(2);
    let zero = TestTensor { terms: vec![] };
    assert_eq!(lichnerowicz_residual(&zero, -1.0, &ChartWindow::default(), 0.01).unwrap().sup, 0.0);
    // β(z) dz⊗dz with β = cos(0.7z + 0.3): Δ_L is the flat Laplacian
    let tt = TestTensor { terms: vec![(harmonic(&basis, Family::Beta, 0, 0, Parity::Even), ZProfile { amp: 1.0, k: 0.7, phase: 0.3 })] };
    let r = lichnerowicz_residual(&tt, -1.0, &ChartWindow::default(), 0.01).unwrap();
    assert!(r.sup < 1e-4 * r.scale, "{}", r.sup);
    assert!(r.to_csv().lines().count() == r.points.len() + 1);
    let near_pole = ChartWindow { theta: (0.05, 1.0), ..ChartWindow::default() };
    assert!(matches!(lichnerowicz_residual(&tt, -1.0, &near_pole, 0.01), Err(LichError::ChartPole { .. })));
}

#[test]
fn eigenvalue_tables_feed_the_residual() {
    // a wrong tensor eigenvalue shows up in the chart comparison
    let mut tables = EigenTables::round_sphere(2);
    tables.tensor[2] = 3.0;
    let wrong = ModeBasis::with_tables(2, &tables).unwrap();
    let tt = test_tensor(&wrong, Family::Chi, 2, 1, Parity::Even);
    let r = lichnerowicz_residual(&tt, -1.0, &ChartWindow::default(), 0.005).unwrap();
    assert!(r.sup > 0.1, "{r:?}");
}

#[test]
fn lie_derivatives_of_killing_and_conformal_fields() {
    let basis = ModeBasis::new(2);
    let (z, t) = cylinder_grid(12.0, 0.5, 0.5, 0.1);
    for field in [CylinderField::Rotation { axis: [0.0, 0.0, 1.0] }, CylinderField::Rotation { axis: [0.36, 0.48, 0.8] }, CylinderField::Translation] {
        let r = lie_derivative_invariant_check(&field, &basis, &z, &t, ModeScheme::Substituted).unwrap();
        assert!(r.identity_defect <= 1e-12 && r.evolution_residual <= 1e-12, "{r:?}");
    }
    let field = CylinderField::Conformal { axis: [0.6, 0.0, 0.8] };
    let r = lie_derivative_invariant_check(&field, &basis, &z, &t, ModeScheme::Damped).unwrap();
    assert!(r.sup_norm > 0.1);
    assert!(r.identity_defect <= 1e-12 * r.sup_norm && r.evolution_residual <= 1e-12 * r.sup_norm.max(1.0), "{r:?}");
}

#[test]
fn neutral_data_recover_psi() {
    let basis = ModeBasis::new(2);
    let q = [0.1, -0.2, 0.05];
    let (z, t) = cylinder_grid(64.0, 0.25, 1.0, 0.05);
    let data = BoundaryData::neutral(&basis, q, z, t);
    let rep = run_central_decay(&basis, &data, &CentralDecayOptions::default()).unwrap();
    for j in 0..3 {
        assert!((rep.psi[j] - q[j]).abs() <= 1e-6, "{rep:?}");
    }
    assert!(rep.total <= 1e-8, "{rep:?}");
}

#[test]
fn hypotheses_are_enforced() {
    let basis = ModeBasis::new(1);
    let (z, t) = cylinder_grid(64.0, 0.5, 2.0, 0.1);
    // |(−t)q·Y g|_ḡ = √2|q·Y|/2 exceeds 1 for large q
    let data = BoundaryData::neutral(&basis, [0.0, 5.0, 0.0], z, t);
    assert!(matches!(run_central_decay(&basis, &data, &CentralDecayOptions::default()), Err(LichError::HypothesisViolated { .. })));
}

#[test]
fn random_data_are_normalized_and_averaged() {
    let basis = ModeBasis::new(2);
    let opts = CentralDecayOptions::default();
    let (z, t) = cylinder_grid(64.0, opts.dz, opts.dt_max, opts.dt_rel);
    let q = SphereQuadrature::new(opts.sphere.0, opts.sphere.1);
    let data = BoundaryData::random(&basis, 2, 3, z, t, &q);
    let rep = run_central_decay(&basis, &data, &opts).unwrap();
    assert!(rep.boundary_early <= 1.0 && rep.boundary_late <= 1.0);
    assert!(rep.averaging_defect <= 1e-12, "{rep:?}");
    assert!(rep.total > 0.0 && rep.total < 1.0);
}

#[test]
fn decay_with_cylinder_length() {
    let basis = ModeBasis::new(2);
    let rep = decay_study(&basis, &[64.0, 128.0, 256.0], 2, 7, &CentralDecayOptions::default()).unwrap();
    assert!((rep.sigma_exponent + 0.5).abs() <= 0.2, "{rep:?}");
    assert!((rep.beta_exponent + 1.0).abs() <= 0.2, "{rep:?}");
    assert!(rep.total_exponent <= -0.4, "{rep:?}");
    // the slowest tensor mode has ν = 2, so χ decays like L^{−(ν+2)/2} = L^{−2}
    assert!((rep.chi_exponent + 2.0).abs() <= 0.2, "{rep:?}");
    let json = serde_json::to_string(&rep).unwrap();
    assert!(json.contains("chi_exponent"));
}

#[test]
fn mode_table_csv() {
    let basis = ModeBasis::new(1);
    let (z, t) = cylinder_grid(8.0, 1.0, 1.0, 0.5);
    let data = BoundaryData::neutral(&basis, [0.0, 0.1, 0.0], z, t);
    let m = evolve_modes(&basis, &data, ModeScheme::Substituted).unwrap();
    let csv = m.to_csv(2);
    assert!(csv.starts_with("harmonic,eigenvalue,damping,z,t,coefficient"));
    assert!(csv.contains("omega_1_0"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn substitution_is_exact_for_any_damping(kappa in 0.0f64..14.0, amp in -2.0f64..2.0, width in 1.0f64..6.0) {
        let z = uniform(-10.0, 10.0, 101);
        let t = uniform(-9.0, -1.0, 81);
        let init: Vec<f64> = z.iter().map(|x| amp * (-x * x / width).exp()).collect();
        let bc: Vec<f64> = t.iter().map(|tt| amp * 0.1 * (-tt).sqrt()).collect();
        let p = ModeProblem { kappa, z: &z, t: &t, initial: &init, left: &bc, right: &bc };
        let a = mode_evolve(&p, ModeScheme::Substituted).unwrap();
        let b = mode_evolve(&p, ModeScheme::Damped).unwrap();
        let scale = a.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale;
        prop_assert!(err <= 1e-8);
    }

    #[test]
    fn neutral_solutions_for_any_weights(q in -1.0f64..1.0, t0 in -50.0f64..-2.0) {
        let z = uniform(-5.0, 5.0, 41);
        let t = uniform(t0, -1.0, 21);
        let init = vec![-t0 * q; z.len()];
        let bc: Vec<f64> = t.iter().map(|tt| -tt * q).collect();
        let p = ModeProblem { kappa: 2.0, z: &z, t: &t, initial: &init, left: &bc, right: &bc };
        let c = mode_evolve(&p, ModeScheme::Substituted).unwrap();
        let nz = z.len();
        for (it, tt) in t.iter().enumerate() {
            prop_assert!(c[it * nz..(it + 1) * nz].iter().all(|v| (v + tt * q).abs() <= 1e-13 * (-t0)));
        }
    }
}
