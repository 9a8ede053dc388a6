//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Every tolerance is pinned here, in code.

use kirchhoff::config::parse_config;
use kirchhoff::dynamics::{drift_report, integrate, TimePath};
use kirchhoff::frobenius::{
    frobenius_residual, frobenius_solve, perturbation_first_order, perturbation_setup,
    LogLaurentSeries, PerturbationCase,
};
use kirchhoff::lax;
use kirchhoff::liepoisson::{
    bracket, invariants_of, poisson_matrix, Dim, KirchhoffModel, Observable, ObservableKind,
    PhaseState,
};
use kirchhoff::linalg::lstsq;
use kirchhoff::monodromy;
use kirchhoff::painleve;
use kirchhoff::runner::{run, RunnerOptions};
use kirchhoff::scalar::{c64, C64};
use kirchhoff::{dim4, ModelCase};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn pass(criterion: &str, detail: String) {
    println!("[{criterion}] PASS: {detail}");
}

fn kirchhoff_b0() -> KirchhoffModel {
    KirchhoffModel::kirchhoff_e3(
        c64(1.0, 0.0),
        c64(2.0, 0.0),
        c64(0.0, 0.0),
        c64(0.0, 0.0),
        c64(1.0, 0.0),
        c64(3.0, 0.0),
    )
    .unwrap()
}

fn kirchhoff_perturbed() -> KirchhoffModel {
    KirchhoffModel::kirchhoff_e3(
        c64(1.0, 0.0),
        c64(2.0, 0.0),
        c64(0.0, 0.0),
        c64(0.1, 0.0),
        c64(1.0, 0.0),
        c64(3.0, 0.0),
    )
    .unwrap()
}

fn max_norm(v: &DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn criterion_01_balance_family() {
    // B = 0: nondegenerate balances are recovered and lie on the closed-form
    // family (membership residual <= 1e-8)
    let model = kirchhoff_b0();
    let balances = painleve::find_balances(&model, 200, 42);
    let nondeg: Vec<_> = balances.iter().filter(|b| !b.degenerate).collect();
    assert!(!nondeg.is_empty(), "no nondegenerate balances found");
    for b in &nondeg {
        let mem = painleve::family_membership(&model, &b.residue)
            .expect("nondegenerate balance must lie on the family");
        assert!(mem.residual <= 1e-8, "membership residual {:e}", mem.residual);
    }

    // b3 - b1 = 0.1: only degenerate balances across >= 500 starts
    let perturbed = kirchhoff_perturbed();
    let balances = painleve::find_balances(&perturbed, 500, 42);
    assert!(
        balances.iter().all(|b| b.degenerate),
        "unexpected nondegenerate balance with B != 0"
    );
    pass(
        "criterion 01",
        format!(
            "{} family points recovered (B = 0); {} balances all degenerate (B != 0, 500 starts)",
            nondeg.len(),
            balances.len()
        ),
    );
}

#[test]
fn criterion_02_kowalevski_exponents() {
    let model = kirchhoff_b0();
    let expected = [-2.0, -1.0, 0.0, 1.0, 1.0, 1.0];
    let balances = painleve::find_balances(&model, 200, 7);
    let mut checked = 0;
    for b in balances.iter().filter(|b| !b.degenerate) {
        let ev = painleve::kowalevski_exponents(&model, &b.residue);
        for (e, x) in ev.iter().zip(expected) {
            assert!(
                (e - c64(x, 0.0)).norm() <= 1e-8,
                "exponent {e} deviates from {x}"
            );
        }
        checked += 1;
    }
    assert!(checked > 0);
    pass(
        "criterion 02",
        format!("exponents {{-2,-1,0,1,1,1}} within 1e-8 on {checked} family balances"),
    );
}

#[test]
fn criterion_03_kirchhoff_ln_coefficient() {
    let model = kirchhoff_b0();
    let alpha = c64(0.6, 0.0);
    let beta = c64(0.8, 0.0);
    let m31 = c64(0.35, 0.0);
    let rep =
        perturbation_first_order(&model, PerturbationCase::Kirchhoff, alpha, beta, m31).unwrap();
    let ln4 = rep.ln_coefficients.get(&4).copied().unwrap();
    let exact = c64(0.0, -0.5);
    assert!(
        (ln4 - exact).norm() <= 1e-10,
        "series ln coefficient {ln4} vs -i/2"
    );
    assert!(rep.k3_k5_nonconstant_max <= 1e-12, "k3/k5 not constant");

    // independent least-squares fit on a numerically integrated first-order
    // system: solution components span {t^-2, t^-1, 1, t, ln(t)/t}
    let setup =
        perturbation_setup(&model, PerturbationCase::Kirchhoff, alpha, beta, m31).unwrap();
    let sys = setup.frobenius_system();
    let sol = frobenius_solve(&sys).unwrap();
    assert!(frobenius_residual(&sys, &sol.series) <= 1e-12);
    // start from particular + a fixed homogeneous mixture to exercise the basis
    let k0 = [
        c64(0.3, 0.0),
        c64(-0.2, 0.1),
        c64(0.1, 0.0),
        c64(0.05, -0.1),
        c64(-0.4, 0.0),
    ];
    let t0 = 1.0;
    let mut y0 = DVector::from_iterator(
        5,
        sol.series.iter().map(|s| s.eval(c64(t0, 0.0))),
    );
    for (j, &kj) in k0.iter().enumerate() {
        let tpow = c64(t0, 0.0).powi(setup.basis_exponents[j] as i32);
        for i in 0..5 {
            y0[i] += setup.basis[(i, j)] * kj * tpow;
        }
    }
    let samples = monodromy::affine_flow_samples(&sys, &y0, 1.0, 3.0, 1e-11).unwrap();
    assert!(samples.len() >= 20, "need enough fit points");
    let n = samples.len();
    let basis_f = |t: f64| -> [f64; 5] {
        [1.0 / (t * t), 1.0 / t, 1.0, t, t.ln() / t]
    };
    let mut design = DMatrix::<C64>::zeros(n, 5);
    for (r, (t, _)) in samples.iter().enumerate() {
        let b = basis_f(t.re);
        for c in 0..5 {
            design[(r, c)] = c64(b[c], 0.0);
        }
    }
    // component-wise fit, collect the ln(t)/t coefficient vector
    let mut d_ln = DVector::<C64>::zeros(5);
    for comp in 0..5 {
        let rhs = DVector::from_iterator(n, samples.iter().map(|(_, y)| y[comp]));
        let coef = lstsq(&design, &rhs);
        d_ln[comp] = coef[4];
    }
    // in exact arithmetic d_ln = lncoef * v4
    let y = setup.basis.clone().lu().solve(&d_ln).unwrap();
    let fitted = y[3];
    assert!(
        (fitted - exact).norm() <= 1e-4,
        "fitted ln coefficient {fitted} vs -i/2"
    );
    for (j, v) in y.iter().enumerate() {
        if j != 3 {
            assert!(v.norm() <= 1e-4, "spurious ln component along k{}", j + 1);
        }
    }
    pass(
        "criterion 03",
        format!(
            "ln(k4) = {ln4} (series, 1e-10) and {fitted} (integration + least squares, 1e-4); k3/k5 constant to {:.1e}",
            rep.k3_k5_nonconstant_max
        ),
    );
}

#[test]
fn criterion_04_chaplygin_ln_coefficient() {
    let model = kirchhoff_b0();
    let rep = perturbation_first_order(
        &model,
        PerturbationCase::Chaplygin,
        c64(0.6, 0.0),
        c64(0.8, 0.0),
        c64(0.0, 0.0),
    )
    .unwrap();
    let ln4 = rep.ln_coefficients.get(&4).copied().unwrap();
    let exact = c64(0.6 / 2f64.sqrt(), 0.0);
    assert!((ln4 - exact).norm() <= 1e-10, "{ln4} vs (3/5)/sqrt(2)");
    assert!(rep.k3_k5_nonconstant_max <= 1e-12);
    pass(
        "criterion 04",
        format!("Chaplygin ln(k4) = {ln4} vs (3/5)/sqrt(2) = {exact} within 1e-10"),
    );
}

#[test]
fn criterion_05_monodromy_cross_check() {
    let model = kirchhoff_b0();
    let setup = perturbation_setup(
        &model,
        PerturbationCase::Kirchhoff,
        c64(0.6, 0.0),
        c64(0.8, 0.0),
        c64(0.35, 0.0),
    )
    .unwrap();
    let affine = monodromy::affine_monodromy(&setup.frobenius_system(), 1.0, 1e-12).unwrap();
    // k4-direction magnitude of the shift vs 2 pi |ln coefficient| = pi
    let y = setup.basis.clone().lu().solve(&affine.particular_shift).unwrap();
    let measured = y[3].norm();
    let expected = std::f64::consts::TAU * 0.5;
    let rel = (measured - expected).abs() / expected;
    assert!(rel <= 1e-5, "shift magnitude rel deviation {rel:e}");
    assert!(affine.shift_in_log_direction);

    // homogeneous monodromy of the variational matrix is the identity
    let id = DMatrix::<C64>::identity(5, 5);
    let id_dev = (&affine.homogeneous.matrix - &id)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    assert!(id_dev <= 1e-7, "homogeneous monodromy deviates {id_dev:e}");
    assert!(!affine.homogeneous.log_detected);
    pass(
        "criterion 05",
        format!("loop shift k4 magnitude rel dev {rel:.2e} (<= 1e-5); homogeneous monodromy = Id to {id_dev:.2e}"),
    );
}

#[test]
fn criterion_06_lax_identity() {
    // the displayed pair satisfies Ldot = [L, Q] iff c3 - c1 = a3 - a1
    // (normalization reachable by the Poisson rescaling p -> nu p), so the
    // acceptance model is the normalized B = 0 Chaplygin case.
    let model = KirchhoffModel::chaplygin_e3(
        c64(1.0, 0.0),
        c64(2.0, 0.0),
        c64(0.3, 0.0),
        c64(0.0, 0.0),
        c64(0.0, 0.0),
        c64(1.0, 0.0),
        c64(2.0, 0.0),
    )
    .unwrap();
    assert!(lax::lax_normalization_defect(&model).unwrap().norm() <= 1e-15);
    let x0 = PhaseState::e3(
        [c64(0.4, 0.1), c64(-0.3, 0.2), c64(0.0, 0.0)],
        [c64(0.5, -0.2), c64(0.1, 0.3), c64(-0.6, 0.1)],
    );
    let path = TimePath::real_interval(0.0, 1.0).unwrap();
    let traj = integrate(&model, &x0, &path, 1e-11).unwrap();
    let lambdas = [c64(0.7, 0.0), c64(1.0, 1.0), c64(-2.0, 0.0)];
    let residual = lax::lax_residual(&model, &traj, &lambdas).unwrap();
    assert!(residual <= 1e-9, "Lax residual {residual:e}");
    pass(
        "criterion 06",
        format!("Lax residual {residual:.2e} <= 1e-9 along a unit-time trajectory at lambda = 0.7, 1+i, -2"),
    );
}

#[test]
fn criterion_07_spectral_curve() {
    let model = KirchhoffModel::chaplygin_e3(
        c64(1.0, 0.0),
        c64(2.0, 0.0),
        c64(0.3, 0.0),
        c64(0.0, 0.0),
        c64(0.0, 0.0),
        c64(1.0, 0.0),
        c64(3.0, 0.0),
    )
    .unwrap();
    let x0 = PhaseState::e3(
        [c64(0.4, 0.1), c64(-0.3, 0.2), c64(0.0, 0.0)],
        [c64(0.5, -0.2), c64(0.1, 0.3), c64(-0.6, 0.1)],
    );
    let poly = lax::spectral_poly(&model, &x0).unwrap();
    let odd = poly.max_odd_lambda();
    assert!(odd <= 1e-10 * poly.max_abs().max(1.0), "odd-lambda {odd:e}");
    let f3 = x0.coord(3) * x0.coord(3) + x0.coord(4) * x0.coord(4) + x0.coord(5) * x0.coord(5);
    let f3_dev = (poly.coeff(2, 0) - f3).norm();
    assert!(f3_dev <= 1e-10, "mu^2 lambda^0 vs <p,p>: {f3_dev:e}");

    let path = TimePath::real_interval(0.0, 1.0).unwrap();
    let traj = integrate(&model, &x0, &path, 1e-11).unwrap();
    let drift = lax::spectral_flow_drift(&model, &traj).unwrap();
    assert!(drift <= 1e-8, "coefficient drift {drift:e}");

    let rep = lax::curve_match(&model, &x0).unwrap();
    assert_eq!(rep.terms.len(), 8, "term-by-term table present");
    // a1 = 1 here: the identified-lambda reading must agree term by term;
    // any discrepancy would be listed in the table rows
    assert!(rep.max_rel_deviation <= 1e-10, "printed-term deviation {:e}", rep.max_rel_deviation);
    assert!(rep.unlisted_coeff_max <= 1e-10);
    pass(
        "criterion 07",
        format!(
            "odd-lambda max {odd:.2e}; mu^2 coefficient = <p,p> to {f3_dev:.2e}; flow drift {drift:.2e}; curve table max rel dev {:.2e}",
            rep.max_rel_deviation
        ),
    );
}

#[test]
fn criterion_08_e4_integrability() {
    let model = KirchhoffModel::kirchhoff_e4(
        c64(1.0, 0.0),
        c64(1.5, 0.0),
        c64(2.0, 0.0),
        c64(0.5, 0.0),
        c64(1.0, 0.0),
        c64(2.0, 0.0),
        &[],
    )
    .unwrap();
    let inv = dim4::involution_matrix(&model, 1000, 42).unwrap();
    assert!(inv.max_offdiagonal <= 1e-10, "bracket max {:e}", inv.max_offdiagonal);

    let mut rng = ChaCha12Rng::seed_from_u64(42);
    let x0 = PhaseState::from_vector(
        Dim::E4,
        DVector::from_fn(10, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
    )
    .unwrap();
    let path = TimePath::real_interval(0.0, 1.0).unwrap();
    let traj = integrate(&model, &x0, &path, 1e-10).unwrap();
    let obs = dim4::integral_set(&model).unwrap();
    let rep = drift_report(&traj, &obs, 1e-10);
    let worst = rep
        .per_observable
        .iter()
        .map(|d| d.max_rel_drift)
        .fold(0.0, f64::max);
    assert!(worst <= 1e-8, "integral drift {worst:e}");
    pass(
        "criterion 08",
        format!(
            "pairwise brackets of {{H, F1..F5}} <= {:.2e} at 1000 states; drift <= {worst:.2e} along unit time",
            inv.max_offdiagonal
        ),
    );
}

#[test]
fn criterion_09_proposition1_witnesses() {
    let mut rates = Vec::new();
    for b in [(1, 2, 1), (1, 2, 3), (3, 4, 1), (3, 4, 3)] {
        let w = dim4::proposition1_witness(&[(b, c64(1.0, 0.0))], 42).unwrap();
        assert!(
            w.rate.norm() >= 1e-6,
            "witness for B{:?} too weak: {:e}",
            b,
            w.rate.norm()
        );
        rates.push(format!("B{}{}{} -> d{}/dt = {:.3}", b.0, b.1, b.2, w.observable, w.rate.norm()));
    }
    pass("criterion 09", rates.join("; "));
}

#[test]
fn criterion_10_chaplygin_e4_invariant_relations() {
    let model = KirchhoffModel::chaplygin_e4(kirchhoff::liepoisson::ChaplyginE4Coeffs {
        a1212: c64(1.0, 0.0),
        a1313: c64(1.5, 0.0),
        a3434: c64(2.0, 0.0),
        a1234: c64(0.5, 0.0),
        a1213: c64(0.3, 0.0),
        a1214: c64(-0.2, 0.0),
        a1223: c64(0.15, 0.0),
        a1224: c64(0.4, 0.0),
        a1334: c64(-0.25, 0.0),
        a1434: c64(0.35, 0.0),
        a2334: c64(0.1, 0.0),
        a2434: c64(-0.3, 0.0),
        b121: c64(0.2, 0.0),
        b122: c64(-0.4, 0.0),
        b123: c64(0.1, 0.0),
        b124: c64(0.3, 0.0),
        b341: c64(-0.15, 0.0),
        b342: c64(0.25, 0.0),
        b343: c64(0.05, 0.0),
        b344: c64(-0.2, 0.0),
        c11: c64(1.0, 0.0),
        c33: c64(2.0, 0.0),
    })
    .unwrap();
    let rep = dim4::chaplygin4_invariant_check(&model, 1e-10, 42, 10).unwrap();
    assert!(rep.max_drift_m12 <= 1e-8, "M12 drift {:e}", rep.max_drift_m12);
    assert!(rep.max_drift_m34 <= 1e-8, "M34 drift {:e}", rep.max_drift_m34);
    pass(
        "criterion 10",
        format!(
            "M12 drift {:.2e}, M34 drift {:.2e} over 10 seeded submanifold starts",
            rep.max_drift_m12, rep.max_drift_m34
        ),
    );
}

#[test]
fn criterion_11_infrastructure_properties() {
    // bracket antisymmetry, Jacobi and Casimir property at 1000 random points
    let mut rng = ChaCha12Rng::seed_from_u64(4242);
    for dim in [Dim::E3, Dim::E4] {
        let n = dim.size();
        let mut worst_anti = 0.0f64;
        let mut worst_jacobi = 0.0f64;
        for _ in 0..1000 {
            let x = PhaseState::from_vector(
                dim,
                DVector::from_fn(n, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
            )
            .unwrap();
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            let k = rng.random_range(0..n);
            let fi = Observable::coordinate(dim, i, ObservableKind::FirstIntegral);
            let fj = Observable::coordinate(dim, j, ObservableKind::FirstIntegral);
            let a = bracket(&fi, &fj, &x).unwrap();
            let b = bracket(&fj, &fi, &x).unwrap();
            worst_anti = worst_anti.max((a + b).norm());

            // {x_i, x_j} is linear; its exact gradient is the structure column
            let grad_of_pair = |a: usize, b: usize| -> DVector<C64> {
                DVector::from_fn(n, |c, _| {
                    let mut e = DVector::zeros(n);
                    e[c] = c64(1.0, 0.0);
                    poisson_matrix(dim, &e)[(a, b)]
                })
            };
            let pi = poisson_matrix(dim, x.coords());
            let br_lin = |ga: &DVector<C64>, gb: &DVector<C64>| (ga.transpose() * &pi * gb)[(0, 0)];
            let ei = |idx: usize| {
                let mut v: DVector<C64> = DVector::zeros(n);
                v[idx] = c64(1.0, 0.0);
                v
            };
            let cyc = br_lin(&grad_of_pair(i, j), &ei(k))
                + br_lin(&grad_of_pair(j, k), &ei(i))
                + br_lin(&grad_of_pair(k, i), &ei(j));
            worst_jacobi = worst_jacobi.max(cyc.norm());
        }
        assert!(worst_anti <= 1e-10, "antisymmetry {worst_anti:e} on {dim}");
        assert!(worst_jacobi <= 1e-10, "jacobi {worst_jacobi:e} on {dim}");
    }

    // Casimir property at 1000 points per dimension
    let mut worst_casimir = 0.0f64;
    let model3 = kirchhoff_b0();
    let model4 = KirchhoffModel::kirchhoff_e4(
        c64(1.0, 0.0), c64(1.5, 0.0), c64(2.0, 0.0), c64(0.5, 0.0), c64(1.0, 0.0), c64(2.0, 0.0), &[],
    )
    .unwrap();
    for model in [&model3, &model4] {
        let dim = model.dim();
        let n = dim.size();
        let casimirs: Vec<_> = invariants_of(model)
            .into_iter()
            .filter(|o| o.kind == ObservableKind::Casimir)
            .collect();
        for _ in 0..1000 {
            let x = PhaseState::from_vector(
                dim,
                DVector::from_fn(n, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
            )
            .unwrap();
            let i = rng.random_range(0..n);
            let g = Observable::coordinate(dim, i, ObservableKind::FirstIntegral);
            for c in &casimirs {
                worst_casimir = worst_casimir.max(bracket(c, &g, &x).unwrap().norm());
            }
        }
    }
    assert!(worst_casimir <= 1e-10, "casimir property {worst_casimir:e}");

    // series ring axioms and diff-antideriv identity (canonical form)
    let rand_series = |rng: &mut ChaCha12Rng| {
        let mut s = LogLaurentSeries::zero();
        for _ in 0..5 {
            s.add_term(
                rng.random_range(-4..5),
                rng.random_range(0..3),
                c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            );
        }
        s
    };
    for _ in 0..200 {
        let a = rand_series(&mut rng);
        let b = rand_series(&mut rng);
        let c = rand_series(&mut rng);
        assert!(a.mul(&b).mul(&c).sub(&a.mul(&b.mul(&c))).max_abs_coeff() <= 1e-13);
        assert!(a.mul(&b.add(&c)).sub(&a.mul(&b).add(&a.mul(&c))).max_abs_coeff() <= 1e-13);
        assert!(a.antideriv().diff().sub(&a).max_abs_coeff() <= 1e-14);
    }

    // integrator path reversal within 100 tol
    let tol = 1e-10;
    let x0 = PhaseState::e3(
        [c64(0.3, 0.1), c64(-0.2, 0.4), c64(0.5, -0.3)],
        [c64(0.7, 0.0), c64(-0.1, 0.2), c64(0.4, 0.6)],
    );
    let fwd = TimePath::real_interval(0.0, 1.5).unwrap();
    let traj = integrate(&model3, &x0, &fwd, tol).unwrap();
    let xe = PhaseState::from_vector(Dim::E3, traj.end().x.clone()).unwrap();
    let back = integrate(&model3, &xe, &fwd.reversed(), tol).unwrap();
    let reversal = max_norm(&(&back.end().x - x0.coords()));
    assert!(reversal <= 100.0 * tol, "path reversal error {reversal:e}");

    // byte-identical reports across repeated seeded runs
    let cfg = parse_config(
        r#"
command = "perturb"

[model]
case = "kirchhoff_e3"
a1 = 1.0
a3 = 2.0
c1 = 1.0
c3 = 3.0

[perturb]
which = "chaplygin"
"#,
    )
    .unwrap();
    let dir = std::env::temp_dir().join(format!("kirchhoff-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let opts = RunnerOptions {
        out_dir: dir,
        strict_pass: false,
    };
    let r1 = run(&cfg, &opts).unwrap();
    let r2 = run(&cfg, &opts).unwrap();
    assert_eq!(r1.report_json, r2.report_json, "reports must be byte-identical");
    assert_eq!(r1.exit_code, 0);

    pass(
        "criterion 11",
        format!(
            "antisymmetry/Jacobi/Casimir <= 1e-10 at 1000 points; ring axioms + diff(antideriv) exact; path reversal {reversal:.2e} <= 100 tol; reports byte-identical"
        ),
    );
}

// keep ModelCase referenced so the import stays honest if match arms change
#[allow(dead_code)]
fn _case_label(m: &KirchhoffModel) -> &'static str {
    match m.case() {
        ModelCase::GenericE3 { .. } => "generic",
        other => other.label(),
    }
}
