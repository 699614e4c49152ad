//! Cross-module invariants: integrator order, certificate/trajectory
//! consistency, discrete-continuous agreement, and randomized identities.

use majorant::*;
use proptest::prelude::*;

/// Least-squares slope of `ln(err)` against `ln(h_mean)` across tolerances.
fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (x, y) in points {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[test]
fn integrator_order_on_linear_decay() {
    // phi' = -phi over [0, 20]: relative error at the endpoint against the
    // mean accepted step, across four decades of tolerance, should scale
    // like the 5th-order propagated solution. Pure relative control (atol
    // effectively zero) keeps the step profile uniform so the fit is clean.
    let horizon = 20.0;
    let problem = InequalityProblem::new(
        TimeFunction::Constant(1.0),
        Nonlinearity::zero(),
        TimeFunction::zero(),
        1.0,
        horizon,
    )
    .unwrap();
    let exact = (-horizon).exp();
    let mut points = Vec::new();
    for k in 0..=10 {
        let rtol = 10f64.powf(-4.5 - 0.5 * k as f64); // 1e-4.5 .. 1e-9.5
        let opts = IntegrateOpts::with_tolerances(rtol, 1e-300);
        let traj = integrate_comparison(&problem, 1.0, horizon, &opts).unwrap();
        assert!(traj.is_completed());
        let err = ((traj.states.last().unwrap()[0] - exact) / exact).abs();
        let h_mean = horizon / traj.steps_accepted as f64;
        if err > 1e-13 {
            points.push((h_mean.ln(), err.ln()));
        }
    }
    assert!(points.len() >= 6, "not enough usable tolerance points");
    let slope = fit_slope(&points);
    assert!(
        (slope - 5.0).abs() <= 0.5,
        "observed order {slope}, expected 5 +- 0.5 (points: {points:?})"
    );
}

#[test]
fn verified_certificate_dominates_comparison_solution() {
    // Monotone sufficiency: a verified certificate bounds the integrated
    // worst case at every sample; strict initial data keeps it strict.
    struct Case {
        name: &'static str,
        problem: InequalityProblem,
        mu: Majorant,
        phi0: f64,
        strict: bool,
    }
    let quad = Nonlinearity::power_law(1.0, 2.0).unwrap();
    let cases = vec![
        Case {
            name: "exponential boundary",
            problem: InequalityProblem::new(
                TimeFunction::Constant(1.0),
                quad.clone(),
                TimeFunction::zero(),
                0.5,
                30.0,
            )
            .unwrap(),
            mu: Majorant::exponential(2.0, 0.5).unwrap(),
            phi0: 0.5,
            strict: false,
        },
        Case {
            name: "exponential strict",
            problem: InequalityProblem::new(
                TimeFunction::Constant(1.0),
                quad.clone(),
                TimeFunction::zero(),
                0.4,
                30.0,
            )
            .unwrap(),
            mu: Majorant::exponential(2.0, 0.5).unwrap(),
            phi0: 0.4,
            strict: true,
        },
        Case {
            name: "power family",
            problem: InequalityProblem::new(
                TimeFunction::PowerDecay { c: 2.0, q: 1.0 },
                quad,
                TimeFunction::zero(),
                0.4,
                50.0,
            )
            .unwrap(),
            mu: Majorant::power(2.0, 1.5).unwrap(),
            phi0: 0.4,
            strict: true,
        },
    ];
    for case in cases {
        let cert =
            verify_certificate(&case.problem, &case.mu, &GridSpec::default()).unwrap();
        assert!(cert.verified, "{} must verify", case.name);
        assert_eq!(cert.strict_initial, case.strict, "{}", case.name);
        let opts = IntegrateOpts::with_tolerances(1e-11, 1e-13);
        let traj =
            integrate_comparison(&case.problem, case.phi0, case.problem.horizon, &opts)
                .unwrap();
        assert!(traj.is_completed(), "{}: {}", case.name, traj.status);
        let check = check_trajectory_bound(&traj, &case.mu, 1e-9).unwrap();
        assert!(
            check.pass,
            "{}: violation {}",
            case.name, check.max_violation
        );
        if case.strict {
            for (t, s) in traj.times.iter().zip(traj.states.iter()) {
                let bound = bound_at(&case.mu, *t).unwrap();
                assert!(
                    s[0] < bound,
                    "{}: equality reached at t = {t}",
                    case.name
                );
            }
        }
    }
}

#[test]
fn discrete_bound_converges_to_continuous_bound() {
    // Zero-slack discrete certificates mu_{n+1} = mu_n (1 + h b) approach
    // the continuous bound e^{-b t}/lambda at first order in h.
    let (lambda, b, horizon) = (2.0, 0.5, 10.0);
    let gap = |h: f64| -> f64 {
        let n = (horizon / h).round() as usize;
        let mut mu = vec![lambda];
        for i in 0..n {
            mu.push(mu[i] * (1.0 + h * b));
        }
        let mut worst: f64 = 0.0;
        for (i, m) in mu.iter().enumerate() {
            let t = i as f64 * h;
            let continuous = (-b * t).exp() / lambda;
            worst = worst.max((1.0 / m - continuous).abs());
        }
        worst
    };
    let mut prev = gap(0.1);
    for k in 1..=4 {
        let next = gap(0.1 / 2f64.powi(k));
        let ratio = prev / next;
        assert!(
            ratio > 1.7 && ratio < 2.3,
            "halving h should halve the gap (ratio {ratio})"
        );
        prev = next;
    }

    // And a certificate with a real margin (amplitude above the boundary
    // value 2) verifies and keeps the recursion below the bound at every
    // refinement.
    let quad = Nonlinearity::power_law(1.0, 2.0).unwrap();
    let lambda_margin = 2.2;
    for h in [0.02, 0.01, 0.005] {
        let n = (horizon / h).round() as usize;
        let problem = DiscreteProblem::new(
            vec![h; n],
            vec![1.0; n],
            vec![0.0; n],
            quad.clone(),
            1.0 / lambda_margin,
        )
        .unwrap();
        let mut mu = vec![lambda_margin];
        for i in 0..n {
            mu.push(mu[i] * (1.0 + h * b));
        }
        let report =
            verify_discrete_certificate(&problem, &DiscreteCertificate::new(mu).unwrap())
                .unwrap();
        assert!(report.verified, "h = {h}: min slack {}", report.min_slack);
        assert!(report.bound_holds, "h = {h}");
    }
}

#[test]
fn cube_root_design_dominates_its_worst_case() {
    // Design for k = 2, c0 = 0.1, p = 3, epsilon = 0.4: amplitude 0.5 and
    // rate 1.6. Integrating the worst case g' = -2g + 0.1 g^3 from the
    // boundary radius g(0) = 2, the product g(t) e^{1.6 t} / 2 never
    // exceeds 1.
    let design = design_exponential_rate(2.0, 0.1, 3.0, 0.4).unwrap();
    assert_eq!(design.lambda, 0.5);
    assert_eq!(design.b, 1.6);
    assert_eq!(design.u0_radius, 2.0);
    let problem = design.worst_case_problem(20.0).unwrap();
    let opts = IntegrateOpts::with_tolerances(1e-11, 1e-13);
    let traj = integrate_comparison(&problem, design.u0_radius, 20.0, &opts).unwrap();
    assert!(traj.is_completed());
    for (t, s) in traj.times.iter().zip(traj.states.iter()) {
        let scaled = s[0] * design.lambda * (design.b * t).exp();
        assert!(scaled <= 1.0 + 1e-9, "t = {t}: scaled {scaled}");
    }
}

#[test]
fn blowup_detection_accuracy() {
    // u' = u^3 from 1: detected escape time within 1e-3 of 1/2.
    let ivp = ScalarIVP::new(|_, x: f64| x * x * x, 1.0, 0.0, 2.0);
    let traj = integrate_scalar(&ivp, &IntegrateOpts::default()).unwrap();
    match traj.status {
        TrajectoryStatus::BlowUp { tb_estimate } => {
            assert!(
                (tb_estimate - 0.5).abs() <= 1e-3,
                "tb_estimate = {tb_estimate}"
            );
        }
        other => panic!("expected blow-up, got {other}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_inductive_residual_nonnegative_and_consistent(
        a in 1e-3f64..1e3,
        b in 1e-3f64..1e3,
    ) {
        let r = inductive_step_residual(a, b);
        prop_assert!(r >= 0.0);
        let difference_form = 1.0 / b - (1.0 / a - (b - a) / (a * a));
        prop_assert!((r - difference_form).abs() <= 1e-11 * (1.0 + r.abs() + 1.0 / b));
    }

    #[test]
    fn prop_local_existence_formulas_are_the_stated_minima(
        t in 1e-3f64..1e3,
        b in 1e-3f64..1e3,
        m in 1e-3f64..1e3,
        l in 1e-3f64..1e3,
    ) {
        prop_assert_eq!(peano_interval(t, b, m).unwrap(), t.min(b / m));
        prop_assert_eq!(lipschitz_interval(b, m, l).unwrap(), (b / m).min(l));
    }

    #[test]
    fn prop_composite_derivative_matches_finite_differences(
        c1 in -3.0f64..3.0,
        q1 in -2.0f64..2.0,
        c2 in -3.0f64..3.0,
        k2 in -1.0f64..1.0,
        t in 0.0f64..20.0,
    ) {
        let f = TimeFunction::Sum(vec![
            TimeFunction::PowerDecay { c: c1, q: q1 },
            TimeFunction::Product(vec![
                TimeFunction::Exponential { c: c2, k: k2 },
                TimeFunction::PowerDecay { c: 1.0, q: 1.0 },
            ]),
        ]);
        let d = f.derivative().unwrap();
        let h = 1e-6 * (1.0 + t);
        let fd = (f.eval(t + h).unwrap() - f.eval(t - h).unwrap()) / (2.0 * h);
        let exact = d.eval(t).unwrap();
        let scale = exact.abs().max(fd.abs()).max(1e-3);
        prop_assert!(
            (exact - fd).abs() <= 1e-4 * scale,
            "t={}, exact={}, fd={}", t, exact, fd
        );
    }

    #[test]
    fn prop_slack_sign_decides_single_step_verification(
        k in 0.2f64..3.0,
        margin in -0.5f64..0.5,
    ) {
        // Exponential majorant with b = k - margin: verified exactly when
        // margin >= 0 (the slack is (1/mu) * margin pointwise).
        let problem = InequalityProblem::new(
            TimeFunction::Constant(k),
            Nonlinearity::zero(),
            TimeFunction::zero(),
            0.5,
            10.0,
        ).unwrap();
        let mu = Majorant::exponential(2.0, k - margin).unwrap();
        let cert = verify_certificate(&problem, &mu, &GridSpec::uniform(101)).unwrap();
        prop_assert_eq!(cert.verified, margin >= 0.0);
    }
}
