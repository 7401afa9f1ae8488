use chernoff_lab::chernoff::{
    chernoff_bound_rhs, expm, random_stable_matrix, taylor_polynomial_apply, verify_main_bound, ChernoffRecipe,
    KFunction, MatrixSemigroupSystem, SquareMatrix, EXPM_TOL,
};
use chernoff_lab::funcspace::{sup_norm, Function1D, Interval, Profile, SMOOTH};
use chernoff_lab::parabolic::{
    apply_operator, parabolic_rate_experiment, smoke_suite, ParabolicCoefficients, ParabolicRateExperiment,
};
use chernoff_lab::rates::{fit_rows, track_bound, ConvergenceRow};
use chernoff_lab::translation::{
    apply_g, counterexample_family, exact_error_law, iterate_g, RateFunctionV, TranslationExperiment,
};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn g_with_inverse_rate_adds_t_squared() {
    let f = Function1D::ramp();
    let g = apply_g(&f, 0.5, &RateFunctionV::inv_x()).unwrap();
    for x in [-1.0, -0.5, 0.0, 0.1] {
        assert!((g.eval(x) - f.eval(x + 0.75)).abs() < 1e-15);
    }
    let it = iterate_g(&f, 1.0, 4, &RateFunctionV::inv_x()).unwrap();
    assert!((it.eval(-1.0) - f.eval(0.25)).abs() < 1e-15);
}

#[test]
fn ramp_law_orders() {
    let exp = TranslationExperiment::new(Function1D::ramp(), RateFunctionV::inv_x(), 1.0, vec![1, 2, 4, 8, 16, 32, 64]);
    let rep = exact_error_law(&exp).unwrap();
    let fit = fit_rows(&rep.rows, rep.noise_floor).unwrap();
    assert!((fit.order - 1.0).abs() < 1e-9);
    let row8 = rep.rows.iter().find(|r| r.n == 8).unwrap();
    assert!((row8.predicted_or_bound.unwrap() - 0.125).abs() < 1e-15);

    let slow = TranslationExperiment::new(Function1D::ramp(), RateFunctionV::inv_log(), 1.0, vec![10]);
    let row = &exact_error_law(&slow).unwrap().rows[0];
    let want = 1.0 / (10.0 + std::f64::consts::E).ln();
    assert!((row.predicted_or_bound.unwrap() - want).abs() < 1e-12);
    assert!((row.error - want).abs() < 1e-6);
}

#[test]
fn constant_function_has_no_error() {
    let f = Function1D::smooth(Profile::constant(2.0));
    let exp = TranslationExperiment::new(f, RateFunctionV::inv_x(), 1.0, vec![1, 4, 16])
        .with_window(Interval::new(-1.0, 1.0).unwrap());
    let rep = exact_error_law(&exp).unwrap();
    assert!(rep.rows.iter().all(|r| r.error == 0.0 && r.predicted_or_bound == Some(0.0)));
}

#[test]
fn counterexample_definition() {
    let (f, x) = counterexample_family(1.0, 2).unwrap();
    assert_eq!((f.eval(0.0), f.eval(0.5), f.eval(-1.0)), (0.0, 1.0, 0.0));
    assert_eq!(x, -1.0);
    assert_eq!(f.shifted(1.0).eval(x), 0.0);
    assert_eq!(iterate_g(&f, 1.0, 2, &RateFunctionV::inv_x()).unwrap().eval(x), 1.0);
}

#[test]
fn expm_examples() {
    let n = SquareMatrix::from_row_major(&[0.0, 1.0, 0.0, 0.0]).unwrap();
    let e = expm(&n, 1.0, EXPM_TOL).unwrap();
    assert_eq!(e.row_major(), vec![1.0, 1.0, 0.0, 1.0]);
    let d = SquareMatrix::diagonal(&[-1.0, 0.5, 2.0]);
    let e = expm(&d, 0.7, EXPM_TOL).unwrap();
    for (i, l) in [-1.0f64, 0.5, 2.0].iter().enumerate() {
        assert!((e.as_dmatrix()[(i, i)] - (0.7 * l).exp()).abs() < 1e-13 * (0.7 * l).exp());
    }
    let one = SquareMatrix::diagonal(&[1.0]);
    let p = taylor_polynomial_apply(&one, &DVector::from_vec(vec![1.0]), 1.0, 3);
    assert!((p[0] - 8.0 / 3.0).abs() < 1e-15);
}

#[test]
fn taylor_plus_remainder_system_holds_bound() {
    // S(t) = I + tL + t²R with K_0 = ‖R‖ holds by construction; ‖S(t)‖ <= 1 + t²(‖L‖²/2 + ‖R‖)
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let l = random_stable_matrix(4, 0.5, &mut rng);
    let r = SquareMatrix::from_dmatrix(DMatrix::from_fn(4, 4, |i, j| 0.05 * ((i + 2 * j) as f64).cos())).unwrap();
    let r_norm = r.norm2();
    let sys = MatrixSemigroupSystem {
        w: l.norm2().powi(2) / 2.0 + r_norm,
        l,
        recipe: ChernoffRecipe::TaylorPlusPerturbation {
            perturbation: r,
            exponent: 2.0,
        },
        t_max: 1.0,
        m: 1,
        p: 1,
        m1: 1.0,
        m2: 1.0,
        k: vec![KFunction::Constant { value: r_norm * (1.0 + 1e-9) }],
        condition_seed: 1,
    };
    let fs: Vec<DVector<f64>> = (0..3).map(|i| DVector::from_fn(4, |j, _| ((i * 4 + j) as f64).sin())).collect();
    let ns: Vec<usize> = (1..=64).collect();
    let rep = verify_main_bound(&sys, &fs, &[0.5, 1.0], &ns).unwrap();
    assert_eq!(rep.conditions.first_failure(), None);
    assert!(rep.all_hold(), "min slack {}", rep.min_slack);
}

#[test]
fn scalar_chernoff_reproduces_exponential() {
    let a = -0.8;
    let sys = MatrixSemigroupSystem {
        l: SquareMatrix::diagonal(&[a]),
        recipe: ChernoffRecipe::TaylorPlusPerturbation {
            perturbation: SquareMatrix::zeros(1),
            exponent: 2.0,
        },
        t_max: 1.0,
        m: 1,
        p: 1,
        m1: 1.0,
        m2: 1.0,
        w: 0.0,
        k: vec![],
        condition_seed: 0,
    };
    let f = DVector::from_vec(vec![1.0]);
    let mut last = f64::INFINITY;
    for n in [1usize, 10, 100, 1000] {
        let s = sys.chernoff_matrix(1.0 / n as f64).unwrap().pow(n);
        let err = (s.as_dmatrix()[(0, 0)] - a.exp()).abs();
        assert!(err < last);
        assert!(err <= chernoff_bound_rhs(&sys, &f, 1.0, n).unwrap());
        last = err;
    }
    assert!(last < 1e-3);
}

#[test]
fn operator_on_variable_coefficients_matches_hand_derivatives() {
    // a = 1 + x²/(1+x²) = 2 − 1/(1+x²), v = sin
    let a = Function1D::smooth(Profile::affine(2.0, -1.0, Profile::lorentzian(1.0, 0.0, 1.0)));
    let b = Function1D::smooth(Profile::Poly { coeffs: vec![0.0, 0.5] });
    let c = Function1D::smooth(Profile::constant(-0.25));
    let co = ParabolicCoefficients::new(a, b, c, Interval::new(-5.0, 5.0).unwrap(), SMOOTH).unwrap();
    let av = apply_operator(&co, &Function1D::smooth(Profile::sine(1.0, 1.0, 0.0))).unwrap();
    for k in 0..=50 {
        let x = -5.0 + 0.2 * k as f64;
        let want = -(1.0 + x * x / (1.0 + x * x)) * x.sin() + 0.5 * x * x.cos() - 0.25 * x.sin();
        assert!((av.eval(x) - want).abs() < 1e-8);
    }
}

#[test]
fn parabolic_heat_bound_tracks_errors() {
    let window = Interval::new(-24.0, 24.0).unwrap();
    let co = ParabolicCoefficients::constant(1.0, 0.0, 0.0, window).unwrap();
    let f = Function1D::smooth(Profile::gaussian(1.0, 0.0, 1.0));
    let rep = parabolic_rate_experiment(&ParabolicRateExperiment::new(co, f, 1.0, vec![4, 8, 16, 32])).unwrap();
    let rows: Vec<ConvergenceRow> = rep
        .rows
        .iter()
        .map(|r| ConvergenceRow::new(r.n, r.error_vs_oracle).with_reference(r.bound_rhs.unwrap()))
        .collect();
    let allowance = rep.oracle_accuracy + rep.rows.iter().map(|r| r.interpolation_budget).fold(0.0, f64::max);
    let tracking = track_bound(&rows, allowance).unwrap();
    assert!(tracking.holds(), "{tracking:?}");
    // errors decrease with n
    assert!(rep.rows.windows(2).all(|w| w[1].error_vs_oracle < w[0].error_vs_oracle));
}

#[test]
fn smoke_suite_functions_are_bounded_on_window() {
    let w = Interval::new(-8.0, 8.0).unwrap();
    for f in smoke_suite() {
        assert!(sup_norm(&f, w, 1e-12).unwrap().value <= 2.5);
    }
}
