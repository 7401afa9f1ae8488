use chernoff_lab::chernoff::{expm, random_matrix, random_stable_matrix, telescoping_residual, SquareMatrix, EXPM_TOL};
use chernoff_lab::funcspace::{lattice_modulus, modulus_of_continuity, sup_norm, Function1D, Interval, Profile};
use chernoff_lab::grid::GridFunction;
use chernoff_lab::parabolic::{apply_chernoff_step, ParabolicCoefficients};
use chernoff_lab::rates::{fit_order, ConvergenceReport, ConvergenceRow};
use chernoff_lab::translation::{
    apply_g, apply_translation, composition_discrepancy, exact_error_law, RateFunctionV, TranslationExperiment,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn profile() -> impl Strategy<Value = Profile> {
    prop_oneof![
        (0.1..3.0f64, -2.0..2.0f64, 0.3..2.0f64).prop_map(|(a, c, w)| Profile::gaussian(a, c, w)),
        (0.1..2.0f64, 0.2..3.0f64, 0.0..3.0f64).prop_map(|(a, k, p)| Profile::sine(a, k, p)),
        (0.1..2.0f64, -2.0..2.0f64, 0.3..2.0f64).prop_map(|(a, c, w)| Profile::lorentzian(a, c, w)),
    ]
}

fn rate() -> impl Strategy<Value = RateFunctionV> {
    prop_oneof![
        Just(RateFunctionV::inv_x()),
        Just(RateFunctionV::inv_log()),
        Just(RateFunctionV::inv_loglog()),
        Just(RateFunctionV::exp_decay()),
        (0.5..3.0f64).prop_map(RateFunctionV::power),
        (1.0..4.0f64).prop_map(RateFunctionV::inv_root),
    ]
}

fn window() -> Interval {
    Interval::new(-6.0, 6.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sup_norm_grows_with_domain(p in profile(), lo in -3.0..0.0f64, hi in 0.1..3.0f64, extra in 0.0..3.0f64) {
        let f = Function1D::smooth(p);
        let small = sup_norm(&f, Interval::new(lo, hi).unwrap(), 1e-12).unwrap().value;
        let large = sup_norm(&f, Interval::new(lo - extra, hi + extra).unwrap(), 1e-12).unwrap().value;
        prop_assert!(small <= large + 1e-12);
    }

    #[test]
    fn modulus_monotone_on_common_lattice(p in profile(), x1 in 0.0..2.0f64, dx in 0.0..2.0f64) {
        let f = Function1D::smooth(p);
        let step = 1.0 / 64.0;
        let a = lattice_modulus(&f, x1, window(), step, step).unwrap();
        let b = lattice_modulus(&f, x1 + dx, window(), step, step).unwrap();
        prop_assert!(a <= b + 1e-15);
    }

    #[test]
    fn ramp_numeric_modulus_matches_analytic(x in 0.0..2.0f64) {
        let analytic = Function1D::ramp();
        let numeric = Function1D::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap();
        let w = Interval::new(-2.0, 3.0).unwrap();
        let m_a = modulus_of_continuity(&analytic, x, w).unwrap();
        let m_n = modulus_of_continuity(&numeric, x, w).unwrap();
        // slope 1 times the lattice resolution
        let resolution = (x / 64.0).max(w.len() / 4096.0);
        prop_assert!((m_a - m_n).abs() <= 2.0 * resolution, "{m_a} vs {m_n}");
    }

    #[test]
    fn translations_preserve_the_norm(p in profile(), t in 0.0..3.0f64, v in rate()) {
        let f = Function1D::smooth(p);
        let big = Interval::new(-40.0, 40.0).unwrap();
        let norm = sup_norm(&f, big, 1e-13).unwrap().value;
        let q = sup_norm(&apply_translation(&f, t), big, 1e-13).unwrap().value;
        let g = sup_norm(&apply_g(&f, t, &v).unwrap(), big, 1e-13).unwrap().value;
        // periodic and decaying profiles reach the same sup inside the big window
        prop_assert!((q - norm).abs() < 1e-9, "{q} vs {norm}");
        prop_assert!((g - norm).abs() < 1e-9, "{g} vs {norm}");
    }

    #[test]
    fn closed_form_iterate_matches_composition(t in 0.01..2.0f64, n in 1usize..64, v in rate()) {
        let lattice: Vec<f64> = (0..200).map(|i| -4.0 + i as f64 * 0.04).collect();
        let d = composition_discrepancy(&Function1D::ramp(), t, n, &v, &lattice).unwrap();
        prop_assert!(d <= 1e-12, "{d}");
    }

    #[test]
    fn predicted_error_is_nonincreasing(v in rate()) {
        let ns: Vec<usize> = (0..8).map(|k| 1 << k).collect();
        let exp = TranslationExperiment::new(Function1D::ramp(), v, 1.0, ns).with_t_lattice(64);
        let rep = exact_error_law(&exp).unwrap();
        for w in rep.rows.windows(2) {
            prop_assert!(w[1].predicted_or_bound.unwrap() <= w[0].predicted_or_bound.unwrap() + 1e-15);
        }
    }

    #[test]
    fn semigroup_law(seed in any::<u64>(), d in 1usize..=6, s in 0.0..2.0f64, t in 0.0..2.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_matrix(d, &mut rng);
        let lhs = expm(&l, s, EXPM_TOL).unwrap().mul(&expm(&l, t, EXPM_TOL).unwrap());
        let rhs = expm(&l, s + t, EXPM_TOL).unwrap();
        prop_assert!(lhs.sub(&rhs).norm2() < 1e-10);
    }

    #[test]
    fn telescoping_to_roundoff(seed in any::<u64>(), d in 1usize..=6, n in 1usize..=20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_matrix(d, &mut rng);
        let y = random_matrix(d, &mut rng);
        prop_assert!(telescoping_residual(&z, &y, n).unwrap().holds());
    }

    #[test]
    fn stable_matrices_are_contractive(seed in any::<u64>(), d in 1usize..=6, t in 0.0..3.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_stable_matrix(d, 0.1, &mut rng);
        prop_assert!(expm(&l, t, EXPM_TOL).unwrap().norm2() <= 1.0 + 1e-10);
    }

    #[test]
    fn fit_is_scale_invariant(alpha in 0.3..2.5f64, c in 1e-3..1e3f64, k in 1e-4..1e4f64) {
        let rows: Vec<(usize, f64)> = (0..8).map(|i| { let n = 1usize << i; (n, c / (n as f64).powf(alpha)) }).collect();
        let scaled: Vec<(usize, f64)> = rows.iter().map(|&(n, e)| (n, k * e)).collect();
        let a = fit_order(&rows, 0.0).unwrap();
        let b = fit_order(&scaled, 0.0).unwrap();
        prop_assert!((a.order - alpha).abs() < 1e-9);
        prop_assert!((a.order - b.order).abs() < 1e-9);
    }

    #[test]
    fn step_powers_are_bounded(p in profile(), t in 0.001..0.2f64, k in 1usize..=64, c in -1.0..1.0f64) {
        let co = ParabolicCoefficients::constant(1.0, 0.3, c, Interval::new(-20.0, 20.0).unwrap()).unwrap();
        let f = Function1D::smooth(p);
        let mut g = GridFunction::from_fn(-20.0, 20.0, 800, |x| f.eval(x)).unwrap();
        let norm = g.max_abs();
        let mut budget = 0.0;
        let growth = (c.abs() * t).exp();
        for _ in 0..k {
            let out = apply_chernoff_step(&co, &g, t).unwrap();
            budget = budget * growth + out.budget;
            g = out.grid;
        }
        prop_assert!(g.max_abs() <= growth.powi(k as i32) * norm + budget);
    }
}

#[test]
fn fit_recovers_known_orders() {
    for alpha in [0.5, 1.0, 1.5, 2.0] {
        let rows: Vec<(usize, f64)> = (2..=9).map(|k| {
            let n = 1usize << k;
            (n, 3.0 / (n as f64).powf(alpha))
        }).collect();
        let fit = fit_order(&rows, 0.0).unwrap();
        assert!((fit.order - alpha).abs() <= 0.01);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }
}

#[test]
fn dropping_noisy_rows_never_lowers_r_squared() {
    for alpha in [0.5, 1.0, 1.5, 2.0] {
        for floor in [1e-6, 1e-5, 1e-4] {
            // error saturates at the floor once the scheme error drops below it
            let rows: Vec<ConvergenceRow> = (0..12)
                .map(|k| {
                    let n = 1usize << k;
                    ConvergenceRow::new(n, 1.0 / (n as f64).powf(alpha) + floor * (1.0 + 0.3 * (k as f64).sin()))
                })
                .collect();
            let all = fit_order(&rows.iter().map(|r| (r.n, r.error)).collect::<Vec<_>>(), 0.0).unwrap();
            let filtered = ConvergenceReport::new("synthetic", rows, floor).fit.unwrap();
            assert!(filtered.r_squared >= all.r_squared, "{alpha} {floor}");
        }
    }
}

#[test]
fn identity_matrix_helpers() {
    let i = SquareMatrix::identity(3);
    assert_eq!(i.norm2(), 1.0);
}
