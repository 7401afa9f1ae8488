//! Acceptance run: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use chernoff_lab::chernoff::{
    example_system, random_matrix, random_stable_matrix, taylor_remainder_check, telescoping_residual, SLACK_TOL,
};
use chernoff_lab::funcspace::{Function1D, Interval, Profile, SMOOTH};
use chernoff_lab::grid::GridFunction;
use chernoff_lab::parabolic::{
    apply_chernoff_step, apply_operator, check_derivative_table, derivative_sups, derive_derivative_constants,
    expand_power, iterate_chernoff, landau_inequality_check, parabolic_rate_experiment, smoke_suite,
    smooth_test_functions, variable_test_coefficients, ParabolicCoefficients, ParabolicRateExperiment,
};
use chernoff_lab::rates::fit_rows;
use chernoff_lab::translation::{counterexample_gap, exact_error_law, RateFunctionV, TranslationExperiment};
use chernoff_lab::Result;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        passed,
        detail: detail.into(),
    })
}

fn exact_law_inv_x() -> Result<Outcome> {
    let ns = vec![1, 2, 4, 8, 16, 32, 64];
    let exp = TranslationExperiment::new(Function1D::ramp(), RateFunctionV::inv_x(), 1.0, ns);
    let rep = exact_error_law(&exp)?;
    let worst = rep
        .rows
        .iter()
        .map(|r| (r.error - 1.0 / r.n as f64).abs())
        .fold(0.0, f64::max);
    outcome(worst <= 1e-6, format!("max |measured - 1/n| = {worst:.2e}"))
}

fn slow_law_inv_log() -> Result<Outcome> {
    let ns: Vec<usize> = (1..=4096).collect();
    let exp = TranslationExperiment::new(Function1D::ramp(), RateFunctionV::inv_log(), 1.0, ns);
    let rep = exact_error_law(&exp)?;
    let worst = rep
        .rows
        .iter()
        .map(|r| (r.error - 1.0 / (r.n as f64 + std::f64::consts::E).ln()).abs())
        .fold(0.0, f64::max);
    let order = fit_rows(&rep.rows, rep.noise_floor)?.order;
    outcome(
        worst <= 1e-6 && order < 0.2,
        format!("max |measured - 1/ln(n+e)| = {worst:.2e}, fitted order {order:.3}"),
    )
}

fn norm_non_convergence() -> Result<Outcome> {
    let mut min_gap = f64::INFINITY;
    let mut worst_norm = 0.0f64;
    for n in 1..=1024 {
        let (gap, norm) = counterexample_gap(1.0, n)?;
        min_gap = min_gap.min(gap);
        worst_norm = worst_norm.max((norm - 1.0).abs());
    }
    outcome(
        min_gap >= 1.0 - 1e-9 && worst_norm <= 1e-12,
        format!("min gap {min_gap:.12}, max |‖f_n‖ - 1| = {worst_norm:.1e}"),
    )
}

fn telescoping() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..1000 {
        let d = rng.random_range(1..=6);
        let n = rng.random_range(1..=20);
        let z = random_matrix(d, &mut rng);
        let y = random_matrix(d, &mut rng);
        let r = telescoping_residual(&z, &y, n)?;
        worst = worst.max(r.residual / r.bound);
        failures += usize::from(!r.holds());
    }
    outcome(failures == 0, format!("{failures} failures, worst residual/bound {worst:.1e}"))
}

fn taylor_remainder() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = 0;
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..200 {
        let d = rng.random_range(1..=6);
        let l = random_stable_matrix(d, 0.1, &mut rng);
        let f = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
        for m in 0..=4 {
            for t in [0.1, 0.5, 1.0] {
                let r = taylor_remainder_check(&l, &f, t, m)?;
                cases += 1;
                failures += usize::from(!r.holds());
                if r.rhs > 0.0 {
                    worst = worst.max(r.lhs / r.rhs);
                }
            }
        }
    }
    outcome(failures == 0, format!("{cases} cases, {failures} failures, max lhs/rhs {worst:.3}"))
}

fn main_bound_example() -> Result<Outcome> {
    let eps = 0.5;
    let (sys, f) = example_system(6, eps, 11)?;
    let ns: Vec<usize> = (1..=256).collect();
    let rep = chernoff_lab::chernoff::verify_main_bound(&sys, &[f], &[1.0], &ns)?;
    let scaled: Vec<f64> = rep
        .rows
        .iter()
        .filter(|r| r.n >= 16)
        .map(|r| r.lhs * (r.n as f64).powf(1.0 + eps))
        .collect();
    let max = scaled.iter().copied().fold(0.0, f64::max);
    let min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = max / min;
    outcome(
        rep.all_hold() && rep.min_slack >= -SLACK_TOL && ratio < 10.0,
        format!("min slack {:.3e}, lhs·n^1.5 max/min {ratio:.3}", rep.min_slack),
    )
}

fn exact_quadratic() -> Result<Outcome> {
    let window = Interval::new(-30.0, 30.0)?;
    let co = ParabolicCoefficients::constant(1.0, 0.0, 0.0, window)?;
    let f0 = GridFunction::from_fn(-30.0, 30.0, 1200, |x| x * x)?;
    let t = 1.0;
    let mut ok = true;
    let mut worst = 0.0f64;
    for n in 1..=32 {
        let out = iterate_chernoff(&co, &f0, t, n)?;
        let reach = 2.0 * (n as f64 * t).sqrt() + 2.0 * n as f64 * f0.spacing() + 1.0;
        for (x, u) in out.grid.nodes().zip(out.grid.values()) {
            if x.abs() < 30.0 - reach {
                let err = (u - (x * x + 2.0 * t)).abs();
                ok &= err <= out.budget;
                worst = worst.max(err / out.budget);
            }
        }
    }
    outcome(ok, format!("max error/budget {worst:.3}"))
}

fn parabolic_rate() -> Result<Outcome> {
    let window = Interval::new(-26.0, 26.0)?;
    let f = Function1D::smooth(Profile::gaussian(1.0, 0.0, 1.0));
    let ns = vec![4, 8, 16, 32, 64];
    let heat = ParabolicCoefficients::constant(1.0, 0.0, 0.0, window)?;
    let rep = parabolic_rate_experiment(&ParabolicRateExperiment::new(heat, f.clone(), 1.0, ns.clone()))?;
    let fit = rep.convergence.fit.clone();
    let a = Function1D::smooth(Profile::affine(1.0, 1.0, Profile::lorentzian(0.5, 0.0, 1.0)));
    let zero = Function1D::smooth(Profile::constant(0.0));
    let mild = ParabolicCoefficients::new(a, zero.clone(), zero, window, SMOOTH)?;
    let rep2 = parabolic_rate_experiment(&ParabolicRateExperiment::new(mild, f, 1.0, ns))?;
    let fit2 = rep2.convergence.fit.clone();
    let ok1 = fit
        .as_ref()
        .is_some_and(|f| (0.85..=1.15).contains(&f.order) && f.r_squared >= 0.99);
    let ok2 = fit2.as_ref().is_some_and(|f| (0.8..=1.2).contains(&f.order));
    let show = |f: &Option<chernoff_lab::rates::OrderFit>| match f {
        Some(f) => format!("{:.3} (r² {:.4})", f.order, f.r_squared),
        None => "none".to_string(),
    };
    outcome(
        ok1 && ok2,
        format!(
            "heat order {}, variable-a order {} (oracle accuracy {:.1e})",
            show(&fit),
            show(&fit2),
            rep2.oracle_accuracy
        ),
    )
}

fn one_step_defect() -> Result<Outcome> {
    let window = Interval::new(-12.0, 12.0)?;
    let coefficient_sets = [
        ParabolicCoefficients::constant(1.0, 0.0, 0.0, window)?,
        ParabolicCoefficients::constant(0.5, 0.8, -0.3, window)?,
        variable_test_coefficients(window)?,
    ];
    let ts = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];
    let mut cases = 0;
    let mut failures = 0;
    let mut worst = 0.0f64;
    for co in &coefficient_sets {
        let (a, b, _) = co.norms();
        for f in smooth_test_functions() {
            let sups = derivative_sups(&f, 4, window)?;
            let af = apply_operator(co, &f)?;
            let g = GridFunction::from_fn(window.lo, window.hi, 2400, |x| f.eval(x))?;
            for &t in &ts {
                let step = apply_chernoff_step(co, &g, t)?;
                let mut defect = 0.0f64;
                for (i, x) in g.nodes().enumerate() {
                    if x.abs() <= 10.0 {
                        defect = defect.max((step.grid.values()[i] - f.eval(x) - t * af.eval(x)).abs());
                    }
                }
                let bound = t * t * (a * a / 3.0 * sups[4] + b * b * sups[2]);
                cases += 1;
                if defect > bound + step.budget {
                    failures += 1;
                }
                worst = worst.max(defect / (bound + step.budget));
            }
        }
    }
    outcome(failures == 0, format!("{cases} cases, {failures} failures, max defect/bound {worst:.3}"))
}

fn derivative_machinery() -> Result<Outcome> {
    let window = Interval::new(-8.0, 8.0)?;
    let co = variable_test_coefficients(window)?;
    let exp = expand_power(&co, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut expansion_err = 0.0f64;
    for _ in 0..100 {
        let x = rng.random_range(window.lo..window.hi);
        let [a, b, c] = co.jets(x, 2)?;
        let d = |j: &chernoff_lab::jet::Jet, k| j.derivative(k);
        let (a0, a1, a2) = (d(&a, 0), d(&a, 1), d(&a, 2));
        let (b0, b1, b2) = (d(&b, 0), d(&b, 1), d(&b, 2));
        let (c0, c1, c2) = (d(&c, 0), d(&c, 1), d(&c, 2));
        let displayed = [
            a0 * c2 + b0 * c1 + c0 * c0,
            a0 * b2 + b0 * b1 + 2.0 * a0 * c1 + 2.0 * b0 * c0,
            a0 * a2 + a1 * b0 + b0 * b0 + 2.0 * a0 * b1 + 2.0 * a0 * c0,
            2.0 * a0 * a1 + 2.0 * a0 * b0,
            a0 * a0,
        ];
        let got = exp.evaluate(&co, x)?;
        for (g, w) in got.iter().zip(displayed) {
            expansion_err = expansion_err.max((g - w).abs());
        }
    }
    let table = derive_derivative_constants(&co, 4)?;
    let mut landau_ok = true;
    let mut table_ok = true;
    for f in smoke_suite() {
        for h in [0.25, 0.5, 1.0, 2.0] {
            landau_ok &= landau_inequality_check(&f, h, window)?.holds;
        }
        for row in check_derivative_table(&table, &co, &f)? {
            table_ok &= row.lhs <= row.rhs * (1.0 + 1e-9) + 1e-12;
        }
    }
    outcome(
        expansion_err <= 1e-10 && landau_ok && table_ok,
        format!("q=2 expansion max deviation {expansion_err:.1e}, Landau {landau_ok}, table {table_ok}"),
    )
}

type Criterion = (&'static str, Duration, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact error law, v = 1/x", Duration::from_secs(5), exact_law_inv_x),
        ("slow convergence, v = 1/ln(x+e)", Duration::from_secs(10), slow_law_inv_log),
        ("norm non-convergence counterexample", Duration::from_secs(5), norm_non_convergence),
        ("telescoping identity", Duration::from_secs(10), telescoping),
        ("Taylor remainder", Duration::from_secs(10), taylor_remainder),
        ("main bound on the dissipative example", Duration::from_secs(30), main_bound_example),
        ("parabolic exact quadratic", Duration::from_secs(5), exact_quadratic),
        ("parabolic rate", Duration::from_secs(120), parabolic_rate),
        ("one-step defect", Duration::from_secs(600), one_step_defect),
        ("derivative machinery", Duration::from_secs(600), derivative_machinery),
    ];
    let mut all = true;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed < *limit, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= passed;
        println!(
            "{} {:>2} {name}: {detail} [{:.2}s / {}s]",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
