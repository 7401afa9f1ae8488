//! Dispatch from a parsed config to the library experiments.

use chernoff_lab::chernoff::{
    example_system, expm, random_matrix, random_stable_matrix, taylor_remainder_check, telescoping_residual,
    verify_main_bound, EXPM_TOL, SLACK_TOL,
};
use chernoff_lab::funcspace::{check_modulus_axioms, Function1D, Interval};
use chernoff_lab::parabolic::{
    check_derivative_table, derive_derivative_constants, landau_inequality_check, parabolic_rate_experiment,
    smoke_suite, OracleQuality, ParabolicRateExperiment,
};
use chernoff_lab::rates::fit_rows;
use chernoff_lab::translation::{counterexample_gap, exact_error_law, TranslationExperiment};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{
    CounterexampleParams, DerivativeConstantsParams, ExperimentConfig, MatrixBoundParams, MatrixIdentitiesParams,
    ModulusAxiomsParams, Params, ParabolicRateParams, SystemChoice, TranslationLawParams,
};
use crate::error::CliError;
use crate::report::{num, opt_num, RunReport, Table};

/// Semigroup-law residual allowed by the identity suite.
pub const SEMIGROUP_TOL: f64 = 1e-10;
/// Lower bound on the counterexample gap.
pub const GAP_TOL: f64 = 1e-9;

pub fn run(config: &ExperimentConfig) -> Result<RunReport, CliError> {
    let mut report = RunReport::new(config.command);
    match config.params()? {
        Params::TranslationLaw(p) => translation_law(&p, &mut report)?,
        Params::TranslationCounterexample(p) => counterexample(&p, &mut report)?,
        Params::MatrixIdentities(p) => matrix_identities(&p, config.seed, &mut report)?,
        Params::MatrixBound(p) => matrix_bound(&p, config.seed, &mut report)?,
        Params::ParabolicRate(p) => parabolic_rate(&p, &mut report)?,
        Params::DerivativeConstants(p) => derivative_constants(&p, &mut report)?,
        Params::ModulusAxioms(p) => modulus_axioms(&p, &mut report)?,
    }
    Ok(report)
}

fn positive_ns(ns: &[usize], pointer: &str) -> Result<Vec<usize>, CliError> {
    if ns.is_empty() {
        return Err(CliError::usage(pointer, "needs at least one value"));
    }
    if let Some(i) = ns.iter().position(|n| *n == 0) {
        return Err(CliError::usage(format!("{pointer}/{i}"), "n must be positive"));
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    Ok(ns)
}

fn order_check(report: &mut RunReport, range: Option<(f64, f64)>, fit: Option<&chernoff_lab::rates::OrderFit>) {
    if let Some((lo, hi)) = range {
        let (ok, detail) = match fit {
            Some(f) => (
                (lo..=hi).contains(&f.order),
                format!("fitted order {:.3} (r² {:.4}), required [{lo}, {hi}]", f.order, f.r_squared),
            ),
            None => (false, "too few rows above the noise floor to fit an order".to_string()),
        };
        report.check("fitted order in range", ok, detail);
    }
}

fn translation_law(p: &TranslationLawParams, report: &mut RunReport) -> Result<(), CliError> {
    let f = p.f.build()?;
    let v = p.v.build()?;
    let mut exp = TranslationExperiment::new(f, v, p.t_max, positive_ns(&p.n_values, "/params/n_values")?)
        .with_t_lattice(p.t_lattice);
    if let Some(w) = p.window {
        exp = exp.with_window(w);
    }
    let rep = exact_error_law(&exp)?;
    let mut table = Table::new(
        "translation.csv",
        vec!["n", "measured_error", "predicted_error", "abs_discrepancy"],
    );
    let mut rates = Table::new("rates.csv", vec!["n", "error", "bound"]);
    let mut worst = 0.0f64;
    let mut ok = true;
    for r in &rep.rows {
        let predicted = r.predicted_or_bound.unwrap_or(f64::NAN);
        let gap = (r.error - predicted).abs();
        ok &= gap <= p.tolerance + r.noise;
        worst = worst.max(gap);
        table.push(vec![r.n.to_string(), num(r.error), num(predicted), num(gap)]);
        rates.push(vec![r.n.to_string(), num(r.error), String::new()]);
    }
    report.check(
        "measured error equals the modulus law",
        ok,
        format!("max |measured - predicted| = {worst:e}, tolerance {:e} + lattice resolution", p.tolerance),
    );
    let fit = fit_rows(&rep.rows, rep.noise_floor).ok();
    order_check(report, p.order_range, fit.as_ref());
    report.metric("max_discrepancy", worst);
    report.metric("fitted_order", fit.as_ref().map(|f| f.order));
    report.metric("r2", fit.as_ref().map(|f| f.r_squared));
    report.metric("rate", exp.v.name());
    report.tables.push(table);
    report.tables.push(rates);
    Ok(())
}

fn counterexample(p: &CounterexampleParams, report: &mut RunReport) -> Result<(), CliError> {
    if p.n_max == 0 {
        return Err(CliError::usage("/params/n_max", "must be positive"));
    }
    let mut table = Table::new("counterexample.csv", vec!["n", "gap", "norm"]);
    let mut min_gap = f64::INFINITY;
    let mut worst_norm = 0.0f64;
    for n in 1..=p.n_max {
        let (gap, norm) = counterexample_gap(p.t, n)?;
        min_gap = min_gap.min(gap);
        worst_norm = worst_norm.max((norm - 1.0).abs());
        table.push(vec![n.to_string(), num(gap), num(norm)]);
    }
    report.check(
        "gap stays at 1",
        min_gap >= 1.0 - GAP_TOL,
        format!("min gap {min_gap:e} over n = 1..{}", p.n_max),
    );
    report.check(
        "unit norm",
        worst_norm <= 1e-12,
        format!("max |‖f_n‖ - 1| = {worst_norm:e}"),
    );
    report.metric("min_gap", min_gap);
    report.tables.push(table);
    Ok(())
}

fn matrix_identities(p: &MatrixIdentitiesParams, seed: u64, report: &mut RunReport) -> Result<(), CliError> {
    if p.max_dim == 0 || p.max_n == 0 {
        return Err(CliError::usage("/params", "max_dim and max_n must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Table::new("identities.csv", vec!["check", "case", "d", "n", "m", "t", "lhs", "bound"]);

    let mut tele_ok = true;
    let mut tele_worst = 0.0f64;
    for case in 0..p.telescoping_trials {
        let d = rng.random_range(1..=p.max_dim);
        let n = rng.random_range(1..=p.max_n);
        let z = random_matrix(d, &mut rng);
        let y = random_matrix(d, &mut rng);
        let r = telescoping_residual(&z, &y, n)?;
        tele_ok &= r.holds();
        tele_worst = tele_worst.max(r.residual);
        table.push(vec![
            "telescoping".into(),
            case.to_string(),
            d.to_string(),
            n.to_string(),
            String::new(),
            String::new(),
            num(r.residual),
            num(r.bound),
        ]);
    }
    report.check(
        "telescoping identity",
        tele_ok,
        format!("{} cases, max residual {tele_worst:e}", p.telescoping_trials),
    );

    let mut rem_ok = true;
    let mut rem_worst = 0.0f64;
    for case in 0..p.remainder_trials {
        let d = rng.random_range(1..=p.max_dim);
        let l = random_stable_matrix(d, 0.1, &mut rng);
        let f = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
        for m in 0..=p.max_m {
            for &t in &p.remainder_ts {
                let r = taylor_remainder_check(&l, &f, t, m)?;
                rem_ok &= r.holds();
                if r.rhs > 0.0 {
                    rem_worst = rem_worst.max(r.lhs / r.rhs);
                }
                table.push(vec![
                    "taylor_remainder".into(),
                    case.to_string(),
                    d.to_string(),
                    String::new(),
                    m.to_string(),
                    num(t),
                    num(r.lhs),
                    num(r.rhs + r.roundoff),
                ]);
            }
        }
    }
    report.check(
        "Taylor remainder",
        rem_ok,
        format!("{} matrices, max lhs/rhs {rem_worst:.4}", p.remainder_trials),
    );

    let mut semi_worst = 0.0f64;
    for case in 0..p.semigroup_trials {
        let d = rng.random_range(1..=p.max_dim);
        let l = random_matrix(d, &mut rng);
        let s = rng.random_range(0.0..2.0);
        let t = rng.random_range(0.0..2.0);
        let lhs = expm(&l, s, EXPM_TOL)?.mul(&expm(&l, t, EXPM_TOL)?);
        let res = lhs.sub(&expm(&l, s + t, EXPM_TOL)?).norm2();
        semi_worst = semi_worst.max(res);
        table.push(vec![
            "semigroup".into(),
            case.to_string(),
            d.to_string(),
            String::new(),
            String::new(),
            format!("{};{}", num(s), num(t)),
            num(res),
            num(SEMIGROUP_TOL),
        ]);
    }
    report.check(
        "semigroup law",
        semi_worst < SEMIGROUP_TOL,
        format!("{} cases, max residual {semi_worst:e}", p.semigroup_trials),
    );
    report.metric("max_telescoping_residual", tele_worst);
    report.metric("max_remainder_ratio", rem_worst);
    report.metric("max_semigroup_residual", semi_worst);
    report.tables.push(table);
    Ok(())
}

fn matrix_bound(p: &MatrixBoundParams, seed: u64, report: &mut RunReport) -> Result<(), CliError> {
    let ns = positive_ns(&p.n_values, "/params/n_values")?;
    let (sys, own, epsilon) = match &p.system {
        SystemChoice::Example { d, epsilon } => {
            let (sys, f) = example_system(*d, *epsilon, seed)?;
            (sys, Some(f), Some(*epsilon))
        }
        SystemChoice::Explicit(spec) => (spec.build(seed)?, None, None),
    };
    let d = sys.order();
    let fs: Vec<DVector<f64>> = match (&p.vectors, own) {
        (Some(vs), _) => vs
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if v.len() == d {
                    Ok(DVector::from_vec(v.clone()))
                } else {
                    Err(CliError::usage(
                        format!("/params/vectors/{i}"),
                        format!("expected {d} entries, got {}", v.len()),
                    ))
                }
            })
            .collect::<Result<_, _>>()?,
        (None, Some(f)) => vec![f],
        (None, None) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            (0..p.random_vectors.max(1))
                .map(|_| {
                    let v = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
                    let n = v.norm();
                    v / n
                })
                .collect()
        }
    };
    let conditions = sys.check_conditions()?;
    report.check(
        "system hypotheses",
        conditions.first_failure().is_none(),
        format!(
            "growth {}, power bound {}, Taylor defect {} (worst ratios {:?})",
            conditions.growth, conditions.power_bound, conditions.taylor_defect, conditions.worst_ratios
        ),
    );
    report.metric("small_t_flag", conditions.small_t_flag);
    if conditions.first_failure().is_some() {
        report.check("bound slack", false, "not evaluated: hypotheses fail");
        return Ok(());
    }
    let rep = verify_main_bound(&sys, &fs, &p.ts, &ns)?;
    let mut table = Table::new("bound.csv", vec!["t", "n", "f_index", "lhs", "rhs", "slack"]);
    for r in &rep.rows {
        table.push(vec![
            num(r.t),
            r.n.to_string(),
            r.f_index.to_string(),
            num(r.lhs),
            num(r.rhs),
            num(r.slack),
        ]);
    }
    report.check(
        "bound slack",
        rep.all_hold(),
        format!("min slack {:e}, tolerance {SLACK_TOL:e}", rep.min_slack),
    );
    report.metric("min_slack", rep.min_slack);
    if let Some(limit) = p.max_scaled_ratio {
        let Some(eps) = epsilon else {
            return Err(CliError::usage(
                "/params/max_scaled_ratio",
                "only defined for the example system",
            ));
        };
        let mut worst = 0.0f64;
        for &t in &p.ts {
            for fi in 0..fs.len() {
                let scaled: Vec<f64> = rep
                    .rows
                    .iter()
                    .filter(|r| r.t == t && r.f_index == fi && r.n >= 16)
                    .map(|r| r.lhs * (r.n as f64).powf(1.0 + eps))
                    .collect();
                if scaled.len() >= 2 {
                    let max = scaled.iter().copied().fold(0.0, f64::max);
                    let min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
                    worst = worst.max(max / min);
                }
            }
        }
        report.check(
            "lhs·n^(1+ε) bounded",
            worst < limit,
            format!("max/min over n >= 16 is {worst:.3}, limit {limit}"),
        );
        report.metric("scaled_ratio", worst);
    }
    report.tables.push(table);
    Ok(())
}

fn parabolic_rate(p: &ParabolicRateParams, report: &mut RunReport) -> Result<(), CliError> {
    let window = Interval::new(p.grid.x_lo, p.grid.x_hi)
        .map_err(|e| CliError::usage("/params/grid", e.to_string()))?;
    let coeffs = p.coefficients.build(window)?;
    let f = p.f.build()?;
    let mut exp = ParabolicRateExperiment::new(coeffs, f, p.t, positive_ns(&p.n_values, "/params/n_values")?);
    if let Some(n) = p.grid.n {
        if n < 4 {
            return Err(CliError::usage("/params/grid/N", "needs at least 4 intervals"));
        }
        exp = exp.with_spacing(window.len() / n as f64);
    }
    exp.with_bound = p.with_bound;
    exp.quality = OracleQuality {
        tolerance: p.oracle_tolerance,
        ..OracleQuality::default()
    };
    let rep = parabolic_rate_experiment(&exp)?;
    let mut table = Table::new(
        "parabolic.csv",
        vec!["n", "h", "error_vs_oracle", "interpolation_budget", "bound_rhs_if_available"],
    );
    let mut rates = Table::new("rates.csv", vec!["n", "error", "bound"]);
    for r in &rep.rows {
        table.push(vec![
            r.n.to_string(),
            num(r.h),
            num(r.error_vs_oracle),
            num(r.interpolation_budget),
            opt_num(r.bound_rhs),
        ]);
        rates.push(vec![r.n.to_string(), num(r.error_vs_oracle), opt_num(r.bound_rhs)]);
    }
    report.check(
        "step norm bound",
        rep.rows.iter().all(|r| r.norm_bound_holds),
        "max|S f| <= e^{‖c‖t} max|f| + budget on every step",
    );
    if let Some(holds) = rep.bound_holds() {
        let min_slack = rep
            .rows
            .iter()
            .filter_map(|r| r.bound_rhs.map(|b| b - r.error_vs_oracle))
            .fold(f64::INFINITY, f64::min);
        report.check(
            "a-priori bound",
            holds,
            format!("min slack {min_slack:e}, allowance oracle accuracy + interpolation budget"),
        );
        report.metric("min_slack", min_slack);
    }
    let fit = rep.convergence.fit.as_ref();
    order_check(report, p.order_range, fit);
    if let Some(r2) = p.min_r_squared {
        let got = fit.map(|f| f.r_squared);
        report.check(
            "fit quality",
            got.is_some_and(|g| g >= r2),
            format!("r² {}, required {r2}", opt_num(got)),
        );
    }
    report.metric("fitted_order", fit.map(|f| f.order));
    report.metric("r2", fit.map(|f| f.r_squared));
    report.metric("oracle_accuracy", rep.oracle_accuracy);
    report.metric("oracle", rep.oracle_method);
    report.metric("defect_constants", &rep.defect_constants);
    report.tables.push(table);
    report.tables.push(rates);
    Ok(())
}

fn derivative_constants(p: &DerivativeConstantsParams, report: &mut RunReport) -> Result<(), CliError> {
    let coeffs = p.coefficients.build(p.window)?;
    let table = derive_derivative_constants(&coeffs, p.n_max)?;
    let functions: Vec<Function1D> = match &p.functions {
        Some(specs) => specs.iter().map(|s| s.build()).collect::<Result<_, _>>()?,
        None => smoke_suite(),
    };
    let mut constants = Table::new("constants.csv", vec!["n", "k", "constant", "h_choice"]);
    for n in 0..=table.n_max {
        for (k, c) in table.row(n).iter().enumerate() {
            constants.push(vec![n.to_string(), k.to_string(), num(*c), opt_num(table.h_choices[n])]);
        }
    }
    let mut checks = Table::new("checks.csv", vec!["function", "inequality", "index", "lhs", "rhs", "holds"]);
    let mut landau_ok = true;
    let mut table_ok = true;
    for f in &functions {
        for &h in &p.landau_h {
            let r = landau_inequality_check(f, h, p.window)?;
            landau_ok &= r.holds;
            checks.push(vec![
                f.label().to_string(),
                "landau".into(),
                num(h),
                num(r.lhs),
                num(r.rhs),
                r.holds.to_string(),
            ]);
        }
        for row in check_derivative_table(&table, &coeffs, f)? {
            let holds = row.lhs <= row.rhs * (1.0 + 1e-9) + 1e-12;
            table_ok &= holds;
            checks.push(vec![
                f.label().to_string(),
                "derivative_table".into(),
                row.n.to_string(),
                num(row.lhs),
                num(row.rhs),
                holds.to_string(),
            ]);
        }
    }
    report.check("Landau inequality", landau_ok, format!("{} functions", functions.len()));
    report.check(
        "derivative table",
        table_ok,
        format!("‖v^(n)‖ <= Σ C[n][k]‖A^k v‖ for n <= {}", table.n_max),
    );
    report.metric("constants", &table.c);
    report.metric("h_choices", &table.h_choices);
    report.tables.push(constants);
    report.tables.push(checks);
    Ok(())
}

fn modulus_axioms(p: &ModulusAxiomsParams, report: &mut RunReport) -> Result<(), CliError> {
    if p.lattice.points < 2 || p.lattice.hi.is_nan() || p.lattice.hi <= 0.0 {
        return Err(CliError::usage("/params/lattice", "needs hi > 0 and at least 2 points"));
    }
    let lattice: Vec<f64> = (0..=p.lattice.points)
        .map(|i| p.lattice.hi * i as f64 / p.lattice.points as f64)
        .collect();
    let mut table = Table::new(
        "modulus.csv",
        vec![
            "label",
            "zero_at_zero",
            "monotone",
            "continuity_proxy",
            "semiadditive",
            "ratio_nonincreasing",
            "all_pass",
            "expected",
        ],
    );
    for c in &p.candidates {
        let r = check_modulus_axioms(|x| c.modulus.eval(x), &lattice)?;
        table.push(vec![
            c.label.clone(),
            r.zero_at_zero.to_string(),
            r.monotone.to_string(),
            r.continuity_proxy.to_string(),
            r.semiadditive.to_string(),
            r.ratio_nonincreasing.to_string(),
            r.all_pass().to_string(),
            c.expect_pass.to_string(),
        ]);
        report.check(
            format!("{} axioms", c.label),
            r.all_pass() == c.expect_pass,
            format!("all pass: {}, expected {}", r.all_pass(), c.expect_pass),
        );
    }
    report.tables.push(table);
    Ok(())
}
