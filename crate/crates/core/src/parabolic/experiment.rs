//! Error of `S(t/n)^n f` against the oracle over a range of `n`, with the
//! a-priori bound when the constants can be derived.

use serde::Serialize;

use crate::error::{precondition, Result};
use crate::exec::{try_map_range, Execution};
use crate::funcspace::{sup_norm, Function1D, Interval};
use crate::grid::{choose_spacing, GridFunction};
use crate::rates::{ConvergenceReport, ConvergenceRow};

use super::coefficients::{operator_powers, ParabolicCoefficients};
use super::estimates::derive_derivative_constants;
use super::oracle::{oracle_solution, OracleMethod, OracleQuality};
use super::scheme::iterate_chernoff_with;

/// Target for the largest-`n` interpolation budget when the spacing is
/// chosen automatically.
pub const DEFAULT_BUDGET_TARGET: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ParabolicRateExperiment {
    pub coeffs: ParabolicCoefficients,
    pub f: Function1D,
    pub t: f64,
    pub n_values: Vec<usize>,
    /// Grid spacing; chosen from the fourth derivative of `f` when `None`.
    pub spacing: Option<f64>,
    pub quality: OracleQuality,
    /// Emit the a-priori bound column.
    pub with_bound: bool,
}

impl ParabolicRateExperiment {
    pub fn new(coeffs: ParabolicCoefficients, f: Function1D, t: f64, n_values: Vec<usize>) -> Self {
        ParabolicRateExperiment {
            coeffs,
            f,
            t,
            n_values,
            spacing: None,
            quality: OracleQuality::default(),
            with_bound: true,
        }
    }

    pub fn with_spacing(mut self, h: f64) -> Self {
        self.spacing = Some(h);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParabolicRateRow {
    pub n: usize,
    pub h: f64,
    pub error_vs_oracle: f64,
    pub interpolation_budget: f64,
    pub bound_rhs: Option<f64>,
    pub norm_bound_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParabolicRateReport {
    pub rows: Vec<ParabolicRateRow>,
    pub oracle_accuracy: f64,
    pub oracle_method: OracleMethod,
    /// `K_j` of the one-step defect `τ² Σ K_j ‖A^j f‖`, when derived.
    pub defect_constants: Option<Vec<f64>>,
    pub convergence: ConvergenceReport,
}

impl ParabolicRateReport {
    /// Every row satisfies `error <= bound + oracle accuracy + budget`.
    pub fn bound_holds(&self) -> Option<bool> {
        self.rows
            .iter()
            .map(|r| {
                r.bound_rhs
                    .map(|b| r.error_vs_oracle <= b + self.oracle_accuracy + r.interpolation_budget)
            })
            .collect::<Option<Vec<bool>>>()
            .map(|v| v.iter().all(|x| *x))
    }
}

/// `K_j = ‖a‖²/3 · C[4][j] + ‖b‖² · C[2][j]` from the derivative table.
pub fn defect_constants(coeffs: &ParabolicCoefficients) -> Result<Vec<f64>> {
    let table = derive_derivative_constants(coeffs, 4)?;
    let (a, b, _) = coeffs.norms();
    Ok((0..table.row(4).len())
        .map(|j| a * a / 3.0 * table.row(4)[j] + b * b * table.row(2)[j])
        .collect())
}

/// `t² e^{wt}/n · Σ_j (K_j e^{−wt/n} + [j = 2]/2) ‖A^j f‖` with `w = ‖c‖`.
pub fn parabolic_bound_rhs(k: &[f64], power_norms: &[f64], w: f64, t: f64, n: usize) -> f64 {
    let tau = t / n as f64;
    let sum: f64 = k
        .iter()
        .zip(power_norms)
        .enumerate()
        .map(|(j, (kj, nj))| (kj * (-w * tau).exp() + if j == 2 { 0.5 } else { 0.0 }) * nj)
        .sum();
    t * t * (w * t).exp() / n as f64 * sum
}

pub fn parabolic_rate_experiment(exp: &ParabolicRateExperiment) -> Result<ParabolicRateReport> {
    parabolic_rate_experiment_with(exp, Execution::default())
}

pub fn parabolic_rate_experiment_with(exp: &ParabolicRateExperiment, exec: Execution) -> Result<ParabolicRateReport> {
    if exp.n_values.is_empty() || exp.n_values.contains(&0) {
        return Err(precondition("n values must be positive and non-empty"));
    }
    if !(exp.t > 0.0) {
        return Err(precondition("t must be positive"));
    }
    let window = exp.coeffs.window();
    let n_max = *exp.n_values.iter().max().expect("non-empty");
    let h = match exp.spacing {
        Some(h) => h,
        None => {
            let m4 = sup_norm(
                &derivative_function(&exp.f, 4),
                window,
                1e-8,
            )?
            .value;
            choose_spacing(DEFAULT_BUDGET_TARGET, n_max, m4).min(window.len() / 64.0)
        }
    };
    let intervals = (window.len() / h).ceil() as usize;
    let f0 = GridFunction::from_fn(window.lo, window.hi, intervals, |x| exp.f.eval(x))?;
    let h = f0.spacing();
    let oracle = oracle_solution(&exp.coeffs, &exp.f, &f0, exp.t, exp.quality)?;

    let bound_parts = if exp.with_bound {
        let k = defect_constants(&exp.coeffs)?;
        let powers = operator_powers(&exp.coeffs, &exp.f, k.len() - 1)?;
        let norms = powers
            .iter()
            .map(|p| Ok(sup_norm(p, window, 1e-10)?.value))
            .collect::<Result<Vec<f64>>>()?;
        Some((k, norms))
    } else {
        None
    };
    let w = exp.coeffs.norms().2;

    let mut rows = try_map_range(exp.n_values.len(), exec, |i| {
        let n = exp.n_values[i];
        let out = iterate_chernoff_with(&exp.coeffs, &f0, exp.t, n, Execution::Sequential)?;
        let error = out.grid.max_abs_diff_on(&oracle.grid, window.lo, window.hi)?;
        Ok(ParabolicRateRow {
            n,
            h,
            error_vs_oracle: error,
            interpolation_budget: out.budget,
            bound_rhs: bound_parts
                .as_ref()
                .map(|(k, norms)| parabolic_bound_rhs(k, norms, w, exp.t, n)),
            norm_bound_holds: out.norm_bound_holds,
        })
    })?;
    rows.sort_by_key(|r| r.n);
    let conv_rows = rows
        .iter()
        .map(|r| {
            let row = ConvergenceRow::new(r.n, r.error_vs_oracle).with_noise(r.interpolation_budget);
            match r.bound_rhs {
                Some(b) => row.with_reference(b),
                None => row,
            }
        })
        .collect();
    let label = match oracle.method {
        OracleMethod::CrankNicolson { .. } => "parabolic chernoff vs crank-nicolson",
        _ => "parabolic chernoff vs gaussian kernel",
    };
    Ok(ParabolicRateReport {
        rows,
        oracle_accuracy: oracle.accuracy,
        oracle_method: oracle.method,
        defect_constants: bound_parts.map(|(k, _)| k),
        convergence: ConvergenceReport::new(label, conv_rows, oracle.accuracy),
    })
}

fn derivative_function(f: &Function1D, k: usize) -> Function1D {
    let g = f.clone();
    Function1D::from_fn(move |x| g.derivative(x, k).unwrap_or(f64::NAN), format!("d{k}"))
}

/// Window inflated for `S(t/n)^n` started from a function whose interesting
/// part lies in `support`.
pub fn rate_window(support: Interval, coeffs: &ParabolicCoefficients, t: f64, n_max: usize) -> Interval {
    super::scheme::working_window(support, coeffs, t, n_max)
}
