//! The step `S(t)f(x) = ¼f(x+2√(a(x)t)) + ¼f(x−2√(a(x)t)) + ½f(x+2b(x)t) + t c(x) f(x)`
//! on a uniform grid with cubic interpolation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{try_map_range, Execution};
use crate::funcspace::Interval;
use crate::grid::GridFunction;

use super::coefficients::ParabolicCoefficients;

#[derive(Debug, Clone)]
pub struct StepOutput {
    pub grid: GridFunction,
    /// Interpolation error introduced by this step.
    pub budget: f64,
    /// `max|Sf| <= e^{‖c‖t} max|f| + budget` on the nodes.
    pub norm_bound_holds: bool,
}

#[derive(Debug, Clone)]
pub struct IterateOutput {
    pub grid: GridFunction,
    /// Accumulated interpolation budget; earlier steps' contributions are
    /// amplified by `e^{‖c‖τ}` per later step.
    pub budget: f64,
    pub steps: usize,
    pub norm_bound_holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepShifts {
    pub diffusion: f64,
    pub drift: f64,
}

/// Largest shifts `2√(‖a‖t)` and `2‖b‖t` of one step.
pub fn max_shifts(coeffs: &ParabolicCoefficients, t: f64) -> StepShifts {
    let (a, b, _) = coeffs.norms();
    StepShifts {
        diffusion: 2.0 * (a * t).sqrt(),
        drift: 2.0 * b * t,
    }
}

/// `support` inflated by `n` times the largest single-step shift at `t/n`.
pub fn working_window(support: Interval, coeffs: &ParabolicCoefficients, t: f64, n: usize) -> Interval {
    let s = max_shifts(coeffs, t / n as f64);
    support.widened(n as f64 * s.diffusion.max(s.drift))
}

struct NodeData {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

fn node_data(coeffs: &ParabolicCoefficients, f: &GridFunction) -> Result<NodeData> {
    let abc = coeffs.on_nodes(f)?;
    if let Some((i, _)) = abc.iter().enumerate().find(|(_, v)| !(v.0 > 0.0)) {
        return Err(crate::error::precondition(format!(
            "a({}) is not positive",
            f.node(i)
        )));
    }
    Ok(NodeData {
        a: abc.iter().map(|v| v.0).collect(),
        b: abc.iter().map(|v| v.1).collect(),
        c: abc.iter().map(|v| v.2).collect(),
    })
}

fn step(
    coeffs: &ParabolicCoefficients,
    data: &NodeData,
    f: &GridFunction,
    t: f64,
    exec: Execution,
    step_index: Option<usize>,
) -> Result<StepOutput> {
    if !(t >= 0.0) {
        return Err(crate::error::precondition(format!("step needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(StepOutput {
            grid: f.clone(),
            budget: 0.0,
            norm_bound_holds: true,
        });
    }
    let values = try_map_range(f.len(), exec, |i| {
        let x = f.node(i);
        let s = 2.0 * (data.a[i] * t).sqrt();
        let d = 2.0 * data.b[i] * t;
        for y in [x + s, x - s, x + d] {
            if !f.covers(y) {
                return Err(Error::Window {
                    detail: format!(
                        "shifted point {y} from node {x} leaves [{}, {}] by more than the margin {}; enlarge the window",
                        f.x_lo(),
                        f.x_hi(),
                        f.extension_margin()
                    ),
                    step: step_index,
                });
            }
        }
        Ok(0.25 * f.eval(x + s) + 0.25 * f.eval(x - s) + 0.5 * f.eval(x + d) + t * data.c[i] * f.values()[i])
    })?;
    let budget = f.interpolation_error_bound(1.0);
    let grid = f.with_values(values)?;
    let (_, _, c_norm) = coeffs.norms();
    let norm_bound_holds = grid.max_abs() <= (c_norm * t).exp() * f.max_abs() + budget;
    Ok(StepOutput {
        grid,
        budget,
        norm_bound_holds,
    })
}

/// One step at time `t`.
pub fn apply_chernoff_step(coeffs: &ParabolicCoefficients, f: &GridFunction, t: f64) -> Result<StepOutput> {
    apply_chernoff_step_with(coeffs, f, t, Execution::default())
}

pub fn apply_chernoff_step_with(
    coeffs: &ParabolicCoefficients,
    f: &GridFunction,
    t: f64,
    exec: Execution,
) -> Result<StepOutput> {
    let data = node_data(coeffs, f)?;
    step(coeffs, &data, f, t, exec, None)
}

/// `S(t/n)^n f`.
pub fn iterate_chernoff(coeffs: &ParabolicCoefficients, f: &GridFunction, t: f64, n: usize) -> Result<IterateOutput> {
    iterate_chernoff_with(coeffs, f, t, n, Execution::default())
}

pub fn iterate_chernoff_with(
    coeffs: &ParabolicCoefficients,
    f: &GridFunction,
    t: f64,
    n: usize,
    exec: Execution,
) -> Result<IterateOutput> {
    if n == 0 {
        return Err(crate::error::precondition("n must be at least 1"));
    }
    let data = node_data(coeffs, f)?;
    let tau = t / n as f64;
    let growth = (coeffs.norms().2 * tau).exp();
    let mut grid = f.clone();
    let mut budget = 0.0;
    let mut norm_ok = true;
    for k in 0..n {
        let out = step(coeffs, &data, &grid, tau, exec, Some(k))?;
        budget = budget * growth + out.budget;
        norm_ok &= out.norm_bound_holds;
        grid = out.grid;
    }
    Ok(IterateOutput {
        grid,
        budget,
        steps: n,
        norm_bound_holds: norm_ok,
    })
}
