//! Reference solutions of `u_t = a u'' + b u' + c u`: the Gaussian kernel for
//! constant coefficients, Crank–Nicolson with Richardson comparison
//! otherwise.

use serde::Serialize;

use crate::error::{precondition, Error, Result};
use crate::funcspace::Function1D;
use crate::grid::GridFunction;
use crate::quadrature::GaussLegendre;

use super::coefficients::ParabolicCoefficients;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleQuality {
    /// Required agreement between two successive refinement levels.
    pub tolerance: f64,
    pub max_levels: usize,
}

impl Default for OracleQuality {
    fn default() -> Self {
        OracleQuality {
            tolerance: 1e-8,
            max_levels: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum OracleMethod {
    Identity,
    GaussianKernel { panels: usize },
    CrankNicolson { levels: usize },
}

#[derive(Debug, Clone)]
pub struct OracleSolution {
    /// `e^{tA}f` on the requested nodes.
    pub grid: GridFunction,
    /// Agreement between the last two refinement levels.
    pub accuracy: f64,
    pub method: OracleMethod,
}

/// `e^{tA}f` on the nodes of `nodes`.
pub fn oracle_solution(
    coeffs: &ParabolicCoefficients,
    f: &Function1D,
    nodes: &GridFunction,
    t: f64,
    quality: OracleQuality,
) -> Result<OracleSolution> {
    if !(t >= 0.0) {
        return Err(precondition(format!("oracle needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        let values = nodes.nodes().map(|x| f.try_eval(x)).collect::<Result<Vec<_>>>()?;
        return Ok(OracleSolution {
            grid: nodes.with_values(values)?,
            accuracy: 0.0,
            method: OracleMethod::Identity,
        });
    }
    match coeffs.constant_values() {
        Some((a, b, c)) => kernel(a, b, c, f, nodes, t, quality),
        None => crank_nicolson(coeffs, f, nodes, t, quality),
    }
}

const KERNEL_HALF_WIDTH: f64 = 8.0;

/// `e^{ct}/√π ∫ e^{−s²} f(x + bt + 2√(at) s) ds` over `|s| <= 8`.
fn kernel(
    a: f64,
    b: f64,
    c: f64,
    f: &Function1D,
    nodes: &GridFunction,
    t: f64,
    quality: OracleQuality,
) -> Result<OracleSolution> {
    let rule = GaussLegendre::new(16);
    let scale = 2.0 * (a * t).sqrt();
    let growth = (c * t).exp() / std::f64::consts::PI.sqrt();
    let eval = |panels: usize| -> Vec<f64> {
        nodes
            .nodes()
            .map(|x| {
                growth
                    * rule.integrate_composite(-KERNEL_HALF_WIDTH, KERNEL_HALF_WIDTH, panels, |s| {
                        (-s * s).exp() * f.eval(x + b * t + scale * s)
                    })
            })
            .collect()
    };
    let mut panels = 16;
    let mut prev = eval(panels);
    let mut achieved = f64::INFINITY;
    for _ in 0..quality.max_levels {
        panels *= 2;
        let next = eval(panels);
        achieved = max_diff(&prev, &next);
        if !achieved.is_finite() {
            break;
        }
        if achieved < quality.tolerance {
            return Ok(OracleSolution {
                grid: nodes.with_values(next)?,
                accuracy: achieved,
                method: OracleMethod::GaussianKernel { panels },
            });
        }
        prev = next;
    }
    Err(Error::OracleAccuracy {
        achieved,
        requested: quality.tolerance,
    })
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Crank–Nicolson on the node window with central differences, `Δt ∝ h`,
/// Dirichlet ends `f(x_end) e^{c(x_end) t}` (exact where `f` is locally
/// constant). Level `ℓ` halves `h` and `Δt`; `E_ℓ = (4u_ℓ − u_{ℓ−1})/3`
/// is accepted once two successive `E` agree to the tolerance.
fn crank_nicolson(
    coeffs: &ParabolicCoefficients,
    f: &Function1D,
    nodes: &GridFunction,
    t: f64,
    quality: OracleQuality,
) -> Result<OracleSolution> {
    let base_steps = (t / nodes.spacing()).ceil().max(1.0) as usize;
    let mut levels: Vec<Vec<f64>> = Vec::new();
    let mut extrapolated: Option<Vec<f64>> = None;
    let mut achieved = f64::INFINITY;
    for level in 0..=quality.max_levels {
        let refine = 1usize << level;
        let u = cn_solve(coeffs, f, nodes, t, refine, base_steps * refine)?;
        if let Some(prev) = levels.last() {
            let e: Vec<f64> = u.iter().zip(prev).map(|(fine, coarse)| (4.0 * fine - coarse) / 3.0).collect();
            if let Some(prev_e) = &extrapolated {
                achieved = max_diff(&e, prev_e);
                if achieved < quality.tolerance {
                    return Ok(OracleSolution {
                        grid: nodes.with_values(e)?,
                        accuracy: achieved,
                        method: OracleMethod::CrankNicolson { levels: level + 1 },
                    });
                }
            }
            extrapolated = Some(e);
        }
        levels.push(u);
    }
    Err(Error::OracleAccuracy {
        achieved,
        requested: quality.tolerance,
    })
}

/// One CN solve with `refine` sub-intervals per output interval; returns
/// values at the output nodes.
fn cn_solve(
    coeffs: &ParabolicCoefficients,
    f: &Function1D,
    nodes: &GridFunction,
    t: f64,
    refine: usize,
    steps: usize,
) -> Result<Vec<f64>> {
    let m = nodes.intervals() * refine;
    let h = nodes.spacing() / refine as f64;
    let x = |j: usize| nodes.x_lo() + j as f64 * h;
    let dt = t / steps as f64;
    let mut u: Vec<f64> = (0..=m).map(|j| f.try_eval(x(j))).collect::<Result<_>>()?;
    let (mut lo, mut di, mut up) = (vec![0.0; m + 1], vec![0.0; m + 1], vec![0.0; m + 1]);
    for j in 1..m {
        let (a, b, c) = coeffs.eval(x(j));
        lo[j] = a / (h * h) - b / (2.0 * h);
        di[j] = -2.0 * a / (h * h) + c;
        up[j] = a / (h * h) + b / (2.0 * h);
    }
    let (c0, cm) = (coeffs.c().eval(x(0)), coeffs.c().eval(x(m)));
    let (u0, um) = (u[0], u[m]);
    let half = 0.5 * dt;
    let mut rhs = vec![0.0; m + 1];
    let mut cp = vec![0.0; m + 1];
    for k in 1..=steps {
        let tk = k as f64 * dt;
        for j in 1..m {
            rhs[j] = u[j] + half * (lo[j] * u[j - 1] + di[j] * u[j] + up[j] * u[j + 1]);
        }
        rhs[0] = u0 * (c0 * tk).exp();
        rhs[m] = um * (cm * tk).exp();
        // Thomas: row j is −half·lo u_{j−1} + (1 − half·di) u_j − half·up u_{j+1}
        cp[0] = 0.0;
        let mut prev_d = rhs[0];
        u[0] = prev_d;
        for j in 1..m {
            let l = -half * lo[j];
            let denom = (1.0 - half * di[j]) - l * cp[j - 1];
            cp[j] = -half * up[j] / denom;
            prev_d = (rhs[j] - l * prev_d) / denom;
            u[j] = prev_d;
        }
        u[m] = rhs[m];
        for j in (1..m).rev() {
            u[j] -= cp[j] * u[j + 1];
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Range("Crank-Nicolson produced non-finite values".into()));
        }
    }
    Ok((0..=nodes.intervals()).map(|i| u[i * refine]).collect())
}
