//! Derivative estimates: `sup|u'| <= h sup|u''| + sup|u|/h` and constants
//! with `‖v^{(n)}‖ <= Σ_k C[n][k] ‖A^k v‖`.

use serde::Serialize;

use crate::error::{domain, precondition, Result};
use crate::funcspace::{Function1D, Interval};

use super::coefficients::{operator_powers, window_sups, ParabolicCoefficients};
use super::expansion::{expand_power, highest_derivative_bound};

/// Sup-norm tolerance for test-function derivatives on a window.
pub const DERIVATIVE_SUP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandauCheck {
    /// `sup |u'|`.
    pub lhs: f64,
    /// `h sup |u''| + sup |u| / h`.
    pub rhs: f64,
    pub holds: bool,
    /// The window does not contain the region where `u` varies, so the sups
    /// are window-relative.
    pub window_dependent: bool,
}

/// Window sups of `|u^{(i)}|` for `i = 0..=order`.
pub fn derivative_sups(u: &Function1D, order: usize, window: Interval) -> Result<Vec<f64>> {
    window_sups(window, DERIVATIVE_SUP_TOL, |x| {
        let jet = u.jet_at(x, order)?;
        Ok((0..=order).map(|i| jet.derivative(i).abs()).collect())
    })
}

pub fn landau_inequality_check(u: &Function1D, h: f64, window: Interval) -> Result<LandauCheck> {
    if !(h > 0.0) {
        return Err(domain(format!("h must be positive, got {h}")));
    }
    let s = derivative_sups(u, 2, window)?;
    let rhs = h * s[2] + s[0] / h;
    let window_dependent = u
        .active_interval()
        .is_none_or(|iv| iv.lo < window.lo || iv.hi > window.hi);
    Ok(LandauCheck {
        lhs: s[1],
        rhs,
        holds: s[1] <= rhs * (1.0 + 1e-12),
        window_dependent,
    })
}

/// `C[n][k]`, `k = 0..=⌈n/2⌉`, realizing `‖v^{(n)}‖ <= Σ_k C[n][k] ‖A^k v‖`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeConstantTable {
    pub n_max: usize,
    pub c: Vec<Vec<f64>>,
    /// `h` chosen at each odd order (`None` at even orders).
    pub h_choices: Vec<Option<f64>>,
}

impl DerivativeConstantTable {
    pub fn row(&self, n: usize) -> &[f64] {
        &self.c[n]
    }
}

/// Builds the table order by order. Even `m = 2q`: the highest-derivative
/// bound for `A^q`. Odd `m`: the Landau inequality with `u = v^{(m-1)}`,
/// the highest-derivative bound for `q = (m+1)/2`, `h = 1` when
/// `α_m = ‖p_m/a^q‖ = 0` and `h = 1/(2α_m)` otherwise, then division by
/// `1 − hα_m`. Lower derivatives are replaced by their rows.
pub fn derive_derivative_constants(coeffs: &ParabolicCoefficients, n_max: usize) -> Result<DerivativeConstantTable> {
    if !(coeffs.a_min() > 0.0) {
        return Err(precondition("inf a must be positive"));
    }
    let width = n_max.div_ceil(2) + 1;
    let mut c: Vec<Vec<f64>> = vec![{
        let mut r = vec![0.0; width];
        r[0] = 1.0;
        r
    }];
    let mut h_choices = vec![None];
    for m in 1..=n_max {
        let q = m.div_ceil(2);
        let exp = expand_power(coeffs, q)?;
        let (inv, alpha) = highest_derivative_bound(coeffs, &exp)?;
        let mut row = vec![0.0; width];
        if m % 2 == 0 {
            row[q] += inv;
            for (i, a) in alpha.iter().enumerate() {
                for k in 0..width {
                    row[k] += a * c[i][k];
                }
            }
            h_choices.push(None);
        } else {
            let am = alpha[m];
            let h = if am == 0.0 { 1.0 } else { 1.0 / (2.0 * am) };
            let denom = 1.0 - h * am;
            row[q] += h * inv / denom;
            for i in 0..m {
                let mut beta = h * alpha[i];
                if i == m - 1 {
                    beta += 1.0 / h;
                }
                beta /= denom;
                for k in 0..width {
                    row[k] += beta * c[i][k];
                }
            }
            h_choices.push(Some(h));
        }
        c.push(row);
    }
    Ok(DerivativeConstantTable { n_max, c, h_choices })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCheckRow {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Both sides of `‖v^{(n)}‖ <= Σ_k C[n][k] ‖A^k v‖` for every row.
pub fn check_derivative_table(
    table: &DerivativeConstantTable,
    coeffs: &ParabolicCoefficients,
    v: &Function1D,
) -> Result<Vec<TableCheckRow>> {
    let window = coeffs.window();
    let width = table.c[0].len();
    let lhs = derivative_sups(v, table.n_max, window)?;
    let powers = operator_powers(coeffs, v, width - 1)?;
    let power_norms = window_sups(window, DERIVATIVE_SUP_TOL, |x| {
        powers.iter().map(|p| Ok(p.try_eval(x)?.abs())).collect()
    })?;
    Ok((0..=table.n_max)
        .map(|n| TableCheckRow {
            n,
            lhs: lhs[n],
            rhs: table.c[n].iter().zip(&power_norms).map(|(c, p)| c * p).sum(),
        })
        .collect())
}
