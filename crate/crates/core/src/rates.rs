//! Empirical convergence orders and bound tracking across `n`.

use serde::Serialize;

use crate::error::{precondition, Error, Result};

/// Rows with error at most this multiple of the noise are left out of fits.
pub const NOISE_MARGIN: f64 = 10.0;
pub const MIN_FIT_ROWS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub error: f64,
    /// Predicted value (exact laws) or upper bound (estimates).
    pub predicted_or_bound: Option<f64>,
    /// Carrier noise attached to this row (lattice resolution, oracle
    /// accuracy, interpolation budget).
    pub noise: f64,
}

impl ConvergenceRow {
    pub fn new(n: usize, error: f64) -> Self {
        ConvergenceRow {
            n,
            error,
            predicted_or_bound: None,
            noise: 0.0,
        }
    }

    pub fn with_reference(mut self, value: f64) -> Self {
        self.predicted_or_bound = Some(value);
        self
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderFit {
    /// Negated least-squares slope of `ln error` against `ln n`.
    pub order: f64,
    pub r_squared: f64,
    /// The `n` values that entered the fit.
    pub fit_window: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub scheme: String,
    pub rows: Vec<ConvergenceRow>,
    pub noise_floor: f64,
    pub fit: Option<OrderFit>,
}

impl ConvergenceReport {
    /// Sorts rows by `n` and fits an order when enough rows clear the noise.
    pub fn new(scheme: impl Into<String>, mut rows: Vec<ConvergenceRow>, noise_floor: f64) -> Self {
        rows.sort_by_key(|r| r.n);
        let fit = fit_rows(&rows, noise_floor).ok();
        ConvergenceReport {
            scheme: scheme.into(),
            rows,
            noise_floor,
            fit,
        }
    }

    /// Largest `|error - predicted|` over rows carrying a prediction.
    pub fn max_discrepancy(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.predicted_or_bound.map(|p| (r.error - p).abs()))
            .fold(0.0, f64::max)
    }

    pub fn fitted_order(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.order)
    }
}

/// Fits `error ≈ C n^{-order}` using rows with `error > 10 × noise_floor`.
pub fn fit_order(rows: &[(usize, f64)], noise_floor: f64) -> Result<OrderFit> {
    let usable: Vec<(usize, f64)> = rows
        .iter()
        .copied()
        .filter(|&(n, e)| n > 0 && e.is_finite() && e > NOISE_MARGIN * noise_floor && e > 0.0)
        .collect();
    least_squares(&usable)
}

/// Like [`fit_order`], with each row's own noise added to the floor.
pub fn fit_rows(rows: &[ConvergenceRow], noise_floor: f64) -> Result<OrderFit> {
    let usable: Vec<(usize, f64)> = rows
        .iter()
        .filter(|r| {
            r.n > 0 && r.error.is_finite() && r.error > 0.0 && r.error > NOISE_MARGIN * (noise_floor + r.noise)
        })
        .map(|r| (r.n, r.error))
        .collect();
    least_squares(&usable)
}

fn least_squares(points: &[(usize, f64)]) -> Result<OrderFit> {
    if points.len() < MIN_FIT_ROWS {
        return Err(Error::InsufficientData {
            usable: points.len(),
            needed: MIN_FIT_ROWS,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (slope, r_squared) = linear_fit(&xs, &ys);
    Ok(OrderFit {
        order: -slope,
        r_squared,
        fit_window: points.iter().map(|p| p.0).collect(),
    })
}

/// Least-squares slope and coefficient of determination.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, r2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTracking {
    /// `bound - error` per row, in row order.
    pub slacks: Vec<f64>,
    pub min_slack: f64,
    /// `n` of rows whose slack is below `-tolerance`.
    pub violations: Vec<usize>,
    /// `error / bound` per row (0 when the bound is 0 and the error too).
    pub ratios: Vec<f64>,
    /// Log-log slope of the positive ratios against `n`, when at least two exist.
    pub ratio_trend: Option<f64>,
    pub tolerance: f64,
}

impl BoundTracking {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Slack of every row against its bound column.
pub fn track_bound(rows: &[ConvergenceRow], tolerance: f64) -> Result<BoundTracking> {
    let mut slacks = Vec::with_capacity(rows.len());
    let mut ratios = Vec::with_capacity(rows.len());
    let mut violations = Vec::new();
    for r in rows {
        let bound = r
            .predicted_or_bound
            .ok_or_else(|| precondition(format!("row n = {} has no bound", r.n)))?;
        let slack = bound - r.error;
        if slack < -tolerance {
            violations.push(r.n);
        }
        slacks.push(slack);
        ratios.push(if bound > 0.0 {
            r.error / bound
        } else if r.error == 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    let positive: Vec<(f64, f64)> = rows
        .iter()
        .zip(&ratios)
        .filter(|(r, q)| r.n > 0 && **q > 0.0 && q.is_finite())
        .map(|(r, q)| ((r.n as f64).ln(), q.ln()))
        .collect();
    let ratio_trend = (positive.len() >= 2).then(|| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = positive.into_iter().unzip();
        linear_fit(&xs, &ys).0
    });
    Ok(BoundTracking {
        min_slack: slacks.iter().copied().fold(f64::INFINITY, f64::min),
        slacks,
        violations,
        ratios,
        ratio_trend,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(c: f64, alpha: f64) -> Vec<(usize, f64)> {
        [4usize, 8, 16, 32, 64, 128]
            .iter()
            .map(|&n| (n, c / (n as f64).powf(alpha)))
            .collect()
    }

    #[test]
    fn exact_inverse_n() {
        let fit = fit_order(&synthetic(1.0, 1.0), 0.0).unwrap();
        assert!((fit.order - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn five_over_n_squared() {
        let fit = fit_order(&synthetic(5.0, 2.0), 0.0).unwrap();
        assert!((fit.order - 2.0).abs() < 1e-12);
    }

    #[test]
    fn noise_floor_removes_rows() {
        let rows = synthetic(1.0, 1.0);
        // only n = 4, 8 exceed 10 × 0.01
        let err = fit_order(&rows, 0.01).unwrap_err();
        assert_eq!(err, Error::InsufficientData { usable: 2, needed: 4 });
    }

    #[test]
    fn report_sorts_and_measures_discrepancy() {
        let rows = vec![
            ConvergenceRow::new(8, 0.125).with_reference(0.125),
            ConvergenceRow::new(2, 0.5).with_reference(0.5),
            ConvergenceRow::new(4, 0.25).with_reference(0.26),
            ConvergenceRow::new(1, 1.0).with_reference(1.0),
        ];
        let rep = ConvergenceReport::new("t", rows, 0.0);
        assert_eq!(rep.rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![1, 2, 4, 8]);
        assert!((rep.max_discrepancy() - 0.01).abs() < 1e-15);
        assert!((rep.fitted_order().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_scheme_slacks_equal_bounds() {
        let rows: Vec<_> = (1..=5)
            .map(|n| ConvergenceRow::new(n, 0.0).with_reference(1.0 / n as f64))
            .collect();
        let t = track_bound(&rows, 1e-10).unwrap();
        assert!(t.holds());
        for (s, r) in t.slacks.iter().zip(&rows) {
            assert_eq!(*s, r.predicted_or_bound.unwrap());
        }
    }

    #[test]
    fn violation_flagged_and_missing_bound_rejected() {
        let rows = vec![
            ConvergenceRow::new(1, 2.0).with_reference(1.0),
            ConvergenceRow::new(2, 0.1).with_reference(1.0),
        ];
        let t = track_bound(&rows, 1e-10).unwrap();
        assert_eq!(t.violations, vec![1]);
        assert_eq!(t.min_slack, -1.0);
        assert!(track_bound(&[ConvergenceRow::new(1, 0.0)], 0.0).is_err());
    }
}
