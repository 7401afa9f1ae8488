//! Uniform-grid functions with 4-point (cubic) Lagrange interpolation and
//! constant extension beyond the end nodes.

use crate::error::{Error, Result};

/// Worst-case cubic interpolation constant: `|f - I f| <= KAPPA h^4 max|f''''|`.
///
/// Interior intervals only need 3/128; intervals next to an end node use a
/// one-sided stencil whose nodal polynomial peaks at 1, hence 1/24.
pub const INTERPOLATION_KAPPA: f64 = 1.0 / 24.0;

/// Samples on `x_lo + i h`, `i = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    x_lo: f64,
    h: f64,
    values: Vec<f64>,
    extension_margin: f64,
}

impl GridFunction {
    /// Requires at least five nodes (`N >= 4`) and finite values.
    pub fn new(x_lo: f64, x_hi: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 5 {
            return Err(Error::Shape(format!(
                "grid needs at least 5 nodes, got {}",
                values.len()
            )));
        }
        if !(x_hi > x_lo) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(Error::Domain(format!("bad grid window [{x_lo}, {x_hi}]")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            let h = (x_hi - x_lo) / (values.len() - 1) as f64;
            return Err(Error::Evaluation {
                x: x_lo + i as f64 * h,
            });
        }
        let h = (x_hi - x_lo) / (values.len() - 1) as f64;
        Ok(GridFunction {
            x_lo,
            h,
            values,
            extension_margin: f64::INFINITY,
        })
    }

    /// Samples `f` on `intervals + 1` uniform nodes.
    pub fn from_fn(x_lo: f64, x_hi: f64, intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = (x_hi - x_lo) / intervals as f64;
        let values = (0..=intervals).map(|i| f(x_lo + i as f64 * h)).collect();
        Self::new(x_lo, x_hi, values)
    }

    /// Distance beyond the end nodes over which constant extension is trusted.
    /// Defaults to infinity (the sampled function is constant outside).
    pub fn with_extension_margin(mut self, margin: f64) -> Self {
        self.extension_margin = margin;
        self
    }

    pub fn extension_margin(&self) -> f64 {
        self.extension_margin
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.node(self.values.len() - 1)
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_lo + i as f64 * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|i| self.node(i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Same nodes, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::Shape(format!(
                "expected {} values, got {}",
                self.values.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Evaluation { x: self.node(i) });
        }
        Ok(GridFunction {
            values,
            ..self.clone()
        })
    }

    /// True when `x` lies inside the grid window widened by the extension margin.
    pub fn covers(&self, x: f64) -> bool {
        x >= self.x_lo - self.extension_margin && x <= self.x_hi() + self.extension_margin
    }

    /// Cubic interpolant, constant beyond the end nodes.
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.values.len() - 1;
        let s = (x - self.x_lo) / self.h;
        if s <= 0.0 {
            return self.values[0];
        }
        if s >= last as f64 {
            return self.values[last];
        }
        let i = s.floor() as usize;
        let base = i.saturating_sub(1).min(last - 3);
        let u = s - base as f64;
        let w0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
        let w1 = u * (u - 2.0) * (u - 3.0) / 2.0;
        let w2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
        let w3 = u * (u - 1.0) * (u - 2.0) / 6.0;
        let v = &self.values[base..base + 4];
        w0 * v[0] + w1 * v[1] + w2 * v[2] + w3 * v[3]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |Δ⁴ f|`, which estimates `h^4 max |f''''|`.
    pub fn max_fourth_difference(&self) -> f64 {
        self.values
            .windows(5)
            .map(|w| (w[0] - 4.0 * w[1] + 6.0 * w[2] - 4.0 * w[3] + w[4]).abs())
            .fold(0.0, f64::max)
    }

    /// Bound on the error of one round of off-node evaluations whose weights
    /// have absolute sum at most `weight_sum`: twice the fourth-difference
    /// estimate plus a floating-point floor.
    pub fn interpolation_error_bound(&self, weight_sum: f64) -> f64 {
        weight_sum
            * (2.0 * INTERPOLATION_KAPPA * self.max_fourth_difference()
                + 16.0 * f64::EPSILON * self.max_abs())
    }

    /// Largest absolute difference against `other` on nodes with `x` in `[lo, hi]`.
    pub fn max_abs_diff_on(&self, other: &GridFunction, lo: f64, hi: f64) -> Result<f64> {
        if other.len() != self.len() || (other.x_lo - self.x_lo).abs() > 1e-12 * (1.0 + self.x_lo.abs()) {
            return Err(Error::Shape("grids do not share nodes".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .filter(|(i, _)| {
                let x = self.node(*i);
                x >= lo && x <= hi
            })
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Spacing that keeps the accumulated interpolation error of `n` steps below
/// `target`: `h <= (target / (n κ M4))^(1/4)`.
pub fn choose_spacing(target_error: f64, n: usize, max_fourth_derivative: f64) -> f64 {
    if max_fourth_derivative <= 0.0 {
        return f64::INFINITY;
    }
    (target_error / (n as f64 * INTERPOLATION_KAPPA * max_fourth_derivative)).powf(0.25)
}
