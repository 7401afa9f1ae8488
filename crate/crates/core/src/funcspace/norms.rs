use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

use super::Function1D;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn widened(&self, by: f64) -> Self {
        Interval {
            lo: self.lo - by,
            hi: self.hi + by,
        }
    }

    pub fn hull(&self, other: &Interval) -> Self {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

/// Maximum of `|f|` from a settled lattice, polished around its peaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupNormEstimate {
    pub value: f64,
    pub grid_spacing: f64,
    pub domain: Interval,
    pub argmax: f64,
}

const INITIAL_INTERVALS: usize = 512;
const MAX_INTERVALS: usize = 1 << 20;

/// `sup |f|` over `domain`, see [`sup_abs`].
pub fn sup_norm(f: &Function1D, domain: Interval, tol: f64) -> Result<SupNormEstimate> {
    sup_abs(|x| f.eval(x), domain, &f.breakpoints(), tol)
}

/// Maximum of `|g|` over `domain`: a uniform lattice plus `extra_points`,
/// doubled until two levels agree to `tol` or to a relative 1e-3, then
/// golden-section polishing of every lattice peak that could still hold
/// the maximum.
pub fn sup_abs(
    g: impl Fn(f64) -> f64,
    domain: Interval,
    extra_points: &[f64],
    tol: f64,
) -> Result<SupNormEstimate> {
    if !(tol > 0.0) {
        return Err(crate::error::domain("tolerance must be positive"));
    }
    Interval::new(domain.lo, domain.hi)?;
    let ext = lattice_extrema(domain, extra_points, tol, INITIAL_INTERVALS, |x| Ok(vec![g(x).abs()]))?;
    Ok(SupNormEstimate {
        value: ext.values[0],
        grid_spacing: ext.spacing,
        domain,
        argmax: ext.argmax[0],
    })
}

pub(crate) struct Extrema {
    pub values: Vec<f64>,
    pub argmax: Vec<f64>,
    pub spacing: f64,
}

/// Componentwise maxima of a vector-valued `g` over `domain`, see [`sup_abs`].
pub(crate) fn lattice_extrema(
    domain: Interval,
    extra_points: &[f64],
    tol: f64,
    initial_intervals: usize,
    g: impl Fn(f64) -> Result<Vec<f64>>,
) -> Result<Extrema> {
    let eval = |x: f64| -> Result<Vec<f64>> {
        let v = g(x)?;
        if v.iter().any(|y| !y.is_finite()) {
            return Err(Error::Evaluation { x });
        }
        Ok(v)
    };
    let extras: Vec<(f64, Vec<f64>)> = extra_points
        .iter()
        .filter(|x| domain.contains(**x))
        .map(|&x| Ok((x, eval(x)?)))
        .collect::<Result<_>>()?;
    if domain.is_empty() {
        let v = eval(domain.lo)?;
        let mut values = v.clone();
        for (_, e) in &extras {
            for (b, y) in values.iter_mut().zip(e) {
                *b = b.max(*y);
            }
        }
        return Ok(Extrema {
            argmax: vec![domain.lo; values.len()],
            values,
            spacing: f64::MIN_POSITIVE,
        });
    }
    let mut intervals = initial_intervals.max(4);
    let (xs, rows, spread) = loop {
        let h = domain.len() / intervals as f64;
        let xs: Vec<f64> = (0..=intervals)
            .map(|i| if i == intervals { domain.hi } else { domain.lo + i as f64 * h })
            .collect();
        let rows = xs.iter().map(|&x| eval(x)).collect::<Result<Vec<_>>>()?;
        let width = rows[0].len();
        let max_at = |step: usize, c: usize| rows.iter().step_by(step).map(|r| r[c]).fold(f64::MIN, f64::max);
        let spread: Vec<f64> = (0..width).map(|c| max_at(1, c) - max_at(2, c)).collect();
        let settled = (0..width).all(|c| spread[c] < tol || spread[c] <= 1e-3 * (1.0 + max_at(1, c).abs()));
        if settled {
            break (xs, rows, spread);
        }
        if intervals >= MAX_INTERVALS {
            return Err(Error::Range(format!(
                "maximum on [{}, {}] is not resolved by {intervals} lattice intervals",
                domain.lo, domain.hi
            )));
        }
        intervals *= 2;
    };
    let width = rows[0].len();
    let mut values = vec![f64::MIN; width];
    let mut argmax = vec![domain.lo; width];
    for (x, r) in xs.iter().zip(&rows).chain(extras.iter().map(|(x, r)| (x, r))) {
        for c in 0..width {
            if r[c] > values[c] {
                values[c] = r[c];
                argmax[c] = *x;
            }
        }
    }
    let last = xs.len() - 1;
    for c in 0..width {
        let threshold = values[c] - tol * (1.0 + values[c].abs());
        // a quadratic peak exceeds its lattice value by at most m - min(l, r);
        // the spread term covers peaks the lattice shape hides
        let optimistic = |i: usize| {
            let (l, m, r) = (rows[i - 1][c], rows[i][c], rows[i + 1][c]);
            m + 2.0 * (m - l.min(r)) + 4.0 * spread[c]
        };
        let mut peaks: Vec<(usize, f64)> = (1..last)
            .filter(|&i| {
                let (l, m, r) = (rows[i - 1][c], rows[i][c], rows[i + 1][c]);
                m >= l && m >= r && (m > l || m > r)
            })
            .map(|i| (i, optimistic(i)))
            .filter(|(_, up)| *up >= threshold)
            .collect();
        peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
        peaks.truncate(64);
        for (i, _) in peaks {
            let (x, v) = golden_max(xs[i - 1], xs[i + 1], |x| Ok(eval(x)?[c]))?;
            if v > values[c] {
                values[c] = v;
                argmax[c] = x;
            }
        }
    }
    Ok(Extrema {
        values,
        argmax,
        spacing: domain.len() / intervals as f64,
    })
}

fn golden_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
            if f2 > best.1 {
                best = (x2, f2);
            }
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
            if f1 > best.1 {
                best = (x1, f1);
            }
        }
        if hi - lo <= 1e-14 * (1.0 + lo.abs()) {
            break;
        }
    }
    Ok(best)
}

/// Cap on outer lattice points used by [`modulus_of_continuity`].
pub const MAX_OUTER_POINTS: usize = 1 << 12;
/// Inner offsets per modulus evaluation.
pub const INNER_OFFSETS: usize = 64;

/// `ω_f(x)` over `domain`: the analytic modulus when present, otherwise the
/// double-lattice supremum with offsets at spacing `x / 64`.
pub fn modulus_of_continuity(f: &Function1D, x: f64, domain: Interval) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(crate::error::domain(format!("modulus argument must be >= 0, got {x}")));
    }
    if let Some(m) = f.analytic_modulus() {
        return Ok(m(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let inner = x / INNER_OFFSETS as f64;
    let outer = inner.max(domain.len() / MAX_OUTER_POINTS as f64);
    lattice_modulus(f, x, domain, inner, outer)
}

/// Double-lattice modulus: outer points `lo + i·outer` covering
/// `[lo - x, hi]` (plus every breakpoint, shifted back by each offset),
/// offsets `k·inner <= x`. With fixed spacings the result is non-decreasing
/// in `x`; breakpoints make it exact for piecewise-linear functions.
pub fn lattice_modulus(f: &Function1D, x: f64, domain: Interval, inner: f64, outer: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(crate::error::domain(format!("modulus argument must be >= 0, got {x}")));
    }
    if !(inner > 0.0) || !(outer > 0.0) {
        return Err(crate::error::domain("lattice spacings must be positive"));
    }
    Interval::new(domain.lo, domain.hi)?;
    let offsets = (x / inner * (1.0 + 1e-12)).floor() as usize;
    if offsets == 0 {
        return Ok(0.0);
    }
    let first = -((x / outer).ceil() as i64);
    let last = (domain.len() / outer).ceil() as i64;
    let mut starts: Vec<f64> = (first..=last).map(|i| domain.lo + i as f64 * outer).collect();
    for b in f.breakpoints() {
        starts.push(b);
        starts.extend((1..=offsets).map(|k| b - k as f64 * inner));
    }
    let mut best = 0.0f64;
    for x1 in starts {
        let f1 = f.try_eval(x1)?;
        for k in 1..=offsets {
            best = best.max((f.try_eval(x1 + k as f64 * inner)? - f1).abs());
        }
    }
    Ok(best)
}

/// Outcome of [`check_modulus_axioms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModulusAxiomReport {
    pub zero_at_zero: bool,
    pub monotone: bool,
    pub continuity_proxy: bool,
    pub semiadditive: bool,
    /// Sufficient condition for semiadditivity: `m(x)/x` non-increasing.
    pub ratio_nonincreasing: bool,
}

impl ModulusAxiomReport {
    /// The four axioms; the ratio test is informative only.
    pub fn all_pass(&self) -> bool {
        self.zero_at_zero && self.monotone && self.continuity_proxy && self.semiadditive
    }
}

const CONTINUITY_REFINEMENT: usize = 4096;

/// Checks the modulus axioms of `m` on a sorted non-negative lattice.
///
/// The continuity proxy refines every lattice cell 4096 times and requires
/// the largest jump to drop below a quarter of the coarse largest jump.
pub fn check_modulus_axioms(m: impl Fn(f64) -> f64, lattice: &[f64]) -> Result<ModulusAxiomReport> {
    if lattice.is_empty() {
        return Err(crate::error::domain("empty lattice"));
    }
    if lattice.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(crate::error::domain("lattice must be finite and non-negative"));
    }
    if lattice.windows(2).any(|w| w[1] < w[0]) {
        return Err(crate::error::domain("lattice must be sorted"));
    }
    let tol = |v: f64| 1e-12 * (1.0 + v.abs());
    let vals: Vec<f64> = lattice.iter().map(|&x| m(x)).collect();

    let m0 = m(0.0);
    let zero_at_zero = m0.abs() <= 1e-12;
    let monotone = vals.windows(2).all(|w| w[1] >= w[0] - tol(w[0]));

    let coarse_jump = vals.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    let mut fine_jump = 0.0f64;
    for w in lattice.windows(2) {
        let step = (w[1] - w[0]) / CONTINUITY_REFINEMENT as f64;
        if step <= 0.0 {
            continue;
        }
        let mut prev = m(w[0]);
        for k in 1..=CONTINUITY_REFINEMENT {
            let cur = m(w[0] + k as f64 * step);
            fine_jump = fine_jump.max((cur - prev).abs());
            prev = cur;
        }
    }
    let continuity_proxy = fine_jump <= 0.25 * coarse_jump || fine_jump <= 1e-12;

    let mut semiadditive = true;
    'outer: for (i, &x) in lattice.iter().enumerate() {
        for (j, &y) in lattice.iter().enumerate().skip(i) {
            let lhs = m(x + y);
            if lhs > vals[i] + vals[j] + tol(lhs) {
                semiadditive = false;
                break 'outer;
            }
        }
    }

    let ratios: Vec<f64> = lattice
        .iter()
        .zip(&vals)
        .filter(|(x, _)| **x > 0.0)
        .map(|(x, v)| v / x)
        .collect();
    let ratio_nonincreasing = ratios.windows(2).all(|w| w[1] <= w[0] + tol(w[0]));

    Ok(ModulusAxiomReport {
        zero_at_zero,
        monotone,
        continuity_proxy,
        semiadditive,
        ratio_nonincreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::Profile;
    use std::f64::consts::PI;

    fn lattice() -> Vec<f64> {
        (0..=40).map(|i| i as f64 * 0.1).collect()
    }

    #[test]
    fn ramp_sup_norm_is_plateau() {
        let est = sup_norm(&Function1D::ramp(), Interval::new(-2.0, 3.0).unwrap(), 1e-12).unwrap();
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let z = Function1D::smooth(Profile::constant(0.0));
        assert_eq!(sup_norm(&z, Interval::new(-1.0, 1.0).unwrap(), 1e-9).unwrap().value, 0.0);
    }

    #[test]
    fn sine_sup_norm_against_dense_sampling() {
        let f = Function1D::smooth(Profile::sine(1.0, 1.0, 0.0));
        let est = sup_norm(&f, Interval::new(0.0, 2.0 * PI).unwrap(), 1e-9).unwrap();
        assert!((est.value - 1.0).abs() < 1e-9, "{}", est.value);
        let dense = (0..=2_000_000)
            .map(|i| (2.0 * PI * i as f64 / 2e6).sin().abs())
            .fold(0.0, f64::max);
        assert!((est.value - dense).abs() < 1e-9);
    }

    #[test]
    fn non_finite_evaluation_is_reported() {
        let f = Function1D::from_fn(|x| if x > 0.5 { f64::NAN } else { 0.0 }, "nan");
        let err = sup_norm(&f, Interval::new(0.0, 1.0).unwrap(), 1e-9).unwrap_err();
        assert!(matches!(err, Error::Evaluation { x } if x > 0.5));
    }

    #[test]
    fn ramp_modulus_values() {
        let dom = Interval::new(-2.0, 3.0).unwrap();
        assert_eq!(modulus_of_continuity(&Function1D::ramp(), 0.5, dom).unwrap(), 0.5);
        // the lattice path without the analytic modulus
        let numeric = Function1D::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert!((modulus_of_continuity(&numeric, 0.5, dom).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(modulus_of_continuity(&numeric, 0.0, dom).unwrap(), 0.0);
        assert!(modulus_of_continuity(&numeric, -1.0, dom).is_err());
    }

    #[test]
    fn sine_modulus_at_pi_is_two() {
        let f = Function1D::smooth(Profile::sine(1.0, 1.0, 0.0));
        let dom = Interval::new(0.0, 2.0 * PI).unwrap();
        let w = modulus_of_continuity(&f, PI, dom).unwrap();
        // brute force over a pair lattice
        let n = 400;
        let mut brute = 0.0f64;
        for i in 0..=n {
            for j in 0..=n {
                let a = -PI + 3.0 * PI * i as f64 / n as f64;
                let b = a + PI * j as f64 / n as f64;
                brute = brute.max((a.sin() - b.sin()).abs());
            }
        }
        assert!((w - 2.0).abs() < 1e-6, "{w}");
        assert!((w - brute).abs() < 1e-6);
    }

    #[test]
    fn axioms_for_sqrt_square_and_linear() {
        let l = lattice();
        let r = check_modulus_axioms(f64::sqrt, &l).unwrap();
        assert!(r.all_pass() && r.ratio_nonincreasing, "{r:?}");
        let r = check_modulus_axioms(|x| x * x, &l).unwrap();
        assert!(!r.semiadditive);
        let r = check_modulus_axioms(|x| 2.0 * x, &l).unwrap();
        assert!(r.all_pass() && r.ratio_nonincreasing);
    }

    #[test]
    fn discontinuous_candidate_fails_proxy() {
        let r = check_modulus_axioms(|x| if x > 0.55 { 1.0 } else { 0.0 }, &lattice()).unwrap();
        assert!(!r.continuity_proxy);
    }

    #[test]
    fn empty_lattice_is_domain_error() {
        assert!(matches!(check_modulus_axioms(f64::sqrt, &[]), Err(Error::Domain(_))));
    }
}
