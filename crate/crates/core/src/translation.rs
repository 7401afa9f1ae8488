//! The translation group `(Q(t)f)(x) = f(x + t)` and the Chernoff family
//! `(G(t)f)(x) = f(x + t + t·v(1/t))`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::exec::{try_map_range, Execution};
use crate::funcspace::{lattice_modulus, modulus_of_continuity, sup_abs, Function1D, FunctionKind, Interval};
use crate::rates::{ConvergenceReport, ConvergenceRow};

type RateFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Decay function `v: (0, ∞) → [0, ∞)` with `v(x) → 0`.
#[derive(Clone)]
pub struct RateFunctionV {
    eval: RateFn,
    monotone_nonincreasing: bool,
    continuous: bool,
    name: String,
}

impl fmt::Debug for RateFunctionV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RateFunctionV")
            .field("name", &self.name)
            .field("monotone_nonincreasing", &self.monotone_nonincreasing)
            .field("continuous", &self.continuous)
            .finish()
    }
}

impl RateFunctionV {
    /// Arbitrary `v` with author-declared flags.
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        monotone_nonincreasing: bool,
        continuous: bool,
    ) -> Self {
        RateFunctionV {
            eval: Arc::new(eval),
            monotone_nonincreasing,
            continuous,
            name: name.into(),
        }
    }

    fn regular(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(name, eval, true, true)
    }

    /// `1/x`.
    pub fn inv_x() -> Self {
        Self::regular("inv_x", |x| 1.0 / x)
    }

    /// `1/ln(x + e)`.
    pub fn inv_log() -> Self {
        Self::regular("inv_log", |x| 1.0 / (x + std::f64::consts::E).ln())
    }

    /// `1/ln(ln(x + e^e))`.
    pub fn inv_loglog() -> Self {
        let ee = std::f64::consts::E.exp();
        Self::regular("inv_loglog", move |x| 1.0 / (x + ee).ln().ln())
    }

    /// `(1 + x)^{-k}`.
    pub fn power(k: f64) -> Self {
        Self::regular(format!("power({k})"), move |x| (1.0 + x).powf(-k))
    }

    /// `(1 + x)^{-1/k}`.
    pub fn inv_root(k: f64) -> Self {
        Self::regular(format!("inv_root({k})"), move |x| (1.0 + x).powf(-1.0 / k))
    }

    /// `e^{-x}`.
    pub fn exp_decay() -> Self {
        Self::regular("exp_decay", |x| (-x).exp())
    }

    /// `e^{-e^x}`.
    pub fn double_exp_decay() -> Self {
        Self::regular("double_exp_decay", |x| (-(x.exp())).exp())
    }

    /// `v ≡ 0`, which turns `G` into the translation group itself.
    pub fn zero() -> Self {
        Self::regular("zero", |_| 0.0)
    }

    /// Linear interpolation through `(x_i, v_i)`, constant before the first
    /// abscissa and `v_last · x_last / x` after the last one.
    pub fn custom_table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Shape("rate table needs at least two points".into()));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) || !(points[0].0 > 0.0) {
            return Err(Error::Domain("rate table abscissae must be positive and increasing".into()));
        }
        if points.iter().any(|p| !(p.1 >= 0.0) || !p.1.is_finite()) {
            return Err(Error::Domain("rate table values must be finite and non-negative".into()));
        }
        let monotone = points.windows(2).all(|w| w[1].1 <= w[0].1);
        let pts = Arc::new(points);
        Ok(Self::new(
            "custom-table",
            move |x| {
                let (x0, v0) = pts[0];
                let (xn, vn) = pts[pts.len() - 1];
                if x <= x0 {
                    return v0;
                }
                if x >= xn {
                    return vn * xn / x;
                }
                let i = pts.partition_point(|p| p.0 <= x);
                let (xa, va) = pts[i - 1];
                let (xb, vb) = pts[i];
                va + (vb - va) * (x - xa) / (xb - xa)
            },
            monotone,
            true,
        ))
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn monotone_nonincreasing(&self) -> bool {
        self.monotone_nonincreasing
    }

    pub fn continuous(&self) -> bool {
        self.continuous
    }

    /// Lattice spot check of the declared properties.
    pub fn spot_check(&self) -> RateCheck {
        let lattice: Vec<f64> = (-60..=80).map(|i| 10f64.powf(i as f64 / 10.0)).collect();
        let values: Vec<f64> = lattice.iter().map(|&x| self.eval(x)).collect();
        let nonnegative = values.iter().all(|v| *v >= 0.0 && v.is_finite());
        let monotone = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-300);
        let decades: Vec<f64> = (0..=15).map(|k| self.eval(10f64.powi(20 * k))).collect();
        let vanishing =
            decades.windows(2).all(|w| w[1] <= w[0]) && decades[15] < VANISHING_TOL;
        RateCheck {
            nonnegative,
            monotone: !self.monotone_nonincreasing || monotone,
            vanishing,
        }
    }
}

/// Threshold for `v(10^300)`; loose enough for `1/ln(ln(x + e^e))`.
pub const VANISHING_TOL: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RateCheck {
    pub nonnegative: bool,
    /// True when the monotone flag is unset or the lattice agrees with it.
    pub monotone: bool,
    /// `v(10^{20k})` decreasing for `k = 0..15` and below 0.25 at `10^300`.
    pub vanishing: bool,
}

impl RateCheck {
    pub fn passed(&self) -> bool {
        self.nonnegative && self.monotone && self.vanishing
    }
}

/// JSON form `{name, params}` of a [`RateFunctionV`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case")]
pub enum RateSpec {
    InvX,
    InvLog,
    InvLoglog,
    Power { k: f64 },
    InvRoot { k: f64 },
    ExpDecay,
    DoubleExpDecay,
    Zero,
    #[serde(rename = "custom-table")]
    CustomTable { points: Vec<(f64, f64)> },
}

impl RateSpec {
    pub fn build(&self) -> Result<RateFunctionV> {
        Ok(match self {
            RateSpec::InvX => RateFunctionV::inv_x(),
            RateSpec::InvLog => RateFunctionV::inv_log(),
            RateSpec::InvLoglog => RateFunctionV::inv_loglog(),
            RateSpec::Power { k } => RateFunctionV::power(*k),
            RateSpec::InvRoot { k } => RateFunctionV::inv_root(*k),
            RateSpec::ExpDecay => RateFunctionV::exp_decay(),
            RateSpec::DoubleExpDecay => RateFunctionV::double_exp_decay(),
            RateSpec::Zero => RateFunctionV::zero(),
            RateSpec::CustomTable { points } => RateFunctionV::custom_table(points.clone())?,
        })
    }
}

/// `Q(t)f = f(· + t)`.
pub fn apply_translation(f: &Function1D, t: f64) -> Function1D {
    f.shifted(t)
}

/// Total shift of `G(t)`: `t + t·v(1/t)`, and 0 at `t = 0`.
pub fn g_shift(t: f64, v: &RateFunctionV) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t + t * v.eval(1.0 / t)
    }
}

/// Total shift of `G(t/n)^n`: `t + t·v(n/t)`.
pub fn iterated_shift(t: f64, n: usize, v: &RateFunctionV) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t + t * v.eval(n as f64 / t)
    }
}

/// `G(t)f`.
pub fn apply_g(f: &Function1D, t: f64, v: &RateFunctionV) -> Result<Function1D> {
    if !(t >= 0.0) {
        return Err(precondition(format!("G(t) needs t >= 0, got {t}")));
    }
    Ok(f.shifted(g_shift(t, v)))
}

/// `G(t/n)^n f` as a single shift.
pub fn iterate_g(f: &Function1D, t: f64, n: usize, v: &RateFunctionV) -> Result<Function1D> {
    if !(t > 0.0) || n == 0 {
        return Err(precondition(format!("iterate_g needs t > 0 and n >= 1, got t = {t}, n = {n}")));
    }
    Ok(f.shifted(iterated_shift(t, n, v)))
}

/// `G(t/n)^n f` by `n` actual applications of `G(t/n)`.
pub fn iterate_g_composed(f: &Function1D, t: f64, n: usize, v: &RateFunctionV) -> Result<Function1D> {
    if !(t > 0.0) || n == 0 {
        return Err(precondition(format!("iterate_g needs t > 0 and n >= 1, got t = {t}, n = {n}")));
    }
    let mut g = f.clone();
    for _ in 0..n {
        g = apply_g(&g, t / n as f64, v)?;
    }
    Ok(g)
}

/// Largest pointwise gap between the closed-form and composed iterates on `lattice`.
pub fn composition_discrepancy(
    f: &Function1D,
    t: f64,
    n: usize,
    v: &RateFunctionV,
    lattice: &[f64],
) -> Result<f64> {
    let closed = iterate_g(f, t, n, v)?;
    let composed = iterate_g_composed(f, t, n, v)?;
    Ok(lattice
        .iter()
        .map(|&x| (closed.eval(x) - composed.eval(x)).abs())
        .fold(0.0, f64::max))
}

pub const DEFAULT_T_LATTICE: usize = 512;

#[derive(Debug, Clone)]
pub struct TranslationExperiment {
    pub f: Function1D,
    pub v: RateFunctionV,
    pub t_max: f64,
    pub n_values: Vec<usize>,
    pub t_lattice_points: usize,
    /// Where `f` is non-constant. Defaults to the function's own active interval.
    pub window: Option<Interval>,
    /// Tolerance handed to the sup-norm refinement.
    pub sup_tol: f64,
}

impl TranslationExperiment {
    pub fn new(f: Function1D, v: RateFunctionV, t_max: f64, n_values: Vec<usize>) -> Self {
        TranslationExperiment {
            f,
            v,
            t_max,
            n_values,
            t_lattice_points: DEFAULT_T_LATTICE,
            window: None,
            sup_tol: 1e-12,
        }
    }

    pub fn with_window(mut self, window: Interval) -> Self {
        self.window = Some(window);
        self
    }

    pub fn with_t_lattice(mut self, points: usize) -> Self {
        self.t_lattice_points = points;
        self
    }

    fn active_window(&self) -> Result<Interval> {
        self.window.or_else(|| self.f.active_interval()).ok_or_else(|| {
            precondition(format!(
                "{} is not known to be constant outside a compact set; supply a window",
                self.f.label()
            ))
        })
    }
}

/// Hybrid lattice on `(0, t_max]`: a geometric quarter from `t_max·1e-6`
/// up to the first uniform point, then `k·t_max/m`, ending at `t_max`.
pub fn hybrid_t_lattice(t_max: f64, points: usize) -> Vec<f64> {
    let points = points.max(4);
    let geometric = points / 4;
    let uniform = points - geometric;
    let first_uniform = t_max / uniform as f64;
    let lo = (t_max * 1e-6).min(first_uniform);
    let ratio = (first_uniform / lo).powf(1.0 / geometric as f64);
    let mut ts: Vec<f64> = (0..geometric).map(|i| lo * ratio.powi(i as i32)).collect();
    ts.extend((1..=uniform).map(|k| t_max * k as f64 / uniform as f64));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// Measured `sup_t ‖G(t/n)^n f − e^{tL}f‖` against `ω_f(T·v(n/T))`.
pub fn exact_error_law(exp: &TranslationExperiment) -> Result<ConvergenceReport> {
    exact_error_law_with(exp, Execution::default())
}

pub fn exact_error_law_with(exp: &TranslationExperiment, exec: Execution) -> Result<ConvergenceReport> {
    if !exp.v.monotone_nonincreasing() || !exp.v.continuous() {
        return Err(precondition(format!(
            "the exact law needs a continuous non-increasing v; {} is flagged otherwise",
            exp.v.name()
        )));
    }
    if !(exp.t_max > 0.0) {
        return Err(precondition("T must be positive"));
    }
    if exp.n_values.is_empty() || exp.n_values.contains(&0) {
        return Err(precondition("n values must be positive"));
    }
    if exp.n_values.windows(2).any(|w| w[1] < w[0]) {
        return Err(precondition("n values must be sorted ascending"));
    }
    let window = exp.active_window()?;
    let ts = hybrid_t_lattice(exp.t_max, exp.t_lattice_points);
    let modulus_domain = window.widened(1.0);
    // slope of f, used to turn shift gaps into a resolution bound
    let fine = modulus_domain.len() / (1 << 14) as f64;
    let slope = lattice_modulus(&exp.f, fine, modulus_domain, fine, fine)? / fine;
    let piecewise_linear = exp.f.kind() == FunctionKind::PiecewiseLinear;
    let rows = try_map_range(exp.n_values.len(), exec, |i| {
        let n = exp.n_values[i];
        let predicted = modulus_of_continuity(
            &exp.f,
            exp.t_max * exp.v.eval(n as f64 / exp.t_max),
            modulus_domain,
        )?;
        let mut measured = 0.0f64;
        let mut previous_gap = 0.0f64;
        let mut resolution = 0.0f64;
        for &t in &ts {
            let exact = exp.f.shifted(t);
            let approx = iterate_g(&exp.f, t, n, &exp.v)?;
            let s = iterated_shift(t, n, &exp.v);
            let xs = Interval::new(window.lo - s - 1.0, window.hi - t + 1.0)?;
            let mut kinks = exact.breakpoints();
            kinks.extend(approx.breakpoints());
            let diff = |x: f64| approx.eval(x) - exact.eval(x);
            let value = if piecewise_linear {
                // the difference is linear between kinks
                kinks
                    .iter()
                    .copied()
                    .filter(|x| xs.contains(*x))
                    .chain([xs.lo, xs.hi])
                    .map(|x| diff(x).abs())
                    .fold(0.0, f64::max)
            } else {
                sup_abs(diff, xs, &kinks, exp.sup_tol)?.value
            };
            measured = measured.max(value);
            let gap = s - t;
            resolution = resolution.max(slope * (gap - previous_gap).abs());
            previous_gap = gap;
        }
        Ok::<_, Error>(
            ConvergenceRow::new(n, measured)
                .with_reference(predicted)
                .with_noise(resolution),
        )
    })?;
    Ok(ConvergenceReport::new(
        format!("translation/{}/{}", exp.f.label(), exp.v.name()),
        rows,
        0.0,
    ))
}

/// The piecewise-linear `f_n` (0 on `x <= 0`, `(n/t²)x` up to `t²/n`, then 1)
/// and the witness `x_t = −t` where `e^{tL}f_n` and `G(t/n)^n f_n` (with
/// `v(x) = 1/x`) differ by 1.
pub fn counterexample_family(t: f64, n: usize) -> Result<(Function1D, f64)> {
    if !(t > 0.0) || n == 0 {
        return Err(precondition(format!("needs t > 0 and n >= 1, got t = {t}, n = {n}")));
    }
    let knee = t * t / n as f64;
    let f = Function1D::piecewise_linear(vec![(0.0, 0.0), (knee, 1.0)])?
        .with_label(format!("f_n(t={t}, n={n})"));
    Ok((f, -t))
}

/// `|(e^{tL}f_n)(x_t) − (G(t/n)^n f_n)(x_t)|` and `‖f_n‖`.
pub fn counterexample_gap(t: f64, n: usize) -> Result<(f64, f64)> {
    let (f, x) = counterexample_family(t, n)?;
    let v = RateFunctionV::inv_x();
    let exact = apply_translation(&f, t).eval(x);
    let approx = iterate_g(&f, t, n, &v)?.eval(x);
    let norm = sup_abs(
        |y| f.eval(y),
        Interval::new(-2.0 * t - 1.0, 2.0 * t + 1.0)?,
        &f.breakpoints(),
        1e-12,
    )?
    .value;
    Ok(((exact - approx).abs(), norm))
}
