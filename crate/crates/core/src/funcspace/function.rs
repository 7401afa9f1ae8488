use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::jet::Jet;

use super::{Interval, Profile};

/// Marks functions differentiable to every order.
pub const SMOOTH: usize = usize::MAX;

/// Representation tag of a [`Function1D`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    ClosedForm,
    PiecewiseLinear,
    SampledGrid,
}

/// User-supplied closed-form function with optional Taylor jets.
pub trait JetFunction: Send + Sync {
    fn value(&self, x: f64) -> f64;

    /// Taylor jet of the given order at `x`, or `None` past the available order.
    fn jet(&self, x: f64, order: usize) -> Option<Jet> {
        (order == 0).then(|| Jet::constant(self.value(x), 0))
    }

    fn derivative_order(&self) -> usize {
        0
    }
}

struct ScalarFn<F>(F);

impl<F: Fn(f64) -> f64 + Send + Sync> JetFunction for ScalarFn<F> {
    fn value(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

pub type ModulusFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Smooth(Profile),
    PiecewiseLinear(Arc<Vec<(f64, f64)>>),
    Sampled(Arc<GridFunction>),
    Custom(Arc<dyn JetFunction>),
}

/// A real function on ℝ: `x ↦ inner(x + shift)`.
#[derive(Clone)]
pub struct Function1D {
    repr: Repr,
    shift: f64,
    derivative_order: usize,
    analytic_modulus: Option<ModulusFn>,
    bound: Option<f64>,
    /// Outside this interval (in unshifted coordinates) the function is constant.
    active: Option<Interval>,
    label: String,
}

impl fmt::Debug for Function1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Function1D")
            .field("label", &self.label)
            .field("kind", &self.kind())
            .field("shift", &self.shift)
            .field("derivative_order", &self.derivative_order)
            .field("bound", &self.bound)
            .field("has_modulus", &self.analytic_modulus.is_some())
            .finish()
    }
}

impl Function1D {
    pub fn smooth(profile: Profile) -> Self {
        let active = profile
            .active_interval()
            .map(|(lo, hi)| Interval { lo, hi });
        Function1D {
            label: format!("{profile:?}"),
            repr: Repr::Smooth(profile),
            shift: 0.0,
            derivative_order: SMOOTH,
            analytic_modulus: None,
            bound: None,
            active,
        }
    }

    /// Linear interpolation through `points`, constant beyond the first and
    /// last abscissa. Abscissae must be strictly increasing.
    pub fn piecewise_linear(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Shape("piecewise-linear function needs a point".into()));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Domain("breakpoints must be strictly increasing".into()));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Domain("breakpoints must be finite".into()));
        }
        let bound = points.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
        let active = Interval {
            lo: points[0].0,
            hi: points[points.len() - 1].0,
        };
        Ok(Function1D {
            repr: Repr::PiecewiseLinear(Arc::new(points)),
            shift: 0.0,
            derivative_order: 0,
            analytic_modulus: None,
            bound: Some(bound),
            active: Some(active),
            label: "piecewise_linear".into(),
        })
    }

    /// `max(0, min(x, 1))`, with `ω(x) = min(x, 1)`.
    pub fn ramp() -> Self {
        Self::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0)])
            .expect("static breakpoints")
            .with_modulus(Arc::new(|x: f64| x.clamp(0.0, 1.0)))
            .with_label("ramp")
    }

    pub fn sampled(grid: GridFunction) -> Self {
        let active = Interval {
            lo: grid.x_lo(),
            hi: grid.x_hi(),
        };
        Function1D {
            bound: Some(grid.max_abs()),
            repr: Repr::Sampled(Arc::new(grid)),
            shift: 0.0,
            derivative_order: 0,
            analytic_modulus: None,
            active: Some(active),
            label: "sampled_grid".into(),
        }
    }

    pub fn custom(inner: Arc<dyn JetFunction>, label: impl Into<String>) -> Self {
        Function1D {
            derivative_order: inner.derivative_order(),
            repr: Repr::Custom(inner),
            shift: 0.0,
            analytic_modulus: None,
            bound: None,
            active: None,
            label: label.into(),
        }
    }

    /// Closed-form function without derivative information.
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static, label: impl Into<String>) -> Self {
        Self::custom(Arc::new(ScalarFn(f)), label)
    }

    pub fn with_modulus(mut self, modulus: ModulusFn) -> Self {
        self.analytic_modulus = Some(modulus);
        self
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }

    /// Declares the function constant outside `[lo, hi]` (current coordinates).
    pub fn with_active_interval(mut self, lo: f64, hi: f64) -> Self {
        self.active = Some(Interval {
            lo: lo + self.shift,
            hi: hi + self.shift,
        });
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> FunctionKind {
        match self.repr {
            Repr::Smooth(_) | Repr::Custom(_) => FunctionKind::ClosedForm,
            Repr::PiecewiseLinear(_) => FunctionKind::PiecewiseLinear,
            Repr::Sampled(_) => FunctionKind::SampledGrid,
        }
    }

    /// Highest derivative order available ([`SMOOTH`] for unlimited).
    pub fn derivative_order(&self) -> usize {
        self.derivative_order
    }

    pub fn analytic_modulus(&self) -> Option<&ModulusFn> {
        self.analytic_modulus.as_ref()
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    pub fn profile(&self) -> Option<&Profile> {
        match &self.repr {
            Repr::Smooth(p) if self.shift == 0.0 => Some(p),
            _ => None,
        }
    }

    /// Interval outside which the function is constant, if known.
    pub fn active_interval(&self) -> Option<Interval> {
        self.active.map(|iv| Interval {
            lo: iv.lo - self.shift,
            hi: iv.hi - self.shift,
        })
    }

    /// Points where the function fails to be smooth (piecewise-linear kinks).
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.repr {
            Repr::PiecewiseLinear(pts) => pts.iter().map(|p| p.0 - self.shift).collect(),
            _ => Vec::new(),
        }
    }

    /// `x ↦ f(x + t)`.
    pub fn shifted(&self, t: f64) -> Self {
        let mut g = self.clone();
        g.shift += t;
        g
    }

    pub fn eval(&self, x: f64) -> f64 {
        let y = x + self.shift;
        match &self.repr {
            Repr::Smooth(p) => p.eval(&y),
            Repr::PiecewiseLinear(pts) => eval_piecewise_linear(pts, y),
            Repr::Sampled(g) => g.eval(y),
            Repr::Custom(c) => c.value(y),
        }
    }

    /// Evaluation that rejects non-finite values.
    pub fn try_eval(&self, x: f64) -> Result<f64> {
        let v = self.eval(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { x })
        }
    }

    /// Taylor jet of the given order at `x`.
    pub fn jet_at(&self, x: f64, order: usize) -> Result<Jet> {
        if order > self.derivative_order {
            return Err(Error::Capability(format!(
                "{}: derivative of order {order} requested, only {} available",
                self.label, self.derivative_order
            )));
        }
        let y = x + self.shift;
        let jet = match &self.repr {
            Repr::Smooth(p) => Some(p.eval(&Jet::variable(y, order))),
            Repr::Custom(c) => c.jet(y, order),
            _ => Some(Jet::constant(self.eval(x), 0)),
        };
        let jet = jet.ok_or_else(|| {
            Error::Capability(format!(
                "{}: no jet of order {order} at x = {x}",
                self.label
            ))
        })?;
        if jet.coefficients().iter().any(|c| !c.is_finite()) {
            return Err(Error::Evaluation { x });
        }
        Ok(jet)
    }

    /// `f^{(k)}(x)`.
    pub fn derivative(&self, x: f64, k: usize) -> Result<f64> {
        Ok(self.jet_at(x, k)?.derivative(k))
    }
}

fn eval_piecewise_linear(pts: &[(f64, f64)], x: f64) -> f64 {
    let (x0, y0) = pts[0];
    let (xn, yn) = pts[pts.len() - 1];
    if x <= x0 {
        return y0;
    }
    if x >= xn {
        return yn;
    }
    let i = pts.partition_point(|p| p.0 <= x);
    let (xa, ya) = pts[i - 1];
    let (xb, yb) = pts[i];
    ya + (yb - ya) * (x - xa) / (xb - xa)
}
