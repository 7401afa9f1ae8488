use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::funcspace::{Function1D, FunctionSpec, Interval, JetFunction, SMOOTH};
use crate::grid::GridFunction;
use crate::jet::Jet;

/// `a`, `b`, `c` of `Au = a u'' + b u' + c u` on a working window.
#[derive(Debug, Clone)]
pub struct ParabolicCoefficients {
    a: Function1D,
    b: Function1D,
    c: Function1D,
    derivative_order: usize,
    window: Interval,
    a_min: f64,
    norms: [f64; 3],
}

/// Sup-norm tolerance used for coefficient quantities on the window.
pub const WINDOW_SUP_TOL: f64 = 1e-10;

impl ParabolicCoefficients {
    /// `derivative_order` is capped by what the three functions provide.
    pub fn new(a: Function1D, b: Function1D, c: Function1D, window: Interval, derivative_order: usize) -> Result<Self> {
        Interval::new(window.lo, window.hi)?;
        let derivative_order = derivative_order
            .min(a.derivative_order())
            .min(b.derivative_order())
            .min(c.derivative_order());
        let a_min = -window_sups(window, WINDOW_SUP_TOL, |x| Ok(vec![-a.try_eval(x)?]))?[0];
        if !(a_min > 0.0) {
            return Err(precondition(format!(
                "ellipticity fails: inf a = {a_min} on [{}, {}]",
                window.lo, window.hi
            )));
        }
        let norms = window_sups(window, WINDOW_SUP_TOL, |x| {
            Ok(vec![a.try_eval(x)?.abs(), b.try_eval(x)?.abs(), c.try_eval(x)?.abs()])
        })?;
        Ok(ParabolicCoefficients {
            a,
            b,
            c,
            derivative_order,
            window,
            a_min,
            norms: [norms[0], norms[1], norms[2]],
        })
    }

    /// Constant `a > 0`, `b`, `c`.
    pub fn constant(a: f64, b: f64, c: f64, window: Interval) -> Result<Self> {
        use crate::funcspace::Profile;
        Self::new(
            Function1D::smooth(Profile::constant(a)),
            Function1D::smooth(Profile::constant(b)),
            Function1D::smooth(Profile::constant(c)),
            window,
            SMOOTH,
        )
    }

    pub fn a(&self) -> &Function1D {
        &self.a
    }

    pub fn b(&self) -> &Function1D {
        &self.b
    }

    pub fn c(&self) -> &Function1D {
        &self.c
    }

    pub fn derivative_order(&self) -> usize {
        self.derivative_order
    }

    pub fn window(&self) -> Interval {
        self.window
    }

    /// `inf a` over the window.
    pub fn a_min(&self) -> f64 {
        self.a_min
    }

    /// Window sup norms `(‖a‖, ‖b‖, ‖c‖)`.
    pub fn norms(&self) -> (f64, f64, f64) {
        (self.norms[0], self.norms[1], self.norms[2])
    }

    /// `(a, b, c)` when all three are constant profiles.
    pub fn constant_values(&self) -> Option<(f64, f64, f64)> {
        use crate::funcspace::Profile;
        let get = |f: &Function1D| match f.profile() {
            Some(Profile::Constant { value }) => Some(*value),
            _ => None,
        };
        Some((get(&self.a)?, get(&self.b)?, get(&self.c)?))
    }

    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        (self.a.eval(x), self.b.eval(x), self.c.eval(x))
    }

    /// Jets of `a`, `b`, `c` at `x`.
    pub fn jets(&self, x: f64, order: usize) -> Result<[Jet; 3]> {
        Ok([self.a.jet_at(x, order)?, self.b.jet_at(x, order)?, self.c.jet_at(x, order)?])
    }

    /// Node values `(a_i, b_i, c_i)` on the grid's nodes.
    pub fn on_nodes(&self, g: &GridFunction) -> Result<Vec<(f64, f64, f64)>> {
        g.nodes()
            .map(|x| Ok((self.a.try_eval(x)?, self.b.try_eval(x)?, self.c.try_eval(x)?)))
            .collect()
    }
}

/// Window sups of several non-negative quantities at once: lattice maxima
/// refined by halving until every component moves by less than `tol`.
pub(crate) fn window_sups(
    window: Interval,
    tol: f64,
    g: impl Fn(f64) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    Ok(crate::funcspace::lattice_extrema(window, &[], tol, 2048, g)?.values)
}

/// `A v` as a closed-form function, with jets when `v` has enough derivatives.
pub fn apply_operator(coeffs: &ParabolicCoefficients, v: &Function1D) -> Result<Function1D> {
    if v.derivative_order() < 2 {
        return Err(Error::Capability(format!(
            "{}: A needs two derivatives, {} available",
            v.label(),
            v.derivative_order()
        )));
    }
    let applied = AppliedOperator {
        coeffs: coeffs.clone(),
        v: v.clone(),
    };
    let label = format!("A[{}]", v.label());
    Ok(Function1D::custom(Arc::new(applied), label))
}

struct AppliedOperator {
    coeffs: ParabolicCoefficients,
    v: Function1D,
}

impl JetFunction for AppliedOperator {
    fn value(&self, x: f64) -> f64 {
        self.jet(x, 0).map_or(f64::NAN, |j| j.value())
    }

    fn jet(&self, x: f64, order: usize) -> Option<Jet> {
        let v = self.v.jet_at(x, order + 2).ok()?;
        let d1 = v.differentiate();
        let d2 = d1.differentiate();
        let [a, b, c] = self.coeffs.jets(x, order).ok()?;
        Some(a * d2.truncate(order) + b * d1.truncate(order) + c * v.truncate(order))
    }

    fn derivative_order(&self) -> usize {
        self.v
            .derivative_order()
            .saturating_sub(2)
            .min(self.coeffs.derivative_order())
    }
}

/// `A^k v` for `k = 0..=k_max`.
pub fn operator_powers(coeffs: &ParabolicCoefficients, v: &Function1D, k_max: usize) -> Result<Vec<Function1D>> {
    let mut out = vec![v.clone()];
    for _ in 0..k_max {
        let next = apply_operator(coeffs, out.last().expect("non-empty"))?;
        out.push(next);
    }
    Ok(out)
}

/// Fourth-order first and second derivatives of grid values: central
/// stencils inside, one-sided stencils at the two nodes next to each end.
pub fn grid_derivatives(g: &GridFunction) -> Result<(Vec<f64>, Vec<f64>)> {
    let f = g.values();
    let n = f.len();
    if n < 5 {
        return Err(Error::Shape(format!("grid derivatives need 5 nodes, got {n}")));
    }
    let h = g.spacing();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 2..n - 2 {
        d1[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
        d2[i] = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / (12.0 * h * h);
    }
    const D1_0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const D1_1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    let (d2_0, d2_1): (&[f64], &[f64]) = if n >= 6 {
        (&[45.0, -154.0, 214.0, -156.0, 61.0, -10.0], &[10.0, -15.0, -4.0, 14.0, -6.0, 1.0])
    } else {
        (&[35.0, -104.0, 114.0, -56.0, 11.0], &[11.0, -20.0, 6.0, 4.0, -1.0])
    };
    let dot = |w: &[f64], vals: &mut dyn Iterator<Item = f64>| w.iter().zip(vals).map(|(a, b)| a * b).sum::<f64>();
    d1[0] = dot(&D1_0, &mut f.iter().copied()) / (12.0 * h);
    d1[1] = dot(&D1_1, &mut f.iter().copied()) / (12.0 * h);
    d1[n - 1] = -dot(&D1_0, &mut f.iter().rev().copied()) / (12.0 * h);
    d1[n - 2] = -dot(&D1_1, &mut f.iter().rev().copied()) / (12.0 * h);
    let h2 = 12.0 * h * h;
    d2[0] = dot(d2_0, &mut f.iter().copied()) / h2;
    d2[1] = dot(d2_1, &mut f.iter().copied()) / h2;
    d2[n - 1] = dot(d2_0, &mut f.iter().rev().copied()) / h2;
    d2[n - 2] = dot(d2_1, &mut f.iter().rev().copied()) / h2;
    Ok((d1, d2))
}

/// `A v` on grid nodes.
pub fn apply_operator_grid(coeffs: &ParabolicCoefficients, g: &GridFunction) -> Result<GridFunction> {
    let (d1, d2) = grid_derivatives(g)?;
    let abc = coeffs.on_nodes(g)?;
    let values = abc
        .iter()
        .zip(g.values())
        .enumerate()
        .map(|(i, ((a, b, c), v))| a * d2[i] + b * d1[i] + c * v)
        .collect();
    g.with_values(values)
}

/// JSON form `{a, b, c, derivative_order}` with `{kind, params}` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    pub a: FunctionSpec,
    pub b: FunctionSpec,
    pub c: FunctionSpec,
    #[serde(default = "default_order")]
    pub derivative_order: usize,
}

fn default_order() -> usize {
    8
}

impl CoefficientSpec {
    pub fn build(&self, window: Interval) -> Result<ParabolicCoefficients> {
        ParabolicCoefficients::new(
            self.a.build()?,
            self.b.build()?,
            self.c.build()?,
            window,
            self.derivative_order,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::Profile;

    fn window() -> Interval {
        Interval::new(-5.0, 5.0).unwrap()
    }

    #[test]
    fn laplacian_of_square_is_two() {
        let co = ParabolicCoefficients::constant(1.0, 0.0, 0.0, window()).unwrap();
        let v = Function1D::smooth(Profile::Poly { coeffs: vec![0.0, 0.0, 1.0] });
        let av = apply_operator(&co, &v).unwrap();
        for x in [-3.0, 0.0, 1.7] {
            assert!((av.eval(x) - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_input_gives_c_times_constant() {
        let c = Function1D::smooth(Profile::sine(0.5, 1.0, 0.0));
        let b = Function1D::smooth(Profile::gaussian(3.0, 0.0, 1.0));
        let a = Function1D::smooth(Profile::constant(1.0));
        let co = ParabolicCoefficients::new(a, b, c.clone(), window(), SMOOTH).unwrap();
        let av = apply_operator(&co, &Function1D::smooth(Profile::constant(2.0))).unwrap();
        for x in [-2.0, 0.3, 4.0] {
            assert!((av.eval(x) - 2.0 * c.eval(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn variable_diffusion_on_sine_matches_symbolic_derivative() {
        // a = 1 + x²/(1+x²) = 2 − 1/(1+x²)
        let a = Function1D::smooth(Profile::affine(2.0, -1.0, Profile::lorentzian(1.0, 0.0, 1.0)));
        let zero = Function1D::smooth(Profile::constant(0.0));
        let co = ParabolicCoefficients::new(a, zero.clone(), zero, window(), SMOOTH).unwrap();
        let av = apply_operator(&co, &Function1D::smooth(Profile::sine(1.0, 1.0, 0.0))).unwrap();
        for i in 0..50 {
            let x = -4.0 + 8.0 * i as f64 / 49.0;
            let want = -(1.0 + x * x / (1.0 + x * x)) * x.sin();
            assert!((av.eval(x) - want).abs() < 1e-8);
        }
    }

    #[test]
    fn ellipticity_is_enforced() {
        let err = ParabolicCoefficients::constant(0.0, 0.0, 0.0, window()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn stencils_are_exact_on_quartics() {
        for nodes in [5usize, 6, 9] {
            let g = GridFunction::from_fn(-1.0, 1.0, nodes - 1, |x| x.powi(4) - 2.0 * x.powi(3) + x).unwrap();
            let (d1, d2) = grid_derivatives(&g).unwrap();
            for (i, x) in g.nodes().enumerate() {
                let e1 = 4.0 * x.powi(3) - 6.0 * x * x + 1.0;
                let e2 = 12.0 * x * x - 12.0 * x;
                assert!((d1[i] - e1).abs() < 1e-10, "nodes {nodes} i {i}: {} vs {e1}", d1[i]);
                assert!((d2[i] - e2).abs() < 1e-10, "nodes {nodes} i {i}: {} vs {e2}", d2[i]);
            }
            let cubic = GridFunction::from_fn(-1.0, 1.0, nodes - 1, |x| x.powi(3) - x).unwrap();
            let (_, d2) = grid_derivatives(&cubic).unwrap();
            for (i, x) in cubic.nodes().enumerate() {
                assert!((d2[i] - 6.0 * x).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn grid_operator_close_to_closed_form() {
        let co = ParabolicCoefficients::constant(1.0, 0.5, -0.2, window()).unwrap();
        let v = Function1D::smooth(Profile::gaussian(1.0, 0.0, 1.0));
        let g = GridFunction::from_fn(-5.0, 5.0, 1000, |x| v.eval(x)).unwrap();
        let ag = apply_operator_grid(&co, &g).unwrap();
        let av = apply_operator(&co, &v).unwrap();
        for (i, x) in ag.nodes().enumerate() {
            assert!((ag.values()[i] - av.eval(x)).abs() < 1e-6);
        }
    }
}
