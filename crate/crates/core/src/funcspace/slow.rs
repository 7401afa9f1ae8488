//! An odd C^∞ function equal to `x` on `[0, 1]` and to `2` on `[3, ∞)`,
//! with `0 <= f' <= 1` in between.

use std::sync::{Arc, OnceLock};

use crate::jet::{Jet, Real};
use crate::quadrature::GaussLegendre;

use super::function::{Function1D, JetFunction, SMOOTH};

/// `f = 1 + 2 ∫_0^{(x-1)/2} (1 - σ(s)) ds` on `[1, 3]`, where `σ` is the
/// standard smooth step built from `e^{-1/s}`.
pub fn smooth_slow_vector() -> Function1D {
    Function1D::custom(Arc::new(SlowVector), "smooth_slow")
        .with_bound(2.0)
        .with_active_interval(-3.0, 3.0)
}

struct SlowVector;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

fn phi<S: Real>(s: &S) -> S {
    if s.value() <= 0.0 {
        s.lift(0.0)
    } else {
        (-(s.recip())).exp()
    }
}

/// Smooth step: 0 for `s <= 0`, 1 for `s >= 1`.
fn sigma<S: Real>(s: &S) -> S {
    let v = s.value();
    if v <= 0.0 {
        return s.lift(0.0);
    }
    if v >= 1.0 {
        return s.lift(1.0);
    }
    let a = phi(s);
    let b = phi(&(-(s.clone()) + 1.0));
    a.clone() / (a + b)
}

/// Value on `x >= 0`.
fn positive_branch(x: f64) -> f64 {
    if x <= 1.0 {
        return x;
    }
    if x >= 3.0 {
        return 2.0;
    }
    let u = 0.5 * (x - 1.0);
    1.0 + 2.0 * rule().integrate_composite(0.0, u, 4, |s| 1.0 - sigma(&s))
}

impl JetFunction for SlowVector {
    fn value(&self, x: f64) -> f64 {
        x.signum() * positive_branch(x.abs())
    }

    fn jet(&self, x: f64, order: usize) -> Option<Jet> {
        let value = self.value(x);
        if order == 0 {
            return Some(Jet::constant(value, 0));
        }
        // f' = 1 - σ((|x| - 1)/2) is even; integrate its jet once.
        let y = Jet::variable(x, order - 1);
        let ax = if x < 0.0 { -y } else { y };
        let slope = -sigma(&((ax - 1.0) * 0.5)) + 1.0;
        let mut c = Vec::with_capacity(order + 1);
        c.push(value);
        c.extend(
            slope
                .coefficients()
                .iter()
                .enumerate()
                .map(|(k, g)| g / (k + 1) as f64),
        );
        Some(Jet::from_coefficients(c))
    }

    fn derivative_order(&self) -> usize {
        SMOOTH
    }
}
