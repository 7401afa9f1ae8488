//! Truncated Taylor series ("jets") for forward-mode derivatives of any order.
//!
//! A jet of order `r` at `x0` stores `c[k] = f^(k)(x0) / k!` for `k <= r`.
//! Smooth test functions and coefficients are written once, generically over
//! [`Real`], and evaluated either on `f64` or on `Jet`.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Truncated Taylor expansion in the perturbation `ε` around a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    /// The identity function `x0 + ε`, truncated at `order`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = value;
        Jet { c }
    }

    pub fn from_coefficients(c: Vec<f64>) -> Self {
        assert!(!c.is_empty(), "jet needs at least one coefficient");
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// `f^(k)(x0)`.
    pub fn derivative(&self, k: usize) -> f64 {
        self.c.get(k).map_or(0.0, |ck| ck * factorial(k))
    }

    /// All derivatives `f(x0), f'(x0), ..., f^(r)(x0)`.
    pub fn derivatives(&self) -> Vec<f64> {
        (0..self.c.len()).map(|k| self.derivative(k)).collect()
    }

    /// Jet of `f'`; the order drops by one.
    pub fn differentiate(&self) -> Jet {
        if self.c.len() == 1 {
            return Jet { c: vec![0.0] };
        }
        let c = (1..self.c.len())
            .map(|k| k as f64 * self.c[k])
            .collect();
        Jet { c }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let len = (order + 1).min(self.c.len());
        Jet {
            c: self.c[..len].to_vec(),
        }
    }

    fn paired_len(&self, other: &Jet) -> usize {
        self.c.len().min(other.c.len())
    }

    pub fn recip(&self) -> Jet {
        Jet::constant(1.0, self.order()) / self.clone()
    }

    pub fn exp(&self) -> Jet {
        let n = self.c.len();
        let mut e = vec![0.0; n];
        e[0] = self.c[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.c[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet { c: e }
    }

    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.c.len();
        let mut s = vec![0.0; n];
        let mut co = vec![0.0; n];
        s[0] = self.c[0].sin();
        co[0] = self.c[0].cos();
        for k in 1..n {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                let w = j as f64 * self.c[j];
                ss += w * co[k - j];
                cc -= w * s[k - j];
            }
            s[k] = ss / k as f64;
            co[k] = cc / k as f64;
        }
        (Jet { c: s }, Jet { c: co })
    }

    pub fn ln(&self) -> Jet {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut l = vec![0.0; n];
        l[0] = a0.ln();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| j as f64 * l[j] * self.c[k - j]).sum();
            l[k] = (self.c[k] - s / k as f64) / a0;
        }
        Jet { c: l }
    }

    pub fn sqrt(&self) -> Jet {
        let n = self.c.len();
        let mut r = vec![0.0; n];
        r[0] = self.c[0].sqrt();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| r[j] * r[k - j]).sum();
            r[k] = (self.c[k] - s) / (2.0 * r[0]);
        }
        Jet { c: r }
    }

    pub fn powi(&self, n: i32) -> Jet {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Jet::constant(1.0, self.order());
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let n = self.paired_len(&rhs);
        Jet {
            c: (0..n).map(|k| self.c[k] + rhs.c[k]).collect(),
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let n = self.paired_len(&rhs);
        Jet {
            c: (0..n).map(|k| self.c[k] - rhs.c[k]).collect(),
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let n = self.paired_len(&rhs);
        let c = (0..n)
            .map(|k| (0..=k).map(|j| self.c[j] * rhs.c[k - j]).sum())
            .collect();
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let n = self.paired_len(&rhs);
        let b0 = rhs.c[0];
        let mut q = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (1..=k).map(|j| rhs.c[j] * q[k - j]).sum();
            q[k] = (self.c[k] - s) / b0;
        }
        Jet { c: q }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            c: self.c.into_iter().map(|v| -v).collect(),
        }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        self.c.iter_mut().for_each(|v| *v *= rhs);
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(mut self, rhs: f64) -> Jet {
        self.c.iter_mut().for_each(|v| *v /= rhs);
        self
    }
}

/// Scalar type accepted by generic smooth profiles: `f64` or [`Jet`].
pub trait Real:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// A constant carrying the same truncation as `self`.
    fn lift(&self, value: f64) -> Self;
    fn exp(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
    fn recip(&self) -> Self;
    fn value(&self) -> f64;
}

impl Real for f64 {
    fn lift(&self, value: f64) -> Self {
        value
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }
    fn value(&self) -> f64 {
        *self
    }
}

impl Real for Jet {
    fn lift(&self, value: f64) -> Self {
        Jet::constant(value, self.order())
    }
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
    fn sin(&self) -> Self {
        self.sin_cos().0
    }
    fn cos(&self) -> Self {
        self.sin_cos().1
    }
    fn ln(&self) -> Self {
        Jet::ln(self)
    }
    fn sqrt(&self) -> Self {
        Jet::sqrt(self)
    }
    fn powi(&self, n: i32) -> Self {
        Jet::powi(self, n)
    }
    fn recip(&self) -> Self {
        Jet::recip(self)
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn exp_derivatives_are_all_exp() {
        let x = Jet::variable(0.3, 6);
        let e = x.exp();
        for k in 0..=6 {
            assert!(close(e.derivative(k), 0.3f64.exp(), 1e-14));
        }
    }

    #[test]
    fn sin_derivatives_cycle() {
        let x0 = 0.7;
        let s = Jet::variable(x0, 5).sin_cos().0;
        let expected = [x0.sin(), x0.cos(), -x0.sin(), -x0.cos(), x0.sin(), x0.cos()];
        for (k, e) in expected.iter().enumerate() {
            assert!(close(s.derivative(k), *e, 1e-13), "k={k}");
        }
    }

    #[test]
    fn quotient_rule_on_lorentzian() {
        // 1/(1+x^2): derivatives at 0 are 1, 0, -2, 0, 24
        let x = Jet::variable(0.0, 4);
        let l = (x.clone() * x + 1.0).recip();
        let d = l.derivatives();
        let expected = [1.0, 0.0, -2.0, 0.0, 24.0];
        for k in 0..5 {
            assert!(close(d[k], expected[k], 1e-13), "k={k}: {}", d[k]);
        }
    }

    #[test]
    fn ln_sqrt_inverse_of_exp_and_square() {
        let x = Jet::variable(1.3, 5);
        let back = x.exp().ln();
        let root = (x.clone() * x.clone()).sqrt();
        for k in 0..=5 {
            assert!(close(back.coefficients()[k], x.coefficients()[k], 1e-13));
            assert!(close(root.coefficients()[k], x.coefficients()[k], 1e-13));
        }
    }

    #[test]
    fn differentiate_shifts_coefficients() {
        // x^3 at 2: derivatives 8, 12, 12, 6
        let x = Jet::variable(2.0, 3);
        let cube = x.powi(3);
        let d = cube.differentiate();
        assert_eq!(d.order(), 2);
        assert!(close(d.derivative(0), 12.0, 1e-14));
        assert!(close(d.derivative(1), 12.0, 1e-14));
        assert!(close(d.derivative(2), 6.0, 1e-14));
    }
}
