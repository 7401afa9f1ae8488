//! `A^q v = a^q v^{(2q)} + Σ_{i<2q} p_i v^{(i)}` with the `p_i` kept as
//! integer polynomials in `a, b, c` and their derivatives.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::funcspace::Function1D;

use super::coefficients::{window_sups, ParabolicCoefficients, WINDOW_SUP_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coefficient {
    A,
    B,
    C,
}

impl Coefficient {
    fn index(self) -> usize {
        self as usize
    }

    fn symbol(self) -> char {
        match self {
            Coefficient::A => 'a',
            Coefficient::B => 'b',
            Coefficient::C => 'c',
        }
    }
}

/// Factor `coefficient^{(order)}`.
pub type Factor = (Coefficient, usize);

/// Integer combination of monomials in the coefficient derivatives.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoefficientPolynomial {
    terms: BTreeMap<Vec<Factor>, i64>,
}

impl CoefficientPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, vec![])
    }

    pub fn factor(c: Coefficient, order: usize) -> Self {
        Self::monomial(1, vec![(c, order)])
    }

    /// `k · Π factors`.
    pub fn monomial(k: i64, mut factors: Vec<Factor>) -> Self {
        factors.sort();
        let mut p = Self::zero();
        if k != 0 {
            p.terms.insert(factors, k);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Factor], i64)> {
        self.terms.iter().map(|(f, k)| (f.as_slice(), *k))
    }

    fn add_term(&mut self, factors: Vec<Factor>, k: i64) {
        let entry = self.terms.entry(factors).or_insert(0);
        *entry += k;
        if *entry == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (f, k) in &other.terms {
            out.add_term(f.clone(), *k);
        }
        out
    }

    pub fn scale(&self, s: i64) -> Self {
        let mut out = Self::zero();
        for (f, k) in &self.terms {
            out.add_term(f.clone(), k * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (f1, k1) in &self.terms {
            for (f2, k2) in &other.terms {
                let mut f: Vec<Factor> = f1.iter().chain(f2).copied().collect();
                f.sort();
                out.add_term(f, k1 * k2);
            }
        }
        out
    }

    /// Product rule.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (f, k) in &self.terms {
            for i in 0..f.len() {
                let mut g = f.clone();
                g[i].1 += 1;
                g.sort();
                out.add_term(g, *k);
            }
        }
        out
    }

    /// Highest derivative order of any factor.
    pub fn max_order(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|f| f.iter().map(|x| x.1))
            .max()
            .unwrap_or(0)
    }

    /// Value given `derivs[coefficient][order]`.
    pub fn eval(&self, derivs: &[Vec<f64>; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(f, k)| *k as f64 * f.iter().map(|(c, o)| derivs[c.index()][*o]).product::<f64>())
            .sum()
    }
}

impl fmt::Display for CoefficientPolynomial {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        for (i, (factors, k)) in self.terms.iter().enumerate() {
            let sign = if *k < 0 { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                write!(out, " {sign} ")?;
            } else {
                write!(out, "{sign}")?;
            }
            let mag = k.unsigned_abs();
            if mag != 1 || factors.is_empty() {
                write!(out, "{mag}")?;
            }
            for (j, (c, o)) in factors.iter().enumerate() {
                if j > 0 || mag != 1 {
                    write!(out, "·")?;
                }
                match o {
                    0 => write!(out, "{}", c.symbol())?,
                    1..=3 => write!(out, "{}{}", c.symbol(), "'".repeat(*o))?,
                    _ => write!(out, "{}^({o})", c.symbol())?,
                }
            }
        }
        Ok(())
    }
}

/// `A^q` as `Σ_{i≤2q} P_i D^i` with `P_{2q} = a^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPowerExpansion {
    q: usize,
    polys: Vec<CoefficientPolynomial>,
}

impl OperatorPowerExpansion {
    /// Symbolic expansion, independent of concrete coefficients.
    pub fn symbolic(q: usize) -> Self {
        let a = CoefficientPolynomial::factor(Coefficient::A, 0);
        let b = CoefficientPolynomial::factor(Coefficient::B, 0);
        let c = CoefficientPolynomial::factor(Coefficient::C, 0);
        let mut polys = vec![CoefficientPolynomial::one()];
        for _ in 0..q {
            // A(P v^{(i)}) = a(P'' v^{(i)} + 2P' v^{(i+1)} + P v^{(i+2)})
            //              + b(P' v^{(i)} + P v^{(i+1)}) + c P v^{(i)}
            let mut next = vec![CoefficientPolynomial::zero(); polys.len() + 2];
            for (i, p) in polys.iter().enumerate() {
                let d1 = p.derivative();
                let d2 = d1.derivative();
                next[i] = next[i].add(&a.mul(&d2)).add(&b.mul(&d1)).add(&c.mul(p));
                next[i + 1] = next[i + 1].add(&a.mul(&d1).scale(2)).add(&b.mul(p));
                next[i + 2] = next[i + 2].add(&a.mul(p));
            }
            polys = next;
        }
        OperatorPowerExpansion { q, polys }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `p_0 .. p_{2q-1}`.
    pub fn lower(&self) -> &[CoefficientPolynomial] {
        &self.polys[..2 * self.q]
    }

    /// `a^q`.
    pub fn leading(&self) -> &CoefficientPolynomial {
        &self.polys[2 * self.q]
    }

    /// Polynomial in front of `v^{(i)}`.
    pub fn coefficient(&self, i: usize) -> Option<&CoefficientPolynomial> {
        self.polys.get(i)
    }

    /// Highest coefficient derivative the expansion uses.
    pub fn required_order(&self) -> usize {
        self.polys.iter().map(CoefficientPolynomial::max_order).max().unwrap_or(0)
    }

    /// Values of `P_0 .. P_{2q}` at `x`.
    pub fn evaluate(&self, coeffs: &ParabolicCoefficients, x: f64) -> Result<Vec<f64>> {
        let r = self.required_order();
        let jets = coeffs.jets(x, r)?;
        let derivs = [jets[0].derivatives(), jets[1].derivatives(), jets[2].derivatives()];
        Ok(self.polys.iter().map(|p| p.eval(&derivs)).collect())
    }

    /// `(A^q v)(x)` through the expansion.
    pub fn apply(&self, coeffs: &ParabolicCoefficients, v: &Function1D, x: f64) -> Result<f64> {
        let p = self.evaluate(coeffs, x)?;
        let jet = v.jet_at(x, 2 * self.q)?;
        Ok(p.iter().enumerate().map(|(i, pi)| pi * jet.derivative(i)).sum())
    }
}

/// Expansion of `A^q`, checking that the coefficients carry the derivatives
/// it needs.
pub fn expand_power(coeffs: &ParabolicCoefficients, q: usize) -> Result<OperatorPowerExpansion> {
    if q == 0 {
        return Err(crate::error::domain("q must be at least 1"));
    }
    let exp = OperatorPowerExpansion::symbolic(q);
    let need = exp.required_order();
    if need > coeffs.derivative_order() {
        let missing = exp
            .polys
            .iter()
            .flat_map(|p| p.terms().flat_map(|(f, _)| f.to_vec()).collect::<Vec<_>>())
            .find(|(_, o)| *o > coeffs.derivative_order())
            .map(|(c, o)| format!("{}^({o})", c.symbol()))
            .unwrap_or_default();
        return Err(Error::Capability(format!(
            "A^{q} needs {missing}; coefficients are declared to order {}",
            coeffs.derivative_order()
        )));
    }
    Ok(exp)
}

/// Constants of `‖A^q v‖ <= Σ_i C_i ‖v^{(i)}‖`: `C_i = ‖p_i‖`, `C_{2q} = ‖a‖^q`
/// (window sups).
pub fn power_norm_bound(coeffs: &ParabolicCoefficients, exp: &OperatorPowerExpansion) -> Result<Vec<f64>> {
    let q = exp.q();
    let mut sups = window_sups(coeffs.window(), WINDOW_SUP_TOL, |x| {
        let mut p = exp.evaluate(coeffs, x)?;
        p.truncate(2 * q);
        p.push(coeffs.a().eval(x).abs());
        Ok(p.into_iter().map(f64::abs).collect())
    })?;
    let a_norm = sups.pop().expect("pushed");
    sups.push(a_norm.powi(q as i32));
    Ok(sups)
}

/// Constants of `‖v^{(2q)}‖ <= ‖1/a^q‖ ‖A^q v‖ + Σ_i ‖p_i/a^q‖ ‖v^{(i)}‖`:
/// returns `(‖1/a^q‖, [‖p_i/a^q‖])` as window sups.
pub fn highest_derivative_bound(
    coeffs: &ParabolicCoefficients,
    exp: &OperatorPowerExpansion,
) -> Result<(f64, Vec<f64>)> {
    let q = exp.q();
    let mut sups = window_sups(coeffs.window(), WINDOW_SUP_TOL, |x| {
        let p = exp.evaluate(coeffs, x)?;
        let aq = p[2 * q];
        let mut out: Vec<f64> = p[..2 * q].iter().map(|pi| (pi / aq).abs()).collect();
        out.push((1.0 / aq).abs());
        Ok(out)
    })?;
    let inv = sups.pop().expect("pushed");
    Ok((inv, sups))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{Interval, Profile, SMOOTH};
    use crate::parabolic::coefficients::operator_powers;

    use Coefficient::{A, B, C};

    fn poly(terms: &[(i64, &[Factor])]) -> CoefficientPolynomial {
        terms
            .iter()
            .fold(CoefficientPolynomial::zero(), |acc, (k, f)| acc.add(&CoefficientPolynomial::monomial(*k, f.to_vec())))
    }

    #[test]
    fn base_case() {
        let e = OperatorPowerExpansion::symbolic(1);
        assert_eq!(e.lower()[0], CoefficientPolynomial::factor(C, 0));
        assert_eq!(e.lower()[1], CoefficientPolynomial::factor(B, 0));
        assert_eq!(*e.leading(), CoefficientPolynomial::factor(A, 0));
    }

    #[test]
    fn second_power_by_hand() {
        let e = OperatorPowerExpansion::symbolic(2);
        assert_eq!(*e.leading(), poly(&[(1, &[(A, 0), (A, 0)])]));
        assert_eq!(e.lower()[3], poly(&[(2, &[(A, 0), (A, 1)]), (2, &[(A, 0), (B, 0)])]));
        assert_eq!(
            e.lower()[2],
            poly(&[
                (1, &[(A, 0), (A, 2)]),
                (1, &[(A, 1), (B, 0)]),
                (1, &[(B, 0), (B, 0)]),
                (2, &[(A, 0), (B, 1)]),
                (2, &[(A, 0), (C, 0)]),
            ])
        );
        assert_eq!(
            e.lower()[1],
            poly(&[(1, &[(A, 0), (B, 2)]), (1, &[(B, 0), (B, 1)]), (2, &[(A, 0), (C, 1)]), (2, &[(B, 0), (C, 0)])])
        );
        assert_eq!(
            e.lower()[0],
            poly(&[(1, &[(A, 0), (C, 2)]), (1, &[(B, 0), (C, 1)]), (1, &[(C, 0), (C, 0)])])
        );
        assert_eq!(e.required_order(), 2);
        assert_eq!(e.lower()[3].to_string(), "2·a·a' + 2·a·b");
    }

    #[test]
    fn pure_laplacian_cubed_is_sixth_derivative() {
        let w = Interval::new(-3.0, 3.0).unwrap();
        let co = ParabolicCoefficients::constant(1.0, 0.0, 0.0, w).unwrap();
        let e = expand_power(&co, 3).unwrap();
        let vals = e.evaluate(&co, 0.4).unwrap();
        assert_eq!(vals, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    fn variable() -> ParabolicCoefficients {
        let a = Function1D::smooth(Profile::affine(1.0, 0.5, Profile::lorentzian(1.0, 0.0, 1.0)));
        let b = Function1D::smooth(Profile::sine(0.3, 1.0, 0.2));
        let c = Function1D::smooth(Profile::gaussian(-0.4, 0.5, 1.5));
        ParabolicCoefficients::new(a, b, c, Interval::new(-6.0, 6.0).unwrap(), SMOOTH).unwrap()
    }

    #[test]
    fn expansion_matches_repeated_application() {
        let co = variable();
        let v = Function1D::smooth(Profile::product(vec![
            Profile::gaussian(1.0, 0.3, 1.2),
            Profile::sine(1.0, 2.0, 0.0),
        ]));
        let powers = operator_powers(&co, &v, 3).unwrap();
        for q in 1..=3 {
            let e = expand_power(&co, q).unwrap();
            for i in 0..40 {
                let x = -5.0 + 10.0 * i as f64 / 39.0;
                let direct = powers[q].eval(x);
                assert!((e.apply(&co, &v, x).unwrap() - direct).abs() < 1e-8 * (1.0 + direct.abs()));
            }
        }
    }

    #[test]
    fn capability_error_names_missing_derivative() {
        let mut co = variable();
        co = ParabolicCoefficients::new(co.a().clone(), co.b().clone(), co.c().clone(), co.window(), 1).unwrap();
        let err = expand_power(&co, 2).unwrap_err();
        assert!(matches!(&err, Error::Capability(m) if m.contains("^(2)")), "{err}");
    }

    #[test]
    fn norm_bounds_hold_for_a_test_function() {
        let co = variable();
        let v = Function1D::smooth(Profile::gaussian(1.0, 0.0, 1.0));
        let w = co.window();
        for q in 1..=2 {
            let e = expand_power(&co, q).unwrap();
            let consts = power_norm_bound(&co, &e).unwrap();
            let (inv, alphas) = highest_derivative_bound(&co, &e).unwrap();
            let dn: Vec<f64> = (0..=2 * q)
                .map(|i| {
                    window_sups(w, 1e-10, |x| Ok(vec![v.derivative(x, i)?.abs()])).unwrap()[0]
                })
                .collect();
            let aq = window_sups(w, 1e-10, |x| Ok(vec![e.apply(&co, &v, x)?.abs()])).unwrap()[0];
            let rhs16: f64 = consts.iter().zip(&dn).map(|(c, d)| c * d).sum();
            assert!(aq <= rhs16 * (1.0 + 1e-9));
            let rhs17 = inv * aq + alphas.iter().zip(&dn).map(|(c, d)| c * d).sum::<f64>();
            assert!(dn[2 * q] <= rhs17 * (1.0 + 1e-9));
        }
    }
}
