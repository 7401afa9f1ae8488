use serde::{Deserialize, Serialize};

use crate::jet::Real;

/// Closed-form smooth functions, evaluable on `f64` and on jets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Profile {
    Constant {
        value: f64,
    },
    /// Ascending coefficients `c0 + c1 x + c2 x^2 + ...`.
    Poly {
        coeffs: Vec<f64>,
    },
    /// `amplitude * exp(-((x - center) / width)^2)`.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// `amplitude * sin(frequency * x + phase)`.
    Sine {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// `amplitude / (1 + ((x - center) / width)^2)`.
    Lorentzian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    Sum {
        terms: Vec<Profile>,
    },
    Product {
        factors: Vec<Profile>,
    },
    /// `offset + scale * inner`.
    Affine {
        offset: f64,
        scale: f64,
        inner: Box<Profile>,
    },
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Profile::Constant { value }
    }

    pub fn gaussian(amplitude: f64, center: f64, width: f64) -> Self {
        Profile::Gaussian {
            amplitude,
            center,
            width,
        }
    }

    pub fn sine(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Profile::Sine {
            amplitude,
            frequency,
            phase,
        }
    }

    pub fn lorentzian(amplitude: f64, center: f64, width: f64) -> Self {
        Profile::Lorentzian {
            amplitude,
            center,
            width,
        }
    }

    pub fn affine(offset: f64, scale: f64, inner: Profile) -> Self {
        Profile::Affine {
            offset,
            scale,
            inner: Box::new(inner),
        }
    }

    pub fn product(factors: Vec<Profile>) -> Self {
        Profile::Product { factors }
    }

    pub fn sum(terms: Vec<Profile>) -> Self {
        Profile::Sum { terms }
    }

    pub fn eval<S: Real>(&self, x: &S) -> S {
        match self {
            Profile::Constant { value } => x.lift(*value),
            Profile::Poly { coeffs } => {
                let mut acc = x.lift(0.0);
                for c in coeffs.iter().rev() {
                    acc = acc * x.clone() + *c;
                }
                acc
            }
            Profile::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let u = (x.clone() - *center) / *width;
                (-(u.clone() * u)).exp() * *amplitude
            }
            Profile::Sine {
                amplitude,
                frequency,
                phase,
            } => (x.clone() * *frequency + *phase).sin() * *amplitude,
            Profile::Lorentzian {
                amplitude,
                center,
                width,
            } => {
                let u = (x.clone() - *center) / *width;
                (u.clone() * u + 1.0).recip() * *amplitude
            }
            Profile::Sum { terms } => terms
                .iter()
                .fold(x.lift(0.0), |acc, t| acc + t.eval(x)),
            Profile::Product { factors } => factors
                .iter()
                .fold(x.lift(1.0), |acc, t| acc * t.eval(x)),
            Profile::Affine {
                offset,
                scale,
                inner,
            } => inner.eval(x) * *scale + *offset,
        }
    }

    /// Interval outside which the profile is constant to within 1e-30
    /// relative, when such an interval exists.
    pub fn active_interval(&self) -> Option<(f64, f64)> {
        match self {
            Profile::Constant { .. } => Some((0.0, 0.0)),
            Profile::Gaussian { center, width, .. } => {
                let r = 8.5 * width.abs();
                Some((center - r, center + r))
            }
            Profile::Affine { inner, .. } => inner.active_interval(),
            Profile::Sum { terms } => union(terms.iter().map(Profile::active_interval)),
            Profile::Product { factors } => {
                // a product vanishes wherever a compactly-active factor
                // decays to zero; constants elsewhere keep it constant
                let decaying: Vec<_> = factors
                    .iter()
                    .filter(|f| matches!(f, Profile::Gaussian { .. }))
                    .filter_map(Profile::active_interval)
                    .collect();
                if let Some(first) = decaying.first() {
                    Some(decaying.iter().skip(1).fold(*first, |acc, iv| {
                        (acc.0.max(iv.0), acc.1.min(iv.1))
                    }))
                } else {
                    union(factors.iter().map(Profile::active_interval))
                }
            }
            _ => None,
        }
    }
}

fn union(it: impl Iterator<Item = Option<(f64, f64)>>) -> Option<(f64, f64)> {
    let mut out: Option<(f64, f64)> = None;
    for iv in it {
        let iv = iv?;
        out = Some(match out {
            None => iv,
            Some(o) => (o.0.min(iv.0), o.1.max(iv.1)),
        });
    }
    out
}
