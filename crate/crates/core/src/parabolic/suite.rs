//! Fixed families of smooth functions used by the estimate checks.

use crate::error::Result;
use crate::funcspace::{bounded_smooth_preset, Function1D, Interval, Profile, SMOOTH};

use super::coefficients::ParabolicCoefficients;

fn smooth(p: Profile, label: &str) -> Function1D {
    Function1D::smooth(p).with_label(label)
}

/// Ten functions: Gaussians, sines, Lorentzians, a sum and a product.
pub fn smoke_suite() -> Vec<Function1D> {
    vec![
        smooth(Profile::gaussian(1.0, 0.0, 1.0), "gaussian"),
        smooth(Profile::gaussian(0.7, 1.5, 0.6), "narrow gaussian"),
        smooth(Profile::gaussian(-1.3, -2.0, 2.0), "wide gaussian"),
        smooth(Profile::sine(1.0, 1.0, 0.0), "sin"),
        smooth(Profile::sine(0.5, 2.0, 0.3), "sin 2x"),
        smooth(Profile::lorentzian(1.0, 0.0, 1.0), "lorentzian"),
        smooth(Profile::lorentzian(2.0, 1.0, 0.5), "narrow lorentzian"),
        smooth(
            Profile::sum(vec![Profile::gaussian(1.0, -1.0, 1.0), Profile::lorentzian(0.5, 2.0, 1.0)]),
            "gaussian + lorentzian",
        ),
        smooth(
            Profile::product(vec![Profile::gaussian(1.0, 0.0, 2.0), Profile::sine(1.0, 1.5, 0.0)]),
            "wave packet",
        ),
        smooth(
            Profile::product(vec![Profile::lorentzian(1.0, 0.0, 1.0), Profile::sine(1.0, 0.5, 1.0)]),
            "damped wave",
        ),
    ]
}

/// The smoke suite plus ten more shapes, twenty in all.
pub fn smooth_test_functions() -> Vec<Function1D> {
    let mut out = smoke_suite();
    let extra = [
        (Profile::gaussian(2.0, 0.5, 0.4), "sharp gaussian"),
        (Profile::gaussian(1.0, 3.0, 1.0), "shifted gaussian"),
        (Profile::sine(1.0, 3.0, 0.0), "sin 3x"),
        (Profile::sine(2.0, 0.5, 1.2), "slow sine"),
        (Profile::lorentzian(-1.0, -1.0, 0.8), "negative lorentzian"),
        (Profile::affine(0.5, 1.0, Profile::gaussian(1.0, 0.0, 1.5)), "raised gaussian"),
        (
            Profile::sum(vec![Profile::sine(0.3, 2.5, 0.0), Profile::gaussian(1.0, 0.0, 1.0)]),
            "rippled gaussian",
        ),
        (
            Profile::product(vec![Profile::gaussian(1.0, 0.0, 1.0), Profile::gaussian(1.0, 1.0, 1.0)]),
            "gaussian product",
        ),
        (
            Profile::product(vec![Profile::lorentzian(1.0, 0.0, 2.0), Profile::lorentzian(1.0, 1.0, 2.0)]),
            "lorentzian product",
        ),
        (
            Profile::sum(vec![Profile::gaussian(1.0, -2.0, 0.7), Profile::gaussian(-1.0, 2.0, 0.7)]),
            "dipole",
        ),
    ];
    out.extend(extra.into_iter().map(|(p, l)| smooth(p, l)));
    out
}

/// Variable coefficients built from the bounded smooth presets:
/// `a = 1 + ½/(1+x²)`, `b = ½e^{−x²}`, `c = −½ + ¼ sin x`.
pub fn variable_test_coefficients(window: Interval) -> Result<ParabolicCoefficients> {
    let f = |name| Ok::<_, crate::Error>(Function1D::smooth(bounded_smooth_preset(name)?));
    ParabolicCoefficients::new(
        f("mild_diffusion")?,
        f("bump_drift")?,
        f("soft_reaction")?,
        window,
        SMOOTH,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(smoke_suite().len(), 10);
        assert_eq!(smooth_test_functions().len(), 20);
        let co = variable_test_coefficients(Interval::new(-5.0, 5.0).unwrap()).unwrap();
        assert!((co.a_min() - (1.0 + 0.5 / 26.0)).abs() < 1e-9);
    }
}
