use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{smooth_slow_vector, Function1D, Profile};

/// JSON description `{kind, params}` of a [`Function1D`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum FunctionSpec {
    Ramp,
    SmoothSlow,
    PiecewiseLinear {
        points: Vec<(f64, f64)>,
    },
    /// A named bounded smooth coefficient, see [`bounded_smooth_preset`].
    BoundedSmoothPreset {
        name: String,
    },
    #[serde(untagged)]
    Profile(Profile),
}

impl FunctionSpec {
    pub fn build(&self) -> Result<Function1D> {
        match self {
            FunctionSpec::Ramp => Ok(Function1D::ramp()),
            FunctionSpec::SmoothSlow => Ok(smooth_slow_vector()),
            FunctionSpec::PiecewiseLinear { points } => Function1D::piecewise_linear(points.clone()),
            FunctionSpec::BoundedSmoothPreset { name } => {
                Ok(Function1D::smooth(bounded_smooth_preset(name)?).with_label(name.clone()))
            }
            FunctionSpec::Profile(p) => Ok(Function1D::smooth(p.clone())),
        }
    }
}

pub const BOUNDED_SMOOTH_PRESETS: [&str; 3] = ["mild_diffusion", "bump_drift", "soft_reaction"];

/// `mild_diffusion`: `1 + ½/(1+x²)`; `bump_drift`: `½e^{−x²}`;
/// `soft_reaction`: `−½ + ¼ sin x`.
pub fn bounded_smooth_preset(name: &str) -> Result<Profile> {
    match name {
        "mild_diffusion" => Ok(Profile::affine(1.0, 1.0, Profile::lorentzian(0.5, 0.0, 1.0))),
        "bump_drift" => Ok(Profile::gaussian(0.5, 0.0, 1.0)),
        "soft_reaction" => Ok(Profile::affine(-0.5, 1.0, Profile::sine(0.25, 1.0, 0.0))),
        other => Err(Error::Domain(format!(
            "unknown bounded smooth preset {other:?}; known: {}",
            BOUNDED_SMOOTH_PRESETS.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tagged_kinds() {
        let ramp: FunctionSpec = serde_json::from_str(r#"{"kind":"ramp"}"#).unwrap();
        assert_eq!(ramp, FunctionSpec::Ramp);
        let g: FunctionSpec = serde_json::from_str(
            r#"{"kind":"gaussian","params":{"amplitude":1.0,"center":0.0,"width":1.0}}"#,
        )
        .unwrap();
        assert_eq!(g, FunctionSpec::Profile(Profile::gaussian(1.0, 0.0, 1.0)));
        let pl: FunctionSpec =
            serde_json::from_str(r#"{"kind":"piecewise_linear","params":{"points":[[0,0],[1,2]]}}"#)
                .unwrap();
        assert_eq!(pl.build().unwrap().eval(0.5), 1.0);
    }

    #[test]
    fn mild_diffusion_preset() {
        let a: FunctionSpec =
            serde_json::from_str(r#"{"kind":"bounded_smooth_preset","params":{"name":"mild_diffusion"}}"#).unwrap();
        let a = a.build().unwrap();
        assert_eq!(a.eval(0.0), 1.5);
        assert!((a.eval(1.0) - 1.25).abs() < 1e-15);
        assert!(FunctionSpec::BoundedSmoothPreset { name: "x".into() }.build().is_err());
    }

    #[test]
    fn unknown_kind_is_rejected() {
        assert!(serde_json::from_str::<FunctionSpec>(r#"{"kind":"nope"}"#).is_err());
    }
}
