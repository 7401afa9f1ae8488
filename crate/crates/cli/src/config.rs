//! The JSON config document and the per-command parameter schemas.

use std::path::PathBuf;

use chernoff_lab::chernoff::SystemSpec;
use chernoff_lab::funcspace::{FunctionSpec, Interval};
use chernoff_lab::parabolic::CoefficientSpec;
use chernoff_lab::translation::RateSpec;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_path_to_error::{Path, Segment};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    TranslationLaw,
    TranslationCounterexample,
    MatrixIdentities,
    MatrixBound,
    ParabolicRate,
    DerivativeConstants,
    ModulusAxioms,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::TranslationLaw => "translation-law",
            Command::TranslationCounterexample => "translation-counterexample",
            Command::MatrixIdentities => "matrix-identities",
            Command::MatrixBound => "matrix-bound",
            Command::ParabolicRate => "parabolic-rate",
            Command::DerivativeConstants => "derivative-constants",
            Command::ModulusAxioms => "modulus-axioms",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn pointer(prefix: &str, path: &Path) -> String {
    let mut out = prefix.to_string();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    if out.is_empty() {
        "/".to_string()
    } else {
        out
    }
}

fn from_value<T: DeserializeOwned>(prefix: &str, value: &serde_json::Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| CliError::usage(pointer(prefix, e.path()), e.inner().to_string()))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::usage("/", format!("invalid JSON: {e}")))?;
        let config: ExperimentConfig = from_value("", &value)?;
        config.params()?;
        Ok(config)
    }

    /// Parses `params` against the schema of `command`.
    pub fn params(&self) -> Result<Params, CliError> {
        let p = &self.params;
        let v = if p.is_null() { serde_json::json!({}) } else { p.clone() };
        Ok(match self.command {
            Command::TranslationLaw => Params::TranslationLaw(from_value("/params", &v)?),
            Command::TranslationCounterexample => Params::TranslationCounterexample(from_value("/params", &v)?),
            Command::MatrixIdentities => Params::MatrixIdentities(from_value("/params", &v)?),
            Command::MatrixBound => Params::MatrixBound(from_value("/params", &v)?),
            Command::ParabolicRate => Params::ParabolicRate(from_value("/params", &v)?),
            Command::DerivativeConstants => Params::DerivativeConstants(from_value("/params", &v)?),
            Command::ModulusAxioms => Params::ModulusAxioms(from_value("/params", &v)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    TranslationLaw(TranslationLawParams),
    TranslationCounterexample(CounterexampleParams),
    MatrixIdentities(MatrixIdentitiesParams),
    MatrixBound(MatrixBoundParams),
    ParabolicRate(ParabolicRateParams),
    DerivativeConstants(DerivativeConstantsParams),
    ModulusAxioms(ModulusAxiomsParams),
}

fn ramp() -> FunctionSpec {
    FunctionSpec::Ramp
}
fn one() -> f64 {
    1.0
}
fn lattice_points() -> usize {
    512
}
fn law_tolerance() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslationLawParams {
    #[serde(default = "ramp")]
    pub f: FunctionSpec,
    pub v: RateSpec,
    #[serde(rename = "T", default = "one")]
    pub t_max: f64,
    pub n_values: Vec<usize>,
    #[serde(default = "lattice_points")]
    pub t_lattice: usize,
    /// Where `f` is non-constant; defaults to the function's own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Interval>,
    /// Allowed `|measured − predicted|` on top of the lattice resolution.
    #[serde(default = "law_tolerance")]
    pub tolerance: f64,
    /// Optional admissible range of the fitted order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order_range: Option<(f64, f64)>,
}

fn n_max_1024() -> usize {
    1024
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleParams {
    #[serde(default = "one")]
    pub t: f64,
    /// Every `n` in `1..=n_max` is checked.
    #[serde(default = "n_max_1024")]
    pub n_max: usize,
}

fn trials_1000() -> usize {
    1000
}
fn trials_200() -> usize {
    200
}
fn trials_100() -> usize {
    100
}
fn dim_6() -> usize {
    6
}
fn n_20() -> usize {
    20
}
fn m_4() -> usize {
    4
}
fn remainder_ts() -> Vec<f64> {
    vec![0.1, 0.5, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixIdentitiesParams {
    #[serde(default = "trials_1000")]
    pub telescoping_trials: usize,
    #[serde(default = "trials_200")]
    pub remainder_trials: usize,
    #[serde(default = "trials_100")]
    pub semigroup_trials: usize,
    #[serde(default = "dim_6")]
    pub max_dim: usize,
    #[serde(default = "n_20")]
    pub max_n: usize,
    #[serde(default = "m_4")]
    pub max_m: usize,
    #[serde(default = "remainder_ts")]
    pub remainder_ts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemChoice {
    /// The dissipative example: symmetric `L`, `S = Taylor_2 + t^{2+ε} N L³`.
    Example { d: usize, epsilon: f64 },
    Explicit(SystemSpec),
}

fn bound_ts() -> Vec<f64> {
    vec![1.0]
}
fn random_vectors() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixBoundParams {
    pub system: SystemChoice,
    #[serde(default = "bound_ts")]
    pub ts: Vec<f64>,
    pub n_values: Vec<usize>,
    /// Test vectors; the example's own vector or seeded random unit
    /// vectors when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<f64>>>,
    #[serde(default = "random_vectors")]
    pub random_vectors: usize,
    /// For the example system: bound on max/min of `lhs·n^{1+ε}` over `n >= 16`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_scaled_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    /// Number of intervals; chosen from the fourth derivative of `f` when absent.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

fn true_() -> bool {
    true
}
fn oracle_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParabolicRateParams {
    pub coefficients: CoefficientSpec,
    pub grid: GridSpec,
    pub f: FunctionSpec,
    #[serde(default = "one")]
    pub t: f64,
    pub n_values: Vec<usize>,
    #[serde(default = "true_")]
    pub with_bound: bool,
    #[serde(default = "oracle_tol")]
    pub oracle_tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order_range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_r_squared: Option<f64>,
}

fn n_max_4() -> usize {
    4
}
fn landau_hs() -> Vec<f64> {
    vec![0.25, 0.5, 1.0, 2.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivativeConstantsParams {
    pub coefficients: CoefficientSpec,
    pub window: Interval,
    #[serde(default = "n_max_4")]
    pub n_max: usize,
    /// Functions to check the table on; the ten-function smoke suite when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<Vec<FunctionSpec>>,
    #[serde(default = "landau_hs")]
    pub landau_h: Vec<f64>,
}

/// A modulus-of-continuity candidate `m(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ModulusSpec {
    /// `coef · x^exponent`.
    Power { coef: f64, exponent: f64 },
    /// `min(slope · x, cap)`.
    CappedLinear { slope: f64, cap: f64 },
    /// `ln(1 + x)`.
    Log1p,
    /// `0` at zero, `jump + x` elsewhere.
    Jump { jump: f64 },
}

impl ModulusSpec {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ModulusSpec::Power { coef, exponent } => coef * x.powf(exponent),
            ModulusSpec::CappedLinear { slope, cap } => (slope * x).min(cap),
            ModulusSpec::Log1p => x.ln_1p(),
            ModulusSpec::Jump { jump } => {
                if x == 0.0 {
                    0.0
                } else {
                    jump + x
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusCandidate {
    pub label: String,
    pub modulus: ModulusSpec,
    /// Whether all axioms are expected to hold.
    #[serde(default = "true_")]
    pub expect_pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub hi: f64,
    pub points: usize,
}

fn default_lattice() -> LatticeSpec {
    LatticeSpec { hi: 4.0, points: 256 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusAxiomsParams {
    pub candidates: Vec<ModulusCandidate>,
    /// Uniform lattice `[0, hi]`.
    #[serde(default = "default_lattice")]
    pub lattice: LatticeSpec,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointer_names_the_bad_field() {
        let err = ExperimentConfig::from_json(
            r#"{"command":"translation-law","params":{"v":{"name":"inv_x"},"n_values":[1,"two"]}}"#,
        )
        .unwrap_err();
        match err {
            CliError::Usage { pointer, .. } => assert_eq!(pointer, "/params/n_values/1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_command_is_usage_error() {
        let err = ExperimentConfig::from_json(r#"{"command":"nope"}"#).unwrap_err();
        assert!(matches!(err, CliError::Usage { ref pointer, .. } if pointer == "/command"));
    }

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_json(r#"{"command":"translation-counterexample"}"#).unwrap();
        assert_eq!(
            c.params().unwrap(),
            Params::TranslationCounterexample(CounterexampleParams { t: 1.0, n_max: 1024 })
        );
    }

    #[test]
    fn root_level_error_points_at_root() {
        let err = ExperimentConfig::from_json("42").unwrap_err();
        assert!(matches!(err, CliError::Usage { ref pointer, .. } if pointer == "/"), "{err:?}");
    }
}
