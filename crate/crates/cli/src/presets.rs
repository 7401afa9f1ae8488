//! Built-in experiment configs, listed by `chernoff-lab presets`.

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub formula: &'static str,
    pub config: Value,
}

fn pow2(max_exp: u32) -> Vec<usize> {
    (0..=max_exp).map(|k| 1usize << k).collect()
}

fn law(f: Value, v: Value, n_values: Vec<usize>, order_range: Option<(f64, f64)>) -> Value {
    let mut params = json!({"f": f, "v": v, "T": 1.0, "n_values": n_values});
    if let Some(r) = order_range {
        params["order_range"] = json!(r);
    }
    json!({"command": "translation-law", "params": params, "seed": 0})
}

fn ramp() -> Value {
    json!({"kind": "ramp"})
}

fn constant(value: f64) -> Value {
    json!({"kind": "constant", "params": {"value": value}})
}

fn preset_fn(name: &str) -> Value {
    json!({"kind": "bounded_smooth_preset", "params": {"name": name}})
}

fn bump() -> Value {
    json!({"kind": "gaussian", "params": {"amplitude": 1.0, "center": 0.0, "width": 1.0}})
}

pub fn catalog() -> Vec<Preset> {
    let dense: Vec<usize> = (1..=4096).collect();
    vec![
        Preset {
            name: "fast:power",
            description: "ramp under G with a power-law rate, error decays like n^-k",
            formula: "v(x)=(1+x)^{-k}, k=2",
            config: law(ramp(), json!({"name": "power", "params": {"k": 2.0}}), pow2(6), None),
        },
        Preset {
            name: "fast:exp_decay",
            description: "ramp under G with an exponentially small rate",
            formula: "v(x)=e^{-x}",
            config: law(ramp(), json!({"name": "exp_decay"}), (1..=20).collect(), None),
        },
        Preset {
            name: "fast:double_exp_decay",
            description: "ramp under G with a doubly exponentially small rate",
            formula: "v(x)=e^{-e^x}",
            config: law(ramp(), json!({"name": "double_exp_decay"}), (1..=6).collect(), None),
        },
        Preset {
            name: "slow:inv_root",
            description: "ramp under G with a root-type rate, fitted order 1/k",
            formula: "u(x)=(1+x)^{-1/k}, k=3",
            config: law(ramp(), json!({"name": "inv_root", "params": {"k": 3.0}}), pow2(10), None),
        },
        Preset {
            name: "slow:inv_log",
            description: "ramp under G with a logarithmic rate, fitted order below 0.2",
            formula: "u(x)=1/ln(x+e)",
            config: law(ramp(), json!({"name": "inv_log"}), dense.clone(), Some((0.0, 0.2))),
        },
        Preset {
            name: "slow:inv_loglog",
            description: "ramp under G with an iterated logarithmic rate",
            formula: "u(x)=1/ln(ln(x+e^e))",
            config: law(ramp(), json!({"name": "inv_loglog"}), pow2(12), Some((0.0, 0.2))),
        },
        Preset {
            name: "vector:ramp",
            description: "the Lipschitz ramp with the harmonic rate, error exactly 1/n",
            formula: "f(x)=min(max(x,0),1), v(x)=1/x",
            config: law(ramp(), json!({"name": "inv_x"}), pow2(6), Some((0.99, 1.01))),
        },
        Preset {
            name: "vector:smooth_slow",
            description: "a C-infinity bounded vector with unit slope at 0, still converging at the slow rate",
            formula: "f odd, f(x)=x on [0,1], f=2 on [3,inf); u(x)=1/ln(x+e)",
            config: law(
                json!({"kind": "smooth_slow"}),
                json!({"name": "inv_log"}),
                pow2(12),
                Some((0.0, 0.25)),
            ),
        },
        Preset {
            name: "matrix:dissipative_taylor2",
            description: "second-order Taylor recipe plus a t^{2+eps} perturbation for a symmetric dissipative L",
            formula: "S(t)=I+tL+t^2L^2/2+t^{2+eps}N L^3, eps=0.5",
            config: json!({
                "command": "matrix-bound",
                "params": {
                    "system": {"example": {"d": 6, "epsilon": 0.5}},
                    "ts": [1.0],
                    "n_values": (1..=256).collect::<Vec<usize>>(),
                    "max_scaled_ratio": 10.0
                },
                "seed": 11
            }),
        },
        Preset {
            name: "matrix:identities",
            description: "telescoping, Taylor remainder and semigroup checks on seeded random matrices",
            formula: "A^n-B^n=sum A^k(A-B)B^{n-1-k}",
            config: json!({"command": "matrix-identities", "params": {}, "seed": 7}),
        },
        Preset {
            name: "parabolic:heat_gaussian",
            description: "heat equation with a Gaussian bump, first-order convergence of the step",
            formula: "a=1, b=c=0, f=e^{-x^2}",
            config: json!({
                "command": "parabolic-rate",
                "params": {
                    "coefficients": {"a": constant(1.0), "b": constant(0.0), "c": constant(0.0)},
                    "grid": {"x_lo": -26.0, "x_hi": 26.0},
                    "f": bump(),
                    "t": 1.0,
                    "n_values": [4, 8, 16, 32, 64],
                    "order_range": [0.85, 1.15],
                    "min_r_squared": 0.99
                },
                "seed": 0
            }),
        },
        Preset {
            name: "parabolic:mild_diffusion",
            description: "variable diffusion against the Crank-Nicolson reference",
            formula: "a=1+1/(2(1+x^2)), b=c=0, f=e^{-x^2}",
            config: json!({
                "command": "parabolic-rate",
                "params": {
                    "coefficients": {"a": preset_fn("mild_diffusion"), "b": constant(0.0), "c": constant(0.0)},
                    "grid": {"x_lo": -26.0, "x_hi": 26.0},
                    "f": bump(),
                    "t": 1.0,
                    "n_values": [4, 8, 16, 32, 64],
                    "order_range": [0.8, 1.2]
                },
                "seed": 0
            }),
        },
        Preset {
            name: "parabolic:variable_constants",
            description: "derivative constants for variable a, b, c and their checks on the smoke suite",
            formula: "||v^(n)|| <= sum_k C[n][k] ||A^k v||",
            config: json!({
                "command": "derivative-constants",
                "params": {
                    "coefficients": {
                        "a": preset_fn("mild_diffusion"),
                        "b": preset_fn("bump_drift"),
                        "c": preset_fn("soft_reaction")
                    },
                    "window": {"lo": -8.0, "hi": 8.0},
                    "n_max": 4
                },
                "seed": 0
            }),
        },
        Preset {
            name: "translation:counterexample",
            description: "unit-norm continuous functions with error 1 for every n",
            formula: "f_n piecewise linear, knee at t^2/n",
            config: json!({"command": "translation-counterexample", "params": {"t": 1.0, "n_max": 1024}, "seed": 0}),
        },
        Preset {
            name: "modulus:examples",
            description: "axioms for admissible moduli and two rejected candidates",
            formula: "m(0)=0, monotone, continuous, m(x+y)<=m(x)+m(y), m(x)/x nonincreasing",
            config: json!({
                "command": "modulus-axioms",
                "params": {
                    "candidates": [
                        {"label": "sqrt", "modulus": {"kind": "power", "params": {"coef": 1.0, "exponent": 0.5}}},
                        {"label": "capped_linear", "modulus": {"kind": "capped_linear", "params": {"slope": 1.0, "cap": 1.0}}},
                        {"label": "log1p", "modulus": {"kind": "log1p"}},
                        {"label": "square", "modulus": {"kind": "power", "params": {"coef": 1.0, "exponent": 2.0}}, "expect_pass": false},
                        {"label": "jump", "modulus": {"kind": "jump", "params": {"jump": 0.5}}, "expect_pass": false}
                    ]
                },
                "seed": 0
            }),
        },
    ]
}

pub fn find(name: &str) -> Option<Preset> {
    catalog().into_iter().find(|p| p.name == name)
}
