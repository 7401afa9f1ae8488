//! Chernoff product-formula laboratory.
//!
//! Approximations `S(t/n)^n f → e^{tL} f` in three settings: the
//! translation group on bounded uniformly continuous functions, matrix
//! semigroups where `e^{tL}` is computable, and one-dimensional parabolic
//! equations `u_t = a u'' + b u' + c u` on a grid.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chernoff;
pub mod error;
pub mod exec;
pub mod funcspace;
pub mod grid;
pub mod jet;
pub mod parabolic;
pub mod quadrature;
pub mod rates;
pub mod translation;

pub use error::{Error, Result};
pub use exec::Execution;
