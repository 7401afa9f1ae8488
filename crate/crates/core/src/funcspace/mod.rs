//! Bounded uniformly continuous functions on ℝ, sup norms and moduli of
//! continuity.

mod function;
mod norms;
mod profile;
mod slow;
mod spec;

pub use function::{Function1D, FunctionKind, JetFunction, ModulusFn, SMOOTH};
pub use norms::{
    check_modulus_axioms, lattice_modulus, modulus_of_continuity, sup_abs, sup_norm, Interval,
    ModulusAxiomReport, SupNormEstimate,
};
pub(crate) use norms::lattice_extrema;
pub use profile::Profile;
pub use slow::smooth_slow_vector;
pub use spec::{bounded_smooth_preset, FunctionSpec, BOUNDED_SMOOTH_PRESETS};
