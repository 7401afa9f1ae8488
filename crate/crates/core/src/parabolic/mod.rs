//! `Au = a u'' + b u' + c u`: derivative estimates, the four-point Chernoff
//! step and a reference solver.

mod coefficients;
mod estimates;
mod expansion;
mod experiment;
mod oracle;
mod scheme;
mod suite;

pub use coefficients::{
    apply_operator, apply_operator_grid, grid_derivatives, operator_powers, CoefficientSpec,
    ParabolicCoefficients, WINDOW_SUP_TOL,
};
pub use estimates::{
    check_derivative_table, derivative_sups, derive_derivative_constants, landau_inequality_check,
    DerivativeConstantTable, LandauCheck, TableCheckRow, DERIVATIVE_SUP_TOL,
};
pub use expansion::{
    expand_power, highest_derivative_bound, power_norm_bound, Coefficient, CoefficientPolynomial,
    Factor, OperatorPowerExpansion,
};
pub use experiment::{
    defect_constants, parabolic_bound_rhs, parabolic_rate_experiment, parabolic_rate_experiment_with, rate_window,
    ParabolicRateExperiment, ParabolicRateReport, ParabolicRateRow, DEFAULT_BUDGET_TARGET,
};
pub use oracle::{oracle_solution, OracleMethod, OracleQuality, OracleSolution};
pub use scheme::{
    apply_chernoff_step, apply_chernoff_step_with, iterate_chernoff, iterate_chernoff_with,
    max_shifts, working_window, IterateOutput, StepOutput, StepShifts,
};
pub use suite::{smoke_suite, smooth_test_functions, variable_test_coefficients};
