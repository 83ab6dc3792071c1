//! q-fractional calculus on the lattice `{q^n}`: Jackson integrals, nabla
//! q-derivatives, q-factorial powers, Caputo q-fractional derivatives, the
//! double-index and generalized q-Mittag-Leffler functions, and a solver for
//! linear Caputo q-fractional initial value problems by successive
//! approximation.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod context;
pub mod error;
pub mod fractional;
pub mod mittag;
pub mod props;
pub mod qarith;
pub mod qcalc;
pub mod solver;

pub use context::{QContext, TruncationReport};
pub use error::{QError, Result};
pub use fractional::{
    caputo_power_closed_form, caputo_q_derivative, check_taylor_identity, power_rule_closed_form,
    riemann_q_integral_frac,
};
pub use mittag::{
    gml_coefficient, gml_eval, gml_prefactor_exponent, ml_double_eval, GMLParams, MLDoubleParams,
    SumMode,
};
pub use props::{
    list_suites, run_case, run_single, run_suite, SuiteDescriptor, SuiteOptions, SuiteReport,
};
pub use qarith::{
    ln_q_gamma, q_bracket, q_factorial_power, q_factorial_power_log, q_gamma, q_gamma_ratio,
    q_pochhammer, PochhammerLen, SignedLog,
};
pub use qcalc::{
    nabla_q_derivative, nabla_q_derivative_iter, q_integral, q_integral_from_zero, q_integral_tail,
    GridFunction, Upper,
};
pub use solver::{
    closed_form_components, closed_form_series, coefficient_residual, evaluate_series,
    numeric_residual, successive_approximation, FormalQSeries, IVPSpec, QTerm,
};
