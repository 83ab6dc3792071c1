//! Fixed inputs shared by the benchmarks.

use qfrac_core::{GMLParams, GridFunction, IVPSpec, QContext};

pub fn context() -> QContext {
    QContext::new(0.5).expect("valid base")
}

/// Convergent order-0 problem: `α = 0.5`, `β = -0.25`, `λ = 0.2`, `b = 1`.
pub fn convergent_spec() -> IVPSpec {
    IVPSpec::new(0.5, -0.25, 0.2, 0.0, vec![1.0]).expect("valid problem")
}

/// Two initial values, `α = 1.5`.
pub fn multi_order_spec() -> IVPSpec {
    IVPSpec::new(1.5, 0.3, -0.7, 0.0, vec![1.0, 0.5]).expect("valid problem")
}

/// `m = 1`, inside the convergent regime at `x = 1`.
pub fn reduction_params() -> GMLParams {
    GMLParams::new(0.5, 1.0, 0.5, 0.4, 0.0, 0).expect("valid parameters")
}

pub fn cubic() -> GridFunction {
    GridFunction::polynomial(vec![0.3, -1.0, 0.5, 0.25])
}
