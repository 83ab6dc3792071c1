//! First-order q-calculus on the lattice `{t q^n}`: the nabla q-derivative,
//! Jackson q-integrals from zero, between lattice-compatible limits, and
//! tail integrals towards infinity.

use std::fmt;
use std::sync::Arc;

use crate::context::{QContext, SeriesAccumulator, TruncationReport};
use crate::error::{QError, Result};
use crate::qarith::{lattice_offset, q_factorial_power};

type EvalFn = dyn Fn(f64) -> Result<f64> + Send + Sync;

/// A real function that can be sampled at the lattice points a Jackson sum
/// needs. Cloning is cheap.
#[derive(Clone)]
pub struct GridFunction {
    eval: Arc<EvalFn>,
    domain_floor: f64,
    label: String,
}

impl fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction")
            .field("label", &self.label)
            .field("domain_floor", &self.domain_floor)
            .finish()
    }
}

impl GridFunction {
    pub fn new(
        label: impl Into<String>,
        domain_floor: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::try_new(label, domain_floor, move |x| Ok(f(x)))
    }

    /// Like [`GridFunction::new`] for rules that can fail.
    pub fn try_new(
        label: impl Into<String>,
        domain_floor: f64,
        f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        GridFunction {
            eval: Arc::new(f),
            domain_floor: domain_floor.max(0.0),
            label: label.into(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), 0.0, move |_| c)
    }

    /// `c0 + c1 x + c2 x^2 + ...`
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        let label = format!("poly{coeffs:?}");
        Self::new(label, 0.0, move |x| {
            coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
        })
    }

    /// `x ↦ (x - a)_q^μ`.
    pub fn q_power(ctx: &QContext, a: f64, mu: f64) -> Self {
        let ctx = *ctx;
        Self::try_new(format!("(x-{a})_q^{mu}"), 0.0, move |x| {
            q_factorial_power(&ctx, x, a, mu)
        })
    }

    /// Samples given as `(x, f(x))` pairs; lookups match to relative 1e-12.
    pub fn tabulated(label: impl Into<String>, mut samples: Vec<(f64, f64)>) -> Self {
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        let floor = samples.first().map_or(0.0, |s| s.0);
        Self::try_new(label, floor, move |x| {
            let idx = samples.partition_point(|s| s.0 < x * (1.0 - 1e-12));
            match samples.get(idx) {
                Some(&(sx, sy)) if (sx - x).abs() <= 1e-12 * x.abs().max(1e-300) => Ok(sy),
                _ => Err(QError::domain(format!("no tabulated sample at x = {x}"))),
            }
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain_floor(&self) -> f64 {
        self.domain_floor
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < self.domain_floor {
            return Err(QError::domain(format!(
                "{} evaluated at {x}, below its domain floor {}",
                self.label, self.domain_floor
            )));
        }
        (self.eval)(x)
    }
}

fn require_positive(name: &str, t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(QError::domain(format!(
            "{name} must be positive and finite, got {t}"
        )))
    }
}

/// `∇_q f(t) = (f(t) - f(qt)) / ((1 - q) t)`.
pub fn nabla_q_derivative(ctx: &QContext, f: &GridFunction, t: f64) -> Result<f64> {
    require_positive("t", t)?;
    let q = ctx.q();
    Ok((f.eval(t)? - f.eval(q * t)?) / ((1.0 - q) * t))
}

/// `∇_q^n f(t)`; `n = 0` returns `f(t)`.
pub fn nabla_q_derivative_iter(ctx: &QContext, f: &GridFunction, t: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return f.eval(t);
    }
    require_positive("t", t)?;
    let q = ctx.q();
    // samples f(t q^j), j = 0..=n, then n rounds of difference quotients in place
    let mut vals = (0..=n)
        .map(|j| f.eval(t * q.powi(j as i32)))
        .collect::<Result<Vec<_>>>()?;
    for order in 0..n {
        for j in 0..(n - order) {
            let point = t * q.powi(j as i32);
            vals[j] = (vals[j] - vals[j + 1]) / ((1.0 - q) * point);
        }
    }
    Ok(vals[0])
}

/// Jackson integral `∫_0^t f ∇_q s = (1 - q) t Σ_{i≥0} q^i f(t q^i)`.
pub fn q_integral_from_zero(
    ctx: &QContext,
    f: &GridFunction,
    t: f64,
) -> Result<(f64, TruncationReport)> {
    require_positive("t", t)?;
    let q = ctx.q();
    let scale = (1.0 - q) * t;
    let mut acc = SeriesAccumulator::new(ctx);
    let mut point = t;
    let mut weight = 1.0;
    loop {
        let term = scale * weight * f.eval(point)?;
        if !term.is_finite() {
            return Err(acc.non_convergence());
        }
        if acc.push(term) {
            return Ok((acc.sum(), acc.report(true)));
        }
        if acc.exhausted() {
            return Err(acc.non_convergence());
        }
        point *= q;
        weight *= q;
    }
}

/// Finite Jackson sum over the nodes `t, tq, ..., tq^{n-1}`.
fn lattice_sum(ctx: &QContext, f: &GridFunction, t: f64, n: usize) -> Result<f64> {
    let q = ctx.q();
    let mut sum = 0.0;
    let mut point = t;
    let mut weight = 1.0;
    for _ in 0..n {
        sum += weight * f.eval(point)?;
        point *= q;
        weight *= q;
    }
    Ok((1.0 - q) * t * sum)
}

/// `∫_a^t f ∇_q s` for `0 ≤ a ≤ t`. When `a = t q^N` the exact finite sum is
/// used, otherwise the difference of the two integrals from zero.
pub fn q_integral(
    ctx: &QContext,
    f: &GridFunction,
    a: f64,
    t: f64,
) -> Result<(f64, TruncationReport)> {
    if !(a >= 0.0 && a <= t) {
        return Err(QError::domain(format!(
            "q_integral needs 0 <= a <= t, got a = {a}, t = {t}"
        )));
    }
    if a == t {
        return Ok((0.0, TruncationReport::exact(0)));
    }
    if a == 0.0 {
        return q_integral_from_zero(ctx, f, t);
    }
    match lattice_offset(ctx, a / t) {
        Some(n) if n >= 0 => {
            let n = n as usize;
            Ok((lattice_sum(ctx, f, t, n)?, TruncationReport::exact(n)))
        }
        _ => {
            let (upper, r1) = q_integral_from_zero(ctx, f, t)?;
            let (lower, r2) = q_integral_from_zero(ctx, f, a)?;
            Ok((upper - lower, r1.merge(r2)))
        }
    }
}

/// Upper limit of a tail integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper {
    Finite(f64),
    Infinity,
}

/// `∫_t^∞ f ∇_q s = (1 - q) t Σ_{i≥1} q^{-i} f(t q^{-i})`.
fn tail_to_infinity(ctx: &QContext, f: &GridFunction, t: f64) -> Result<(f64, TruncationReport)> {
    let q = ctx.q();
    let scale = (1.0 - q) * t;
    let mut acc = SeriesAccumulator::new(ctx);
    let mut weight = 1.0 / q;
    loop {
        let term = scale * weight * f.eval(t * weight)?;
        if !term.is_finite() {
            return Err(acc.non_convergence());
        }
        if acc.push(term) {
            return Ok((acc.sum(), acc.report(true)));
        }
        if acc.exhausted() {
            return Err(acc.non_convergence());
        }
        weight /= q;
    }
}

/// `∫_t^b f ∇_q s`. A finite `b = t q^{-N}` uses the exact finite sum over
/// `t q^{-1}, ..., t q^{-N}`; other finite `b` take the difference of the two
/// tails to infinity.
pub fn q_integral_tail(
    ctx: &QContext,
    f: &GridFunction,
    t: f64,
    b: Upper,
) -> Result<(f64, TruncationReport)> {
    require_positive("t", t)?;
    match b {
        Upper::Infinity => tail_to_infinity(ctx, f, t),
        Upper::Finite(b) => {
            if !(b >= t) {
                return Err(QError::domain(format!(
                    "q_integral_tail needs b >= t, got b = {b}, t = {t}"
                )));
            }
            if b == t {
                return Ok((0.0, TruncationReport::exact(0)));
            }
            match lattice_offset(ctx, t / b) {
                Some(n) if n > 0 => {
                    let n = n as usize;
                    Ok((lattice_sum(ctx, f, b, n)?, TruncationReport::exact(n)))
                }
                _ => {
                    let (from_t, r1) = tail_to_infinity(ctx, f, t)?;
                    let (from_b, r2) = tail_to_infinity(ctx, f, b)?;
                    Ok((from_t - from_b, r1.merge(r2)))
                }
            }
        }
    }
}
