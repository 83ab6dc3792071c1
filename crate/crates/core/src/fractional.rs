//! Fractional q-operators: the Riemann-type q-fractional integral, the
//! Caputo q-fractional derivative, their power rules and the Taylor
//! remainder identity linking them.

use crate::context::{QContext, SeriesAccumulator, TruncationReport};
use crate::error::{QError, Result};
use crate::qarith::{lattice_offset, near_integer, q_factorial_power, q_gamma, q_gamma_ratio};
use crate::qcalc::{nabla_q_derivative_iter, GridFunction};

/// Number of lattice nodes strictly above `a` when integrating down from
/// `t`; `None` means `a = 0` (infinite Jackson sum).
fn node_count(ctx: &QContext, a: f64, t: f64) -> Result<Option<usize>> {
    if !(a >= 0.0 && t >= a && t > 0.0) {
        return Err(QError::domain(format!(
            "need 0 <= a <= t and t > 0, got a = {a}, t = {t}"
        )));
    }
    if a == 0.0 {
        return Ok(None);
    }
    match lattice_offset(ctx, a / t) {
        Some(n) if n >= 0 => Ok(Some(n as usize)),
        _ => Err(QError::domain(format!(
            "lower limit a = {a} is not on the lattice t q^N of t = {t}"
        ))),
    }
}

/// `_qI_a^ν f(t) = (1/Γ_q(ν)) ∫_a^t (t - qs)_q^{ν-1} f(s) ∇_q s`.
///
/// Nodes are `s = t q^i`, so the kernel ratio `qs/t = q^{i+1}` is always
/// inside the convergent regime of the q-factorial product. `a` must be zero
/// or of the form `t q^N`.
pub fn riemann_q_integral_frac(
    ctx: &QContext,
    f: &GridFunction,
    a: f64,
    alpha: f64,
    t: f64,
) -> Result<(f64, TruncationReport)> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(QError::domain(format!(
            "fractional order must be positive, got {alpha}"
        )));
    }
    let nodes = node_count(ctx, a, t)?;
    let q = ctx.q();
    let norm = q_gamma(ctx, alpha)?;
    let scale = (1.0 - q) * t / norm;
    let term = |i: usize, weight: f64| -> Result<f64> {
        let s = t * q.powi(i as i32);
        let kernel = q_factorial_power(ctx, t, q * s, alpha - 1.0)?;
        Ok(scale * weight * kernel * f.eval(s)?)
    };
    match nodes {
        Some(n) => {
            let mut sum = 0.0;
            let mut weight = 1.0;
            for i in 0..n {
                sum += term(i, weight)?;
                weight *= q;
            }
            Ok((sum, TruncationReport::exact(n)))
        }
        None => {
            let mut acc = SeriesAccumulator::new(ctx);
            let mut weight = 1.0;
            for i in 0.. {
                let v = term(i, weight)?;
                if !v.is_finite() {
                    return Err(acc.non_convergence());
                }
                if acc.push(v) {
                    return Ok((acc.sum(), acc.report(true)));
                }
                if acc.exhausted() {
                    return Err(acc.non_convergence());
                }
                weight *= q;
            }
            unreachable!()
        }
    }
}

/// Scalar `Γ_q(μ+1) / Γ_q(α+μ+1)` with `_qI_a^α (x-a)_q^μ = scalar · (x-a)_q^{μ+α}`.
pub fn power_rule_closed_form(ctx: &QContext, alpha: f64, mu: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(QError::domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(mu > -1.0) {
        return Err(QError::domain(format!(
            "power rule needs mu > -1, got {mu}"
        )));
    }
    q_gamma_ratio(ctx, mu + 1.0, alpha + mu + 1.0)
}

/// Integer part `n` of the Caputo construction: `α` itself when `α` is a
/// positive integer, `⌊α⌋ + 1` otherwise.
pub fn caputo_order(alpha: f64) -> usize {
    match near_integer(alpha) {
        Some(n) if n > 0 => n as usize,
        _ => alpha.floor() as usize + 1,
    }
}

/// Caputo q-fractional derivative `_qC_a^α f(t)`.
///
/// Non-integer `α`: `_qI_a^{n-α}` applied to `∇_q^n f` with `n = ⌊α⌋ + 1`.
/// Integer `α`: `∇_q^α f(t)` with no quadrature.
pub fn caputo_q_derivative(
    ctx: &QContext,
    f: &GridFunction,
    a: f64,
    alpha: f64,
    t: f64,
) -> Result<(f64, TruncationReport)> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(QError::domain(format!(
            "Caputo order must be positive, got {alpha}"
        )));
    }
    if let Some(n) = near_integer(alpha).filter(|&n| n > 0) {
        let v = nabla_q_derivative_iter(ctx, f, t, n as usize)?;
        return Ok((v, TruncationReport::exact(n as usize + 1)));
    }
    let n = caputo_order(alpha);
    let inner_ctx = *ctx;
    let f = f.clone();
    let derivative = GridFunction::try_new(format!("nabla^{n} {}", f.label()), 0.0, move |s| {
        nabla_q_derivative_iter(&inner_ctx, &f, s, n)
    });
    riemann_q_integral_frac(ctx, &derivative, a, n as f64 - alpha, t)
}

/// Scalar `Γ_q(μ+1) / Γ_q(μ-α+1)` with `_qC_a^α (x-a)_q^μ = scalar · (x-a)_q^{μ-α}`.
///
/// This is the algebraic power rule; it is the actual Caputo derivative for
/// `μ > n - 1` (`n` the Caputo order), and zero is the right answer for the
/// integer powers `μ < n` instead.
pub fn caputo_power_closed_form(ctx: &QContext, alpha: f64, mu: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(QError::domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(mu > 0.0) {
        return Err(QError::domain(format!(
            "Caputo power rule needs mu > 0, got {mu}"
        )));
    }
    if !(mu - alpha > -1.0) {
        return Err(QError::domain(format!(
            "Caputo power rule needs mu - alpha > -1, got mu = {mu}, alpha = {alpha}"
        )));
    }
    q_gamma_ratio(ctx, mu + 1.0, mu - alpha + 1.0)
}

/// Right-hand side of the Taylor remainder identity:
/// `f(t) - Σ_{k<n} (t-a)_q^k / Γ_q(k+1) · ∇_q^k f(a)`.
pub fn taylor_remainder(
    ctx: &QContext,
    f: &GridFunction,
    a: f64,
    alpha: f64,
    t: f64,
) -> Result<f64> {
    let n = caputo_order(alpha);
    let mut rhs = f.eval(t)?;
    for k in 0..n {
        if k > 0 && a <= 0.0 {
            return Err(QError::domain("Taylor terms of order >= 1 need a > 0"));
        }
        let dk = nabla_q_derivative_iter(ctx, f, a, k)?;
        rhs -= q_factorial_power(ctx, t, a, k as f64)? / q_gamma(ctx, k as f64 + 1.0)? * dk;
    }
    Ok(rhs)
}

/// `_qI_a^α (_qC_a^α f)(t)` computed by nested quadrature.
pub fn integral_of_caputo(
    ctx: &QContext,
    f: &GridFunction,
    a: f64,
    alpha: f64,
    t: f64,
) -> Result<f64> {
    let inner_ctx = *ctx;
    let f = f.clone();
    let caputo = GridFunction::try_new(format!("C^{alpha} {}", f.label()), 0.0, move |s| {
        caputo_q_derivative(&inner_ctx, &f, a, alpha, s).map(|(v, _)| v)
    });
    Ok(riemann_q_integral_frac(ctx, &caputo, a, alpha, t)?.0)
}

/// Largest defect of `_qI_a^α _qC_a^α f = f - Σ_{k<n} (t-a)_q^k ∇_q^k f(a) / Γ_q(k+1)`
/// over `points`.
pub fn check_taylor_identity(
    ctx: &QContext,
    f: &GridFunction,
    a: f64,
    alpha: f64,
    points: &[f64],
) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(QError::domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let mut worst: f64 = 0.0;
    for &t in points {
        if !(t > a) {
            return Err(QError::domain(format!(
                "evaluation point {t} must lie above a = {a}"
            )));
        }
        let lhs = integral_of_caputo(ctx, f, a, alpha, t)?;
        let rhs = taylor_remainder(ctx, f, a, alpha, t)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcalc::{nabla_q_derivative_iter, q_integral_from_zero};

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn order_one_is_plain_integral() {
        let c = ctx(0.5);
        let id = GridFunction::new("x", 0.0, |x| x);
        let (v, _) = riemann_q_integral_frac(&c, &id, 0.0, 1.0, 1.0).unwrap();
        let (plain, _) = q_integral_from_zero(&c, &id, 1.0).unwrap();
        assert!(rel(v, plain) < 1e-10);
        assert!(rel(v, 2.0 / 3.0) < 1e-11);
    }

    #[test]
    fn integral_of_one() {
        let c = ctx(0.5);
        let (v, _) =
            riemann_q_integral_frac(&c, &GridFunction::constant(1.0), 0.0, 0.5, 1.0).unwrap();
        // 1/Γ_q(1.5), mpmath
        assert!(rel(v, 1.085_923_182_885_814_4) < 1e-10);
        let t: f64 = 0.25;
        let (v, _) =
            riemann_q_integral_frac(&c, &GridFunction::constant(1.0), 0.0, 0.7, t).unwrap();
        assert!(rel(v, t.powf(0.7) / q_gamma(&c, 1.7).unwrap()) < 1e-10);
    }

    #[test]
    fn power_rule_on_lattice() {
        let c = ctx(0.5);
        let a = 0.5f64.powi(6);
        let t = 0.5;
        for &(alpha, mu) in &[(0.5, 0.0), (0.3, 1.5), (1.7, 2.0)] {
            let f = GridFunction::q_power(&c, a, mu);
            let (v, rep) = riemann_q_integral_frac(&c, &f, a, alpha, t).unwrap();
            assert_eq!(rep.terms_used, 5);
            let closed = power_rule_closed_form(&c, alpha, mu).unwrap()
                * q_factorial_power(&c, t, a, mu + alpha).unwrap();
            assert!(rel(v, closed) < 1e-12, "alpha={alpha} mu={mu}");
        }
    }

    #[test]
    fn power_rule_examples() {
        let c = ctx(0.5);
        assert!(rel(power_rule_closed_form(&c, 1.0, 0.0).unwrap(), 1.0) < 1e-15);
        assert!(rel(power_rule_closed_form(&c, 1.0, 1.0).unwrap(), 2.0 / 3.0) < 1e-14);
        let s = power_rule_closed_form(&c, 0.5, 0.5).unwrap();
        assert!(rel(s, 0.920_875_450_271_283_8) < 1e-13);
        // quadrature oracle at t = 1, a = 0
        let f = GridFunction::q_power(&c, 0.0, 0.5);
        let (quad, _) = riemann_q_integral_frac(&c, &f, 0.0, 0.5, 1.0).unwrap();
        assert!(rel(quad, s) < 1e-9);
        assert!(power_rule_closed_form(&c, 1.0, -1.0).is_err());
    }

    #[test]
    fn caputo_examples() {
        let c = ctx(0.5);
        let (v, _) = caputo_q_derivative(&c, &GridFunction::constant(4.0), 0.0, 0.4, 1.0).unwrap();
        assert_eq!(v, 0.0);
        let a = 0.5f64.powi(5);
        let f = GridFunction::q_power(&c, a, 1.0);
        for &alpha in &[0.3, 0.5, 0.9] {
            let (v, _) = caputo_q_derivative(&c, &f, a, alpha, 1.0).unwrap();
            let expect = q_gamma(&c, 2.0).unwrap() / q_gamma(&c, 2.0 - alpha).unwrap()
                * q_factorial_power(&c, 1.0, a, 1.0 - alpha).unwrap();
            assert!(rel(v, expect) < 1e-12, "alpha={alpha}");
        }
        let square = GridFunction::new("x^2", 0.0, |x| x * x);
        let (v, _) = caputo_q_derivative(&c, &square, 0.0, 1.0, 0.8).unwrap();
        assert!(rel(v, 1.5 * 0.8) < 1e-15);
    }

    #[test]
    fn caputo_integer_order_is_bit_identical() {
        let c = ctx(0.3);
        let cube = GridFunction::new("x^3", 0.0, |x| x * x * x - 2.0 * x);
        for n in 1..=3 {
            let (v, _) = caputo_q_derivative(&c, &cube, 0.01, n as f64, 0.77).unwrap();
            let direct = nabla_q_derivative_iter(&c, &cube, 0.77, n).unwrap();
            assert_eq!(v.to_bits(), direct.to_bits());
        }
    }

    #[test]
    fn caputo_closed_form_examples() {
        let c = ctx(0.5);
        let alpha = 0.5;
        assert!(
            rel(
                caputo_power_closed_form(&c, alpha, alpha).unwrap(),
                q_gamma(&c, 1.5).unwrap()
            ) < 1e-13
        );
        let s = caputo_power_closed_form(&c, 0.5, 1.0).unwrap();
        assert!(rel(s, 1.085_923_182_885_814_4) < 1e-13);
        // quadrature oracle on f = (x - 0)^1 at t = 1
        let f = GridFunction::q_power(&c, 0.0, 1.0);
        let (quad, _) = caputo_q_derivative(&c, &f, 0.0, 0.5, 1.0).unwrap();
        assert!(rel(quad, s) < 1e-9);
        for &(alpha, mu) in &[(0.3, 0.8), (0.7, 2.5), (0.5, 0.5)] {
            let round = caputo_power_closed_form(&c, alpha, mu).unwrap()
                * power_rule_closed_form(&c, alpha, mu - alpha).unwrap();
            assert!((round - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn taylor_identity_examples() {
        let c = ctx(0.5);
        let a = 0.5f64.powi(3);
        let points = [0.25, 0.5, 1.0];
        let err = check_taylor_identity(&c, &GridFunction::constant(2.0), a, 0.5, &points).unwrap();
        assert_eq!(err, 0.0);
        let f = GridFunction::q_power(&c, a, 1.0);
        assert!(check_taylor_identity(&c, &f, a, 0.5, &points).unwrap() <= 1e-8);
        let p = GridFunction::polynomial(vec![1.0, -2.0, 3.0]);
        assert!(check_taylor_identity(&c, &p, a, 1.5, &points).unwrap() <= 1e-8);
    }

    #[test]
    fn rejects_off_lattice_limits() {
        let c = ctx(0.5);
        let f = GridFunction::constant(1.0);
        assert!(matches!(
            riemann_q_integral_frac(&c, &f, 0.3, 0.5, 1.0),
            Err(QError::Domain(_))
        ));
        assert!(matches!(
            riemann_q_integral_frac(&c, &f, 0.0, -0.5, 1.0),
            Err(QError::Domain(_))
        ));
    }
}
