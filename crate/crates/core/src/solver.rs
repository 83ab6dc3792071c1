//! Linear Caputo q-fractional initial value problems
//!
//! ```text
//! _qC_a^α y(x) = λ (x-a)_q^β y(q^{-β} x),   ∇_q^k y(a) = b_k  (k < n)
//! ```
//!
//! solved by successive approximation. Solutions are kept as formal series
//! `Σ A_k (x-a)_q^ρ (x - q^r a)_q^{μ_k}`; coefficients are stored as
//! `coeff · q^{q_scale}` because the prefactor `q^{-β(α+β)k(k-1)/2}` leaves
//! the f64 range long before the other factors do.
//!
//! One iteration step maps a term `A (x-a)_q^μ` to
//! `λ A q^{-βμ} Γ_q(μ+β+1)/Γ_q(μ+β+α+1) (x-a)_q^{μ+β+α}`.

use serde::{Deserialize, Serialize};

use crate::context::{
    GrowthMonitor, QContext, SeriesAccumulator, TruncationReport, DIVERGENCE_HORIZON,
};
use crate::error::{QError, Result};
use crate::fractional::{caputo_order, caputo_power_closed_form, caputo_q_derivative};
use crate::mittag::{gml_prefactor_exponent, GMLParams, SumMode};
use crate::qarith::{
    near_integer, q_factorial_power, q_factorial_power_log, q_gamma, q_gamma_ratio, SignedLog,
};
use crate::qcalc::GridFunction;

/// Exponents closer than this are treated as the same power.
const EXPONENT_TOL: f64 = 1e-9;

/// Problem data `(α, β, λ, a, b_0..b_{n-1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IVPSpec {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub a: f64,
    pub b: Vec<f64>,
}

impl IVPSpec {
    pub fn new(alpha: f64, beta: f64, lambda: f64, a: f64, b: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(QError::domain(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if near_integer(alpha).is_some() {
            return Err(QError::domain(format!(
                "alpha must not be an integer, got {alpha}"
            )));
        }
        if !(beta > -alpha && beta.is_finite()) {
            return Err(QError::domain(format!(
                "beta must exceed -alpha, got beta = {beta}, alpha = {alpha}"
            )));
        }
        if !lambda.is_finite() {
            return Err(QError::domain("lambda must be finite"));
        }
        if !(a >= 0.0 && a.is_finite()) {
            return Err(QError::domain(format!("a must be nonnegative, got {a}")));
        }
        let n = caputo_order(alpha);
        if b.len() != n {
            return Err(QError::domain(format!(
                "alpha = {alpha} needs {n} initial values, got {}",
                b.len()
            )));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(QError::domain("initial values must be finite"));
        }
        Ok(IVPSpec {
            alpha,
            beta,
            lambda,
            a,
            b,
        })
    }

    /// Number of initial conditions, `⌊α⌋ + 1`.
    pub fn order(&self) -> usize {
        self.b.len()
    }

    /// Generalized Mittag-Leffler parameters of the order-`r` solution
    /// component: `m = 1 + β/α`, `l = (β + r)/α`.
    pub fn solution_params(&self, r: u32) -> Result<GMLParams> {
        GMLParams::new(
            self.alpha,
            1.0 + self.beta / self.alpha,
            (self.beta + r as f64) / self.alpha,
            self.lambda,
            self.a,
            r,
        )
    }
}

/// One term `coeff · q^{q_scale} · (power of exponent)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QTerm {
    pub exponent: f64,
    pub coeff: f64,
    pub q_scale: f64,
}

impl QTerm {
    /// `coeff · q^{q_scale}`; may overflow to infinity.
    pub fn value(&self, q: f64) -> f64 {
        self.coeff * q.powf(self.q_scale)
    }

    /// `ln|coeff · q^{q_scale}|` with sign.
    pub fn signed_log(&self, q: f64) -> SignedLog {
        if self.coeff == 0.0 {
            return SignedLog::ZERO;
        }
        SignedLog {
            sign: self.coeff.signum(),
            ln_abs: self.coeff.abs().ln() + self.q_scale * q.ln(),
        }
    }

    /// `|self - other| / |other|` without leaving the f64 range.
    pub fn relative_difference(&self, other: &QTerm, q: f64) -> f64 {
        if other.coeff == 0.0 {
            return if self.coeff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
        }
        let mine = self.coeff * q.powf(self.q_scale - other.q_scale);
        (mine - other.coeff).abs() / other.coeff.abs()
    }
}

/// `Σ_k A_k (x-a)_q^offset (x - q^shift a)_q^{μ_k}` with strictly
/// increasing `μ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormalQSeries {
    pub a: f64,
    pub shift: u32,
    pub offset: f64,
    pub terms: Vec<QTerm>,
}

impl FormalQSeries {
    /// Sorts terms by exponent and adds up terms of equal exponent.
    pub fn canonical(mut self, ctx: &QContext) -> Self {
        self.terms.sort_by(|x, y| x.exponent.total_cmp(&y.exponent));
        let mut out: Vec<QTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            match out.last_mut() {
                Some(last) if (last.exponent - t.exponent).abs() <= EXPONENT_TOL => {
                    last.coeff += t.coeff * ctx.q().powf(t.q_scale - last.q_scale);
                }
                _ => out.push(t),
            }
        }
        self.terms = out;
        self
    }

    /// Folds the front factor into the exponents:
    /// `(x-a)_q^ρ (x - q^ρ a)_q^μ = (x-a)_q^{ρ+μ}`. Needs `shift = ρ`
    /// unless `a = 0`, where every factorial power is a plain power.
    pub fn folded(&self) -> Result<FormalQSeries> {
        if self.offset == 0.0 && self.shift == 0 {
            return Ok(self.clone());
        }
        if self.a != 0.0 && (self.offset - self.shift as f64).abs() > EXPONENT_TOL {
            return Err(QError::domain(format!(
                "cannot fold offset {} into base shift {}",
                self.offset, self.shift
            )));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| QTerm {
                exponent: t.exponent + self.offset,
                ..*t
            })
            .collect();
        Ok(FormalQSeries {
            a: self.a,
            shift: 0,
            offset: 0.0,
            terms,
        })
    }

    /// Coefficient of the term with exponent `mu`, zero if absent.
    pub fn coefficient_of(&self, mu: f64) -> Option<&QTerm> {
        self.terms
            .iter()
            .find(|t| (t.exponent - mu).abs() <= EXPONENT_TOL)
    }

    /// Series truncated to exponents `≤ mu_max`.
    pub fn truncated(&self, mu_max: f64) -> FormalQSeries {
        FormalQSeries {
            terms: self
                .terms
                .iter()
                .copied()
                .filter(|t| t.exponent <= mu_max + EXPONENT_TOL)
                .collect(),
            ..self.clone()
        }
    }
}

fn seed_terms(ctx: &QContext, spec: &IVPSpec) -> Result<Vec<QTerm>> {
    spec.b
        .iter()
        .enumerate()
        .map(|(r, &b)| {
            Ok(QTerm {
                exponent: r as f64,
                coeff: b / q_gamma(ctx, r as f64 + 1.0)?,
                q_scale: 0.0,
            })
        })
        .collect()
}

/// One application of `y ↦ λ _qI_a^α[(x-a)_q^β y(q^{-β}x)]` to a term.
fn iterate_term(ctx: &QContext, spec: &IVPSpec, t: &QTerm) -> Result<QTerm> {
    let nu = t.exponent + spec.beta;
    if !(nu > -1.0) {
        return Err(QError::domain(format!(
            "integrand power {nu} must exceed -1 for the fractional integral to exist"
        )));
    }
    Ok(QTerm {
        exponent: nu + spec.alpha,
        coeff: spec.lambda * t.coeff * q_gamma_ratio(ctx, nu + 1.0, nu + spec.alpha + 1.0)?,
        q_scale: t.q_scale - spec.beta * t.exponent,
    })
}

/// The `steps`-th iterate `y_m = y_0 + λ _qI_a^α[(x-a)_q^β y_{m-1}(q^{-β}x)]`
/// with `y_0 = Σ_r b_r (x-a)_q^r / Γ_q(r+1)`.
pub fn successive_approximation(
    ctx: &QContext,
    spec: &IVPSpec,
    steps: usize,
) -> Result<FormalQSeries> {
    let seeds = seed_terms(ctx, spec)?;
    let mut y = FormalQSeries {
        a: spec.a,
        shift: 0,
        offset: 0.0,
        terms: seeds.clone(),
    }
    .canonical(ctx);
    for _ in 0..steps {
        let mut next = seeds.clone();
        if spec.lambda != 0.0 {
            for t in &y.terms {
                next.push(iterate_term(ctx, spec, t)?);
            }
        }
        y = FormalQSeries { terms: next, ..y }.canonical(ctx);
    }
    Ok(y)
}

/// Order-`r` solution components
/// `b_r/Γ_q(r+1) (x-a)_q^r E^r_{α,1+β/α,(β+r)/α}(λ, x-a)` through term `k_max`.
///
/// `c_k` comes from the order-`r` parameters. The prefactor exponent is
/// `-βkr - β(α+β)k(k-1)/2`, which is the generalized prefactor with the
/// order-0 `l = β/α` and order `r`.
pub fn closed_form_components(
    ctx: &QContext,
    spec: &IVPSpec,
    k_max: usize,
) -> Result<Vec<FormalQSeries>> {
    let seeds = seed_terms(ctx, spec)?;
    let step = spec.alpha + spec.beta;
    let mut out = Vec::with_capacity(seeds.len());
    for (r, seed) in seeds.iter().enumerate() {
        let r32 = r as u32;
        let params = spec.solution_params(r32)?;
        let scale_params = GMLParams {
            l: spec.beta / spec.alpha,
            ..params
        };
        let mut terms = vec![QTerm {
            exponent: 0.0,
            coeff: seed.coeff,
            q_scale: 0.0,
        }];
        if spec.lambda != 0.0 {
            let mut c = 1.0;
            for k in 1..=k_max {
                // c_k = c_{k-1} Γ_q(α((k-1)m+l)+1) / Γ_q(α((k-1)m+l+1)+1)
                let num = params.numerator_arg(k - 1);
                c *= q_gamma_ratio(ctx, num, num + spec.alpha)?;
                terms.push(QTerm {
                    exponent: k as f64 * step,
                    coeff: seed.coeff * spec.lambda.powi(k as i32) * c,
                    q_scale: gml_prefactor_exponent(&scale_params, k),
                });
            }
        }
        out.push(FormalQSeries {
            a: spec.a,
            shift: r32,
            offset: r as f64,
            terms,
        });
    }
    Ok(out)
}

/// The full solution through term `k_max` of every component, folded to
/// powers of `(x-a)` and merged. When `k(α+β)` hits an initial-value power
/// `r` the two terms share one coefficient.
pub fn closed_form_series(ctx: &QContext, spec: &IVPSpec, k_max: usize) -> Result<FormalQSeries> {
    if k_max == 0 {
        return Err(QError::domain("k_max must be at least 1"));
    }
    let mut terms = Vec::new();
    for comp in closed_form_components(ctx, spec, k_max)? {
        terms.extend(comp.folded()?.terms);
    }
    Ok(FormalQSeries {
        a: spec.a,
        shift: 0,
        offset: 0.0,
        terms,
    }
    .canonical(ctx))
}

/// Second divided difference of `q_scale` against exponent over the first,
/// middle and last nonzero terms. Negative means `q^{q_scale}` grows like
/// `q^{-cμ²}` and the series has zero radius of convergence.
fn formally_divergent(s: &FormalQSeries) -> bool {
    let nz: Vec<&QTerm> = s.terms.iter().filter(|t| t.coeff != 0.0).collect();
    if nz.len() < 3 {
        return false;
    }
    let (p0, p1, p2) = (nz[0], nz[nz.len() / 2], nz[nz.len() - 1]);
    let d01 = (p1.q_scale - p0.q_scale) / (p1.exponent - p0.exponent);
    let d12 = (p2.q_scale - p1.q_scale) / (p2.exponent - p1.exponent);
    let dd = (d12 - d01) / (p2.exponent - p0.exponent);
    dd < -1e-9
}

fn series_term(ctx: &QContext, s: &FormalQSeries, t: &QTerm, x: f64) -> Result<SignedLog> {
    let q = ctx.q();
    let mut out = t.signed_log(q);
    if out.is_zero() {
        return Ok(out);
    }
    let base = q.powi(s.shift as i32) * s.a;
    let main = q_factorial_power_log(ctx, x, base, t.exponent)?;
    let front = if s.offset == 0.0 {
        SignedLog {
            sign: 1.0,
            ln_abs: 0.0,
        }
    } else {
        q_factorial_power_log(ctx, x, s.a, s.offset)?
    };
    if main.is_zero() || front.is_zero() {
        return Ok(SignedLog::ZERO);
    }
    out.sign *= main.sign * front.sign;
    out.ln_abs += main.ln_abs + front.ln_abs;
    Ok(out)
}

/// Sums the series at `x`.
///
/// Adaptive mode applies the shared stopping rule. A series whose
/// prefactors grow like `q^{-cμ²}` never counts as converged and ends in
/// [`QError::Divergence`] by its 50th term, as do five consecutive terms
/// growing at a non-decreasing rate. Running out of stored terms otherwise gives
/// [`QError::NonConvergence`]. `Fixed(k)` sums the first `k + 1` terms.
pub fn evaluate_series(
    ctx: &QContext,
    s: &FormalQSeries,
    x: f64,
    mode: SumMode,
) -> Result<(f64, TruncationReport)> {
    if !(x >= s.a && x > 0.0 && x.is_finite()) {
        return Err(QError::domain(format!(
            "need x >= a and x > 0, got x = {x}, a = {}",
            s.a
        )));
    }
    let mut acc = SeriesAccumulator::new(ctx);
    if let SumMode::Fixed(k) = mode {
        for t in s.terms.iter().take(k + 1) {
            acc.push(series_term(ctx, s, t, x)?.value());
        }
        let used = s.terms.len().min(k + 1);
        return Ok((
            acc.sum(),
            TruncationReport {
                converged: used == s.terms.len(),
                ..acc.report(false)
            },
        ));
    }
    if s.terms.len() <= 1 {
        let v = match s.terms.first() {
            Some(t) => series_term(ctx, s, t, x)?.value(),
            None => 0.0,
        };
        return Ok((v, TruncationReport::exact(s.terms.len())));
    }
    let divergent = formally_divergent(s);
    let mut growth = GrowthMonitor::default();
    let mut zero_run = 0;
    for (i, t) in s.terms.iter().enumerate() {
        let term = series_term(ctx, s, t, x)?;
        growth.observe(term.ln_abs);
        let v = term.value();
        if !v.is_finite() || growth.accelerating() {
            return Err(QError::Divergence {
                terms: i + 1,
                run: growth.run(),
            });
        }
        zero_run = if term.is_zero() { zero_run + 1 } else { 0 };
        let done = acc.push(v);
        if done && (!divergent || zero_run >= 3) {
            return Ok((acc.sum(), acc.report(true)));
        }
        if divergent && i + 1 >= DIVERGENCE_HORIZON {
            return Err(QError::Divergence {
                terms: i + 1,
                run: growth.run(),
            });
        }
        if acc.exhausted() {
            return Err(acc.non_convergence());
        }
    }
    if divergent {
        return Err(QError::Divergence {
            terms: s.terms.len(),
            run: growth.run(),
        });
    }
    if zero_run >= 3 {
        return Ok((acc.sum(), acc.report(true)));
    }
    Err(acc.non_convergence())
}

/// Largest normalized defect of the coefficient recurrence
///
/// ```text
/// A(μ) Γ_q(μ+1)/Γ_q(μ-α+1) = λ q^{-β(μ-α-β)} A(μ-α-β)
/// ```
///
/// over every exponent that is not an initial-condition power `0..n-1`.
/// The series is folded to powers of `(x-a)` first. A term with nothing to
/// match on the right counts as a defect of 1.
pub fn coefficient_residual(ctx: &QContext, s: &FormalQSeries, spec: &IVPSpec) -> Result<f64> {
    let s = s.folded()?;
    let q = ctx.q();
    let n = spec.order();
    let step = spec.alpha + spec.beta;
    let mut worst: f64 = 0.0;
    for t in &s.terms {
        let seed = near_integer(t.exponent).is_some_and(|r| r >= 0 && (r as usize) < n);
        if seed {
            continue;
        }
        let lhs = t.coeff * caputo_power_closed_form(ctx, spec.alpha, t.exponent)?;
        let prev_mu = t.exponent - step;
        // rhs scaled by q^{-t.q_scale}, same as lhs
        let rhs = match s.coefficient_of(prev_mu) {
            Some(p) => spec.lambda * p.coeff * q.powf(p.q_scale - spec.beta * prev_mu - t.q_scale),
            None => 0.0,
        };
        let norm = if lhs != 0.0 { lhs.abs() } else { rhs.abs() };
        if norm == 0.0 {
            continue;
        }
        worst = worst.max((lhs - rhs).abs() / norm);
    }
    Ok(worst)
}

/// `|_qC_a^α y(x) - λ (x-a)_q^β y(q^{-β}x)|` with the left side by
/// quadrature over adaptive evaluations of the series. Needs `x` on the
/// lattice above `a` (or `a = 0`).
pub fn numeric_residual(ctx: &QContext, s: &FormalQSeries, spec: &IVPSpec, x: f64) -> Result<f64> {
    let inner_ctx = *ctx;
    let series = s.clone();
    let y = GridFunction::try_new("series", spec.a, move |t| {
        evaluate_series(&inner_ctx, &series, t, SumMode::Adaptive).map(|(v, _)| v)
    });
    let (lhs, _) = caputo_q_derivative(ctx, &y, spec.a, spec.alpha, x)?;
    let shifted = ctx.q().powf(-spec.beta) * x;
    let (y_shifted, _) = evaluate_series(ctx, s, shifted, SumMode::Adaptive)?;
    let rhs = spec.lambda * q_factorial_power(ctx, x, spec.a, spec.beta)? * y_shifted;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mittag::{gml_coefficient, ml_double_eval, MLDoubleParams};

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn spec_validation() {
        assert!(IVPSpec::new(1.0, 0.0, 1.0, 0.0, vec![1.0]).is_err());
        assert!(IVPSpec::new(0.5, -0.5, 1.0, 0.0, vec![1.0]).is_err());
        assert!(IVPSpec::new(0.5, 0.0, 1.0, 0.0, vec![1.0, 2.0]).is_err());
        assert!(IVPSpec::new(1.5, 0.0, 1.0, 0.0, vec![1.0]).is_err());
        assert!(IVPSpec::new(0.5, 0.0, 1.0, -1.0, vec![1.0]).is_err());
        assert!(IVPSpec::new(1.5, -1.2, 1.0, 0.0, vec![1.0, 0.5]).is_ok());
    }

    #[test]
    fn first_iterates() {
        let c = ctx(0.5);
        let (alpha, beta, lambda, b) = (0.6, 0.4, 0.7, 2.0);
        let spec = IVPSpec::new(alpha, beta, lambda, 0.0, vec![b]).unwrap();
        let y0 = successive_approximation(&c, &spec, 0).unwrap();
        assert_eq!(
            y0.terms,
            vec![QTerm {
                exponent: 0.0,
                coeff: b,
                q_scale: 0.0
            }]
        );

        let g = |x| q_gamma(&c, x).unwrap();
        let y1 = successive_approximation(&c, &spec, 1).unwrap();
        assert_eq!(y1.terms.len(), 2);
        let t1 = y1.coefficient_of(alpha + beta).unwrap();
        assert!(
            rel(
                t1.value(0.5),
                b * lambda * g(beta + 1.0) / g(beta + alpha + 1.0)
            ) < 1e-13
        );

        let y2 = successive_approximation(&c, &spec, 2).unwrap();
        let t2 = y2.coefficient_of(2.0 * (alpha + beta)).unwrap();
        let expect = b
            * lambda
            * lambda
            * 0.5f64.powf(-beta * (alpha + beta))
            * (g(beta + 1.0) / g(beta + alpha + 1.0))
            * (g(2.0 * beta + alpha + 1.0) / g(2.0 * beta + 2.0 * alpha + 1.0));
        assert!(rel(t2.value(0.5), expect) < 1e-13);
    }

    #[test]
    fn iterates_match_closed_form() {
        for &q in &[0.3, 0.5, 0.8] {
            let c = ctx(q);
            for &(alpha, beta) in &[(0.5, 0.0), (0.3, 1.0), (0.7, -0.2), (1.5, 0.3), (2.5, -0.4)] {
                let n = caputo_order(alpha);
                let b: Vec<f64> = (0..n).map(|i| 1.0 - 0.3 * i as f64).collect();
                let spec = IVPSpec::new(alpha, beta, -2.0, 0.0, b).unwrap();
                let closed = closed_form_series(&c, &spec, 12).unwrap();
                for m in 1..=12 {
                    let it = successive_approximation(&c, &spec, m).unwrap();
                    let mu_max = m as f64 * (alpha + beta) + (n - 1) as f64;
                    let want = closed.truncated(mu_max);
                    let got = it.truncated(mu_max);
                    assert_eq!(want.terms.len(), got.terms.len());
                    for (x, y) in got.terms.iter().zip(&want.terms) {
                        assert!((x.exponent - y.exponent).abs() < 1e-9);
                        assert!(
                            x.relative_difference(y, q) < 1e-12,
                            "q={q} alpha={alpha} m={m}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn beta_zero_collapse() {
        let c = ctx(0.5);
        let spec = IVPSpec::new(0.7, 0.0, 1.3, 0.0, vec![0.8]).unwrap();
        let s = closed_form_series(&c, &spec, 30).unwrap();
        for (k, t) in s.terms.iter().enumerate() {
            let expect = 0.8 * 1.3f64.powi(k as i32) / q_gamma(&c, 0.7 * k as f64 + 1.0).unwrap();
            assert!(rel(t.value(0.5), expect) < 1e-12);
        }
    }

    #[test]
    fn components_use_generalized_coefficients() {
        let c = ctx(0.5);
        let spec = IVPSpec::new(1.5, 0.3, -0.7, 0.0, vec![1.0, 2.0]).unwrap();
        for (r, comp) in closed_form_components(&c, &spec, 15)
            .unwrap()
            .iter()
            .enumerate()
        {
            let p = spec.solution_params(r as u32).unwrap();
            for (k, t) in comp.terms.iter().enumerate().skip(1) {
                let expect = comp.terms[0].coeff
                    * (-0.7f64).powi(k as i32)
                    * gml_coefficient(&c, &p, k).unwrap();
                assert!(rel(t.coeff, expect) < 1e-12);
            }
        }
    }

    #[test]
    fn wiring_of_parameters() {
        let spec = IVPSpec::new(0.5, 0.3, 1.0, 0.0, vec![1.0]).unwrap();
        let p = spec.solution_params(0).unwrap();
        assert!((p.m - 1.6).abs() < 1e-15 && (p.l - 0.6).abs() < 1e-15);
        assert!((p.alpha * (p.m - 1.0) - 0.3).abs() < 1e-15);
        assert!((p.alpha * p.l + p.alpha - 0.8).abs() < 1e-15);
        for k in 0..20 {
            let kf = k as f64;
            let expect = -0.3 * kf * (kf - 1.0) / 2.0 * 0.8;
            assert!((gml_prefactor_exponent(&p, k) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn recurrence_holds_and_detects_perturbation() {
        let c = ctx(0.3);
        let spec = IVPSpec::new(0.5, 1.0, 2.0, 0.0, vec![1.0]).unwrap();
        let s = closed_form_series(&c, &spec, 40).unwrap();
        assert!(coefficient_residual(&c, &s, &spec).unwrap() <= 1e-11);
        let mut bad = s.clone();
        bad.terms[7].coeff *= 1.0 + 1e-3;
        assert!(coefficient_residual(&c, &bad, &spec).unwrap() >= 1e-4);

        let spec = IVPSpec::new(0.5, 0.0, 0.0, 0.0, vec![1.0]).unwrap();
        let s = closed_form_series(&c, &spec, 5).unwrap();
        assert_eq!(s.terms.len(), 1);
        assert_eq!(coefficient_residual(&c, &s, &spec).unwrap(), 0.0);
    }

    #[test]
    fn multi_order_initial_values_and_components() {
        let c = ctx(0.5);
        let spec = IVPSpec::new(1.5, 0.2, 0.9, 0.0, vec![1.0, 0.5]).unwrap();
        let s = closed_form_series(&c, &spec, 25).unwrap();
        for r in 0..2 {
            let t = s.coefficient_of(r as f64).unwrap();
            let expect = spec.b[r] / q_gamma(&c, r as f64 + 1.0).unwrap();
            assert!((t.value(0.5) - expect).abs() <= 1e-12);
        }
        for comp in closed_form_components(&c, &spec, 25).unwrap() {
            assert!(coefficient_residual(&c, &comp, &spec).unwrap() <= 1e-11);
        }
        assert!(coefficient_residual(&c, &s, &spec).unwrap() <= 1e-11);
    }

    #[test]
    fn literal_order_r_prefactor_breaks_recurrence() {
        // prefactor with l = (β+r)/α in the quadratic part as well
        let c = ctx(0.5);
        let spec = IVPSpec::new(1.5, 0.4, 0.9, 0.0, vec![1.0, 0.5]).unwrap();
        let mut comp = closed_form_components(&c, &spec, 10).unwrap().remove(1);
        let params = spec.solution_params(1).unwrap();
        for (k, t) in comp.terms.iter_mut().enumerate() {
            t.q_scale = gml_prefactor_exponent(&params, k);
        }
        assert!(coefficient_residual(&c, &comp, &spec).unwrap() > 1e-3);
    }

    #[test]
    fn evaluation_basics() {
        let c = ctx(0.5);
        let spec = IVPSpec::new(0.5, -0.25, 0.2, 0.125, vec![1.5]).unwrap();
        let s = closed_form_series(&c, &spec, 30).unwrap();
        let (v, _) = evaluate_series(&c, &s, 0.125, SumMode::Adaptive).unwrap();
        assert_eq!(v, 1.5);
        let spec = IVPSpec::new(0.5, 0.3, 0.0, 0.0, vec![1.5]).unwrap();
        let s = closed_form_series(&c, &spec, 30).unwrap();
        for &x in &[0.25, 1.0, 3.0] {
            assert_eq!(
                evaluate_series(&c, &s, x, SumMode::Adaptive).unwrap().0,
                1.5
            );
        }
    }

    #[test]
    fn negative_beta_converges() {
        let c = ctx(0.5);
        let spec = IVPSpec::new(0.5, -0.25, 0.2, 0.0, vec![1.0]).unwrap();
        let s = closed_form_series(&c, &spec, 60).unwrap();
        let (v20, _) = evaluate_series(&c, &s, 1.0, SumMode::Fixed(20)).unwrap();
        let (v40, _) = evaluate_series(&c, &s, 1.0, SumMode::Fixed(40)).unwrap();
        assert!((v20 - v40).abs() < 1e-10);
        let (v, rep) = evaluate_series(&c, &s, 1.0, SumMode::Adaptive).unwrap();
        assert!(rep.converged);
        assert!((v - v40).abs() < 1e-12);
    }

    #[test]
    fn positive_beta_diverges() {
        let c = ctx(0.5);
        let spec = IVPSpec::new(0.5, 0.5, 0.2, 0.0, vec![1.0]).unwrap();
        for k in [3, 10, 50] {
            let s = closed_form_series(&c, &spec, k).unwrap();
            assert!(matches!(
                evaluate_series(&c, &s, 1.0, SumMode::Adaptive),
                Err(QError::Divergence { .. })
            ));
        }
    }

    #[test]
    fn residual_for_exponential_analogue() {
        let c = ctx(0.5);
        let spec = IVPSpec::new(0.5, 0.0, 0.2, 0.0, vec![1.0]).unwrap();
        let s = closed_form_series(&c, &spec, 80).unwrap();
        let ml = MLDoubleParams::new(0.5, 1.0, 0.2, 0.0).unwrap();
        for &x in &[0.25, 0.5, 1.0] {
            assert!(numeric_residual(&c, &s, &spec, x).unwrap() <= 1e-8);
            let (v, _) = evaluate_series(&c, &s, x, SumMode::Adaptive).unwrap();
            assert!(rel(v, ml_double_eval(&c, &ml, x).unwrap().0) < 1e-12);
        }
        let spec0 = IVPSpec::new(0.5, 0.0, 0.0, 0.0, vec![1.0]).unwrap();
        let s0 = closed_form_series(&c, &spec0, 5).unwrap();
        assert!(numeric_residual(&c, &s0, &spec0, 1.0).unwrap() < 1e-15);
    }

    #[test]
    fn residual_for_negative_beta() {
        let c = ctx(0.5);
        let spec = IVPSpec::new(0.5, -0.25, 0.2, 0.0, vec![1.0]).unwrap();
        let s = closed_form_series(&c, &spec, 80).unwrap();
        for &x in &[0.5, 1.0] {
            assert!(numeric_residual(&c, &s, &spec, x).unwrap() <= 1e-8);
        }
    }
}
