//! Double-index q-Mittag-Leffler function and the generalized
//! q-Mittag-Leffler functions of order 0 and order r.
//!
//! Generalized function of order r:
//!
//! ```text
//! E^r_{α,m,l}(λ, x-a) = 1 + Σ_{k≥1} λ^k q^{e_k} c_k (x - q^r a)_q^{αkm}
//! e_k = -kα(m-1)r - k(k-1)/2 · α(m-1)(αl+α)
//! c_k = ∏_{j<k} Γ_q(α(jm+l)+1) / Γ_q(α(jm+l+1)+1)
//! ```
//!
//! For `α(m-1)(αl+α) > 0` the prefactor grows like `q^{-ck²}` and the series
//! diverges at every `x > a`. Adaptive evaluation reports that as
//! [`QError::Divergence`] instead of returning a partial sum, as soon as
//! five consecutive terms grow or after 50 terms at the latest. Fixed-length
//! partial sums stay available through [`SumMode::Fixed`].

use serde::{Deserialize, Serialize};

use crate::context::{
    GrowthMonitor, QContext, SeriesAccumulator, TruncationReport, DIVERGENCE_HORIZON,
};
use crate::error::{QError, Result};
use crate::qarith::{
    is_nonpositive_integer, ln_q_gamma, q_factorial_power, q_factorial_power_log, q_gamma_ratio,
    SignedLog,
};

/// How a series is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumMode {
    /// Sum until the context's truncation rule holds; detect divergence.
    Adaptive,
    /// Partial sum through the given number of terms after the leading one.
    Fixed(usize),
}

/// Parameters `(α, β, λ, z₀)` of the double-index function
/// `Σ_k λ^k (z - z₀)_q^{αk} / Γ_q(αk + β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLDoubleParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub z0: f64,
}

impl MLDoubleParams {
    pub fn new(alpha: f64, beta: f64, lambda: f64, z0: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(QError::domain(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if !(beta.is_finite() && lambda.is_finite()) {
            return Err(QError::domain("beta and lambda must be finite"));
        }
        if !(z0 >= 0.0 && z0.is_finite()) {
            return Err(QError::domain(format!("z0 must be nonnegative, got {z0}")));
        }
        // Γ_q(αk + β) ≤ 0 only for finitely many k
        let mut k = 0.0;
        while alpha * k + beta <= 0.0 {
            if is_nonpositive_integer(alpha * k + beta) {
                return Err(QError::Pole(alpha * k + beta));
            }
            k += 1.0;
        }
        Ok(MLDoubleParams {
            alpha,
            beta,
            lambda,
            z0,
        })
    }
}

/// Parameters `(α, m, l, λ, a, r)` of the generalized function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GMLParams {
    pub alpha: f64,
    pub m: f64,
    pub l: f64,
    pub lambda: f64,
    pub a: f64,
    pub r: u32,
}

impl GMLParams {
    /// Validates `α > 0`, `m > 0`, `a ≥ 0` and that no `Γ_q` argument in
    /// `c_k` hits a pole. Both `α(jm+l)+1` and `α(jm+l+1)+1` increase with
    /// `j`, so only the finitely many nonpositive ones need checking.
    pub fn new(alpha: f64, m: f64, l: f64, lambda: f64, a: f64, r: u32) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(QError::domain(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(QError::domain(format!("m must be positive, got {m}")));
        }
        if !(l.is_finite() && lambda.is_finite()) {
            return Err(QError::domain("l and lambda must be finite"));
        }
        if !(a >= 0.0 && a.is_finite()) {
            return Err(QError::domain(format!("a must be nonnegative, got {a}")));
        }
        let mut j = 0.0;
        loop {
            let num = alpha * (j * m + l) + 1.0;
            let den = num + alpha;
            if is_nonpositive_integer(num) {
                return Err(QError::Pole(num));
            }
            if is_nonpositive_integer(den) {
                return Err(QError::Pole(den));
            }
            if num > 0.0 {
                break;
            }
            j += 1.0;
        }
        Ok(GMLParams {
            alpha,
            m,
            l,
            lambda,
            a,
            r,
        })
    }

    pub(crate) fn numerator_arg(&self, j: usize) -> f64 {
        self.alpha * (j as f64 * self.m + self.l) + 1.0
    }

    /// `α(m-1)(αl+α)`: the coefficient of `-k(k-1)/2` in `e_k`.
    pub fn quadratic_rate(&self) -> f64 {
        self.alpha * (self.m - 1.0) * (self.alpha * self.l + self.alpha)
    }
}

/// `Σ_k λ^k (z - z₀)_q^{αk} / Γ_q(αk + β)`.
pub fn ml_double_eval(
    ctx: &QContext,
    p: &MLDoubleParams,
    z: f64,
) -> Result<(f64, TruncationReport)> {
    if !(z >= p.z0) {
        return Err(QError::domain(format!(
            "need z >= z0, got z = {z}, z0 = {}",
            p.z0
        )));
    }
    if z != p.z0 && !(z > 0.0) {
        return Err(QError::domain(format!("need z > 0, got {z}")));
    }
    let first = ln_q_gamma(ctx, p.beta)?;
    let leading = first.sign * (-first.ln_abs).exp();
    if p.lambda == 0.0 || z == p.z0 {
        return Ok((leading, TruncationReport::exact(1)));
    }
    let rho = p.lambda.abs() * ((1.0 - ctx.q()) * (z - p.z0)).powf(p.alpha).max(0.0);
    let rho = rho.max(p.lambda.abs() * ((1.0 - ctx.q()) * z).powf(p.alpha));
    let watch_growth = rho >= 1.0;
    let mut acc = SeriesAccumulator::starting_at(ctx, leading);
    let mut growth = GrowthMonitor::default();
    let ln_lambda = p.lambda.abs().ln();
    for k in 1.. {
        let kf = k as f64;
        let g = ln_q_gamma(ctx, p.alpha * kf + p.beta)?;
        let fp = q_factorial_power_log(ctx, z, p.z0, p.alpha * kf)?;
        let sign = g.sign
            * fp.sign
            * if p.lambda < 0.0 && k % 2 == 1 {
                -1.0
            } else {
                1.0
            };
        let ln_abs = kf * ln_lambda + fp.ln_abs - g.ln_abs;
        let term = SignedLog { sign, ln_abs }.value();
        if watch_growth {
            growth.observe(ln_abs);
            if growth.growing() {
                return Err(QError::Divergence {
                    terms: k,
                    run: growth.run(),
                });
            }
        }
        if !term.is_finite() {
            return Err(QError::Divergence {
                terms: k,
                run: growth.run(),
            });
        }
        if acc.push(term) {
            return Ok((acc.sum(), acc.report(true)));
        }
        if acc.exhausted() {
            return Err(acc.non_convergence());
        }
    }
    unreachable!()
}

/// `c_k = ∏_{j<k} Γ_q(α(jm+l)+1) / Γ_q(α(jm+l+1)+1)`; `c_0 = 1`.
pub fn gml_coefficient(ctx: &QContext, p: &GMLParams, k: usize) -> Result<f64> {
    let mut c = 1.0;
    for j in 0..k {
        let num = p.numerator_arg(j);
        c *= q_gamma_ratio(ctx, num, num + p.alpha)?;
    }
    Ok(c)
}

/// Exponent `e_k` of the prefactor `q^{e_k}` of the k-th term.
pub fn gml_prefactor_exponent(p: &GMLParams, k: usize) -> f64 {
    let k = k as f64;
    -k * p.alpha * (p.m - 1.0) * p.r as f64 - 0.5 * k * (k - 1.0) * p.quadratic_rate()
}

/// Asymptotic ratio of consecutive term magnitudes when the quadratic rate
/// vanishes: `|λ| (1-q)^α x^{αm} q^{-α(m-1)r}`. Diagnostic only.
pub fn gml_ratio_bound(ctx: &QContext, p: &GMLParams, x: f64) -> f64 {
    let q = ctx.q();
    p.lambda.abs()
        * (1.0 - q).powf(p.alpha)
        * x.powf(p.alpha * p.m)
        * q.powf(-p.alpha * (p.m - 1.0) * p.r as f64)
}

/// k-th term `λ^k q^{e_k} c_k (x - q^r a)_q^{αkm}` built from the public
/// pieces, in plain floating point.
pub fn gml_term(ctx: &QContext, p: &GMLParams, x: f64, k: usize) -> Result<f64> {
    let base = ctx.q().powi(p.r as i32) * p.a;
    Ok(p.lambda.powi(k as i32)
        * ctx.q().powf(gml_prefactor_exponent(p, k))
        * gml_coefficient(ctx, p, k)?
        * q_factorial_power(ctx, x, base, p.alpha * k as f64 * p.m)?)
}

/// Log-space term generator shared by evaluation and [`gml_terms`].
struct GmlTerms<'a> {
    ctx: &'a QContext,
    p: &'a GMLParams,
    x: f64,
    base: f64,
    k: usize,
    ln_c: f64,
    c_sign: f64,
}

impl<'a> GmlTerms<'a> {
    fn new(ctx: &'a QContext, p: &'a GMLParams, x: f64) -> Self {
        let base = ctx.q().powi(p.r as i32) * p.a;
        GmlTerms {
            ctx,
            p,
            x,
            base,
            k: 0,
            ln_c: 0.0,
            c_sign: 1.0,
        }
    }

    fn next_term(&mut self) -> Result<SignedLog> {
        let p = self.p;
        let num = p.numerator_arg(self.k);
        let ratio = q_gamma_ratio(self.ctx, num, num + p.alpha)?;
        self.c_sign *= ratio.signum();
        self.ln_c += ratio.abs().ln();
        self.k += 1;
        let k = self.k;
        let fp = q_factorial_power_log(self.ctx, self.x, self.base, p.alpha * k as f64 * p.m)?;
        if fp.is_zero() || ratio == 0.0 {
            return Ok(SignedLog::ZERO);
        }
        let lambda_sign = if p.lambda < 0.0 && k % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        Ok(SignedLog {
            sign: lambda_sign * self.c_sign * fp.sign,
            ln_abs: k as f64 * p.lambda.abs().ln()
                + gml_prefactor_exponent(p, k) * self.ctx.ln_q()
                + self.ln_c
                + fp.ln_abs,
        })
    }
}

/// First `k_max` terms (k = 1..=k_max) of the series as evaluated.
pub fn gml_terms(ctx: &QContext, p: &GMLParams, x: f64, k_max: usize) -> Result<Vec<f64>> {
    check_gml_point(p, x)?;
    let mut gen = GmlTerms::new(ctx, p, x);
    (0..k_max)
        .map(|_| gen.next_term().map(|t| t.value()))
        .collect()
}

fn check_gml_point(p: &GMLParams, x: f64) -> Result<()> {
    if !(x >= p.a && x > 0.0 && x.is_finite()) {
        return Err(QError::domain(format!(
            "need x >= a and x > 0, got x = {x}, a = {}",
            p.a
        )));
    }
    Ok(())
}

/// Generalized q-Mittag-Leffler function `E^r_{α,m,l}(λ, x - a)`.
pub fn gml_eval(
    ctx: &QContext,
    p: &GMLParams,
    x: f64,
    mode: SumMode,
) -> Result<(f64, TruncationReport)> {
    check_gml_point(p, x)?;
    if p.lambda == 0.0 {
        return Ok((1.0, TruncationReport::exact(1)));
    }
    let mut gen = GmlTerms::new(ctx, p, x);
    let mut acc = SeriesAccumulator::starting_at(ctx, 1.0);

    if let SumMode::Fixed(k_max) = mode {
        for _ in 0..k_max {
            acc.push(gen.next_term()?.value());
        }
        let mut rep = acc.report(false);
        rep.converged = k_max > 0 && rep.est_error <= ctx.threshold(acc.sum());
        return Ok((acc.sum(), rep));
    }

    let rate = p.quadratic_rate();
    // superexponential growth: the convergence rule cannot be trusted
    let divergent = rate > 1e-15;
    let watch_growth = divergent || (rate.abs() <= 1e-15 && gml_ratio_bound(ctx, p, x) >= 1.0);
    let mut growth = GrowthMonitor::default();
    let mut zero_run = 0;
    loop {
        let term = gen.next_term()?;
        let k = gen.k;
        if term.is_zero() {
            zero_run += 1;
            // (x - q^r a)_q^{αkm} = 0 kills every term
            if zero_run >= 3 {
                let _ = acc.push(0.0);
                return Ok((acc.sum(), acc.report(true)));
            }
        } else {
            zero_run = 0;
        }
        if watch_growth {
            growth.observe(term.ln_abs);
            if growth.growing() {
                return Err(QError::Divergence {
                    terms: k,
                    run: growth.run(),
                });
            }
        }
        let v = term.value();
        if !v.is_finite() {
            return Err(QError::Divergence {
                terms: k,
                run: growth.run(),
            });
        }
        let done = acc.push(v);
        if done && !divergent {
            return Ok((acc.sum(), acc.report(true)));
        }
        if divergent && k >= DIVERGENCE_HORIZON {
            return Err(QError::Divergence {
                terms: k,
                run: growth.run(),
            });
        }
        if acc.exhausted() {
            return Err(acc.non_convergence());
        }
    }
}
