//! Scalar q-arithmetic: q-brackets, q-Pochhammer products, the Jackson
//! q-Gamma function and q-factorial powers `(t - s)_q^γ`.

use crate::context::{QContext, TruncationReport, SMALL_RUN};
use crate::error::{QError, Result};

/// Tolerance used when deciding whether a real number is an integer.
pub(crate) const INTEGER_TOL: f64 = 1e-12;

/// Returns `Some(n)` when `x` is within [`INTEGER_TOL`] (relative for large
/// magnitudes) of the integer `n`.
pub(crate) fn near_integer(x: f64) -> Option<i64> {
    let r = x.round();
    if (x - r).abs() <= INTEGER_TOL * r.abs().max(1.0) {
        Some(r as i64)
    } else {
        None
    }
}

pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    matches!(near_integer(x), Some(n) if n <= 0)
}

/// `log_q(ratio)` rounded to an integer when it is one; used to detect
/// points lying on the same q-lattice.
pub(crate) fn lattice_offset(ctx: &QContext, ratio: f64) -> Option<i64> {
    if !(ratio > 0.0) {
        return None;
    }
    near_integer(ratio.ln() / ctx.ln_q())
}

/// `[x]_q = (1 - q^x) / (1 - q)`.
pub fn q_bracket(ctx: &QContext, x: f64) -> f64 {
    let q = ctx.q();
    (1.0 - q.powf(x)) / (1.0 - q)
}

/// Length of a q-Pochhammer product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochhammerLen {
    Finite(usize),
    Infinite,
}

/// Multiplies `factor(i)` for `i = 0, 1, ...` until it stays within
/// `tol_abs * (1 - q)` of one for `SMALL_RUN` consecutive indices. The
/// `(1 - q)` scaling bounds the geometric tail of the omitted factors.
pub(crate) fn tail_product(
    ctx: &QContext,
    mut factor: impl FnMut(usize) -> Result<f64>,
) -> Result<(f64, TruncationReport)> {
    let threshold = ctx.tol_abs() * (1.0 - ctx.q());
    let mut prod = 1.0;
    let mut small = 0;
    let mut last = f64::INFINITY;
    for i in 0..ctx.max_terms() {
        let f = factor(i)?;
        prod *= f;
        last = (f - 1.0).abs();
        if last <= threshold {
            small += 1;
            if small >= SMALL_RUN {
                return Ok((
                    prod,
                    TruncationReport {
                        terms_used: i + 1,
                        est_error: last,
                        converged: true,
                    },
                ));
            }
        } else {
            small = 0;
        }
    }
    Err(QError::NonConvergence {
        terms: ctx.max_terms(),
        est_error: last,
    })
}

/// `(z; q)_n = ∏_{i<n} (1 - z q^i)`, finite or infinite.
pub fn q_pochhammer(ctx: &QContext, z: f64, n: PochhammerLen) -> Result<(f64, TruncationReport)> {
    let q = ctx.q();
    match n {
        PochhammerLen::Finite(n) => {
            let mut p = 1.0;
            let mut zq = z;
            for _ in 0..n {
                p *= 1.0 - zq;
                zq *= q;
            }
            Ok((p, TruncationReport::exact(n)))
        }
        PochhammerLen::Infinite => {
            let mut zq = z;
            tail_product(ctx, |_| {
                let f = 1.0 - zq;
                zq *= q;
                Ok(f)
            })
        }
    }
}

fn check_pole(x: f64) -> Result<()> {
    if is_nonpositive_integer(x) {
        Err(QError::Pole(x))
    } else {
        Ok(())
    }
}

/// Jackson q-Gamma on `[1, 2)` straight from the product formula.
fn q_gamma_base(ctx: &QContext, x: f64) -> Result<f64> {
    let q = ctx.q();
    let mut qi = q;
    let mut qx = q.powf(x);
    let (prod, _) = tail_product(ctx, |_| {
        let f = (1.0 - qi) / (1.0 - qx);
        qi *= q;
        qx *= q;
        Ok(f)
    })?;
    Ok((1.0 - q).powf(1.0 - x) * prod)
}

/// Jackson q-Gamma `Γ_q(x) = (1-q)^{1-x} (q;q)_∞ / (q^x;q)_∞`.
///
/// The argument is shifted into `[1, 2)` with the functional equation
/// `Γ_q(x+1) = [x]_q Γ_q(x)`, so integer arguments are exact products of
/// q-brackets.
pub fn q_gamma(ctx: &QContext, x: f64) -> Result<f64> {
    check_pole(x)?;
    if !x.is_finite() {
        return Err(QError::domain(format!(
            "q_gamma argument must be finite, got {x}"
        )));
    }
    if let Some(n) = near_integer(x) {
        // n >= 1 here
        let mut g = 1.0;
        for k in 1..n {
            g *= q_bracket(ctx, k as f64);
        }
        return Ok(g);
    }
    let base = x - x.floor() + 1.0;
    let mut g = q_gamma_base(ctx, base)?;
    let mut y = base;
    while y + 0.5 < x {
        g *= q_bracket(ctx, y);
        y += 1.0;
    }
    while y - 0.5 > x {
        y -= 1.0;
        g /= q_bracket(ctx, y);
    }
    Ok(g)
}

/// `ln|Γ_q(x)|` with its sign, using the same argument reduction as
/// [`q_gamma`] but summing logarithms, so it never overflows.
pub fn ln_q_gamma(ctx: &QContext, x: f64) -> Result<SignedLog> {
    check_pole(x)?;
    if !x.is_finite() {
        return Err(QError::domain(format!(
            "q_gamma argument must be finite, got {x}"
        )));
    }
    let mut sign = 1.0;
    let mut ln_abs = 0.0;
    let mut add = |b: f64, inverse: bool| {
        sign *= b.signum();
        if inverse {
            ln_abs -= b.abs().ln();
        } else {
            ln_abs += b.abs().ln();
        }
    };
    if let Some(n) = near_integer(x) {
        for k in 1..n {
            add(q_bracket(ctx, k as f64), false);
        }
        return Ok(SignedLog { sign, ln_abs });
    }
    let base = x - x.floor() + 1.0;
    let g = q_gamma_base(ctx, base)?;
    add(g, false);
    let mut y = base;
    while y + 0.5 < x {
        add(q_bracket(ctx, y), false);
        y += 1.0;
    }
    while y - 0.5 > x {
        y -= 1.0;
        add(q_bracket(ctx, y), true);
    }
    Ok(SignedLog { sign, ln_abs })
}

/// `Γ_q(x) / Γ_q(y)` as a single merged product
/// `(1-q)^{y-x} ∏ (1 - q^{y+i}) / (1 - q^{x+i})`; stays finite where the
/// individual values overflow.
pub fn q_gamma_ratio(ctx: &QContext, x: f64, y: f64) -> Result<f64> {
    check_pole(x)?;
    check_pole(y)?;
    let q = ctx.q();
    let mut qx = q.powf(x);
    let mut qy = q.powf(y);
    let (prod, _) = tail_product(ctx, |_| {
        let f = (1.0 - qy) / (1.0 - qx);
        qx *= q;
        qy *= q;
        Ok(f)
    })?;
    Ok((1.0 - q).powf(y - x) * prod)
}

/// A real number carried as `sign * exp(ln_abs)`; `sign == 0` is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0.0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                sign: v.signum(),
                ln_abs: v.abs().ln(),
            }
        }
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }
}

enum FactorialPower {
    Zero,
    /// Finite product for a nonnegative integer exponent.
    Finite {
        value: f64,
        log: SignedLog,
    },
    /// `t^γ * product`.
    Scaled {
        t: f64,
        gamma: f64,
        product: f64,
    },
}

fn factorial_power_parts(ctx: &QContext, t: f64, s: f64, gamma: f64) -> Result<FactorialPower> {
    if !(t.is_finite() && s.is_finite() && gamma.is_finite()) {
        return Err(QError::domain("q-factorial power needs finite arguments"));
    }
    let q = ctx.q();
    if let Some(n) = near_integer(gamma).filter(|&n| n >= 0) {
        let mut value = 1.0;
        let mut ln_abs = 0.0;
        let mut sign = 1.0;
        let mut qi = 1.0;
        for _ in 0..n {
            let f = t - qi * s;
            value *= f;
            if f == 0.0 {
                return Ok(FactorialPower::Zero);
            }
            sign *= f.signum();
            ln_abs += f.abs().ln();
            qi *= q;
        }
        return Ok(FactorialPower::Finite {
            value,
            log: SignedLog { sign, ln_abs },
        });
    }
    if !(t > 0.0) {
        return Err(QError::domain(format!(
            "(t - s)_q^γ with non-integer γ = {gamma} needs t > 0, got t = {t}"
        )));
    }
    let ratio = s / t;
    if ratio >= 1.0 {
        // (t - s)_q^γ vanishes when s = t q^{-j}: the numerator factor i = j is zero.
        return match lattice_offset(ctx, ratio) {
            Some(j) if j <= 0 => Ok(FactorialPower::Zero),
            _ => Err(QError::domain(format!(
                "(t - s)_q^γ with non-integer γ = {gamma} needs s/t < 1 or s/t on the lattice q^-j, got s/t = {ratio}"
            ))),
        };
    }
    let product = infinite_product_part(ctx, ratio, gamma)?;
    Ok(FactorialPower::Scaled { t, gamma, product })
}

/// `∏_{i≥0} (1 - r q^i) / (1 - r q^{i+γ})` for `r < 1`.
fn infinite_product_part(ctx: &QContext, ratio: f64, gamma: f64) -> Result<f64> {
    if ratio == 0.0 {
        return Ok(1.0);
    }
    let q = ctx.q();
    let mut qi = 1.0;
    let qg = q.powf(gamma);
    let (product, _) = tail_product(ctx, |_| {
        let den = 1.0 - ratio * qi * qg;
        if den.abs() <= 1e-14 {
            return Err(QError::Pole(gamma));
        }
        let f = (1.0 - ratio * qi) / den;
        qi *= q;
        Ok(f)
    })?;
    Ok(product)
}

/// `(t - s)_q^γ` through the infinite-product form only, whatever `γ` is.
/// Kept separate so the finite-product path can be checked against it.
pub fn q_factorial_power_infinite(ctx: &QContext, t: f64, s: f64, gamma: f64) -> Result<f64> {
    if !(t > 0.0 && s / t < 1.0) {
        return Err(QError::domain(format!(
            "infinite-product form needs t > 0 and s/t < 1, got t = {t}, s = {s}"
        )));
    }
    Ok(t.powf(gamma) * infinite_product_part(ctx, s / t, gamma)?)
}

/// q-factorial power `(t - s)_q^γ`.
///
/// Nonnegative integer `γ` uses `∏_{i<γ} (t - q^i s)`; every other exponent
/// uses `t^γ ∏_{i≥0} (1 - (s/t) q^i) / (1 - (s/t) q^{i+γ})`, which needs
/// `t > 0` and `s/t < 1`. Points `s = t q^{-j}` (j ≥ 0) give zero.
pub fn q_factorial_power(ctx: &QContext, t: f64, s: f64, gamma: f64) -> Result<f64> {
    Ok(match factorial_power_parts(ctx, t, s, gamma)? {
        FactorialPower::Zero => 0.0,
        FactorialPower::Finite { value, .. } => value,
        FactorialPower::Scaled { t, gamma, product } => t.powf(gamma) * product,
    })
}

/// `(t - s)_q^γ` as sign and log-magnitude, for series whose terms leave
/// the f64 range.
pub fn q_factorial_power_log(ctx: &QContext, t: f64, s: f64, gamma: f64) -> Result<SignedLog> {
    Ok(match factorial_power_parts(ctx, t, s, gamma)? {
        FactorialPower::Zero => SignedLog::ZERO,
        FactorialPower::Finite { log, .. } => log,
        FactorialPower::Scaled { t, gamma, product } => {
            if product == 0.0 {
                SignedLog::ZERO
            } else {
                SignedLog {
                    sign: product.signum(),
                    ln_abs: gamma * t.ln() + product.abs().ln(),
                }
            }
        }
    })
}
