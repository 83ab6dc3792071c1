//! Named, seeded property suites. Each case draws its parameters from a
//! ChaCha8 stream selected by `(seed, case)`, so any single case can be
//! replayed without running the ones before it.
//!
//! Suites pick their own `q` per case; the context passed in only supplies
//! the truncation policy.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::QContext;
use crate::error::{QError, Result};
use crate::fractional::{
    caputo_order, integral_of_caputo, power_rule_closed_form, riemann_q_integral_frac,
    taylor_remainder,
};
use crate::mittag::{gml_eval, ml_double_eval, GMLParams, MLDoubleParams, SumMode};
use crate::qarith::{ln_q_gamma, q_bracket, q_factorial_power, q_gamma};
use crate::qcalc::{
    nabla_q_derivative, q_integral, q_integral_from_zero, q_integral_tail, GridFunction, Upper,
};
use crate::solver::{
    closed_form_series, coefficient_residual, evaluate_series, numeric_residual,
    successive_approximation, IVPSpec,
};

/// Static description of a suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteDescriptor {
    pub name: &'static str,
    /// Phrase of the source text the suite checks.
    pub anchor: &'static str,
    pub tolerance: f64,
    /// How a case's error is measured.
    pub measure: &'static str,
    pub default_cases: usize,
}

const SCALED: &str = "absolute, divided by max(1, sum |c_j| t^j)";

static REGISTRY: [SuiteDescriptor; 14] = [
    SuiteDescriptor {
        name: "ftc",
        anchor: "By the fundamental theorem in q-calculus",
        tolerance: 1e-9,
        measure: SCALED,
        default_cases: 200,
    },
    SuiteDescriptor {
        name: "cfq",
        anchor: "if f is continuous at 0",
        tolerance: 1e-9,
        measure: SCALED,
        default_cases: 200,
    },
    SuiteDescriptor {
        name: "diff_under_integral",
        anchor: "the following identity will be helpful",
        tolerance: 1e-8,
        measure: "absolute, divided by max(1, |lhs|)",
        default_cases: 200,
    },
    SuiteDescriptor {
        name: "product_rule",
        anchor: "the following product rule is valid",
        tolerance: 1e-10,
        measure: "absolute, divided by max(1, S_f S_g) with S = sum |c_j| max(t,1)^j",
        default_cases: 200,
    },
    SuiteDescriptor {
        name: "lemma1_i",
        anchor: "properties of q-factorial functions",
        tolerance: 1e-10,
        measure: "relative",
        default_cases: 200,
    },
    SuiteDescriptor {
        name: "lemma1_ii",
        anchor: "properties of q-factorial functions",
        tolerance: 1e-10,
        measure: "relative",
        default_cases: 200,
    },
    SuiteDescriptor {
        name: "lemma1_iii",
        anchor: "q-factorial function with respect to t",
        tolerance: 1e-9,
        measure: "relative",
        default_cases: 200,
    },
    SuiteDescriptor {
        name: "lemma1_iv",
        anchor: "q-factorial function with respect to s",
        tolerance: 1e-9,
        measure: "relative",
        default_cases: 200,
    },
    SuiteDescriptor {
        name: "power_rule",
        anchor: "is essential to solve linear q-fractional equations",
        tolerance: 1e-8,
        measure: "relative",
        default_cases: 48,
    },
    SuiteDescriptor {
        name: "prop1",
        anchor: "f is defined in suitable domains",
        tolerance: 1e-8,
        measure: "absolute, max over 20 lattice points",
        default_cases: 50,
    },
    SuiteDescriptor {
        name: "remark_sp",
        anchor: "apart from a constant factor",
        tolerance: 1e-10,
        measure: "relative",
        default_cases: 81,
    },
    SuiteDescriptor {
        name: "solver_coeff",
        anchor: "The method of successive applications implies",
        tolerance: 1e-11,
        measure: "max(recurrence defect, 10 x iterate mismatch), both relative",
        default_cases: 144,
    },
    SuiteDescriptor {
        name: "solver_numeric",
        anchor: "Consider the q-Caputo difference equation",
        tolerance: 1e-8,
        measure: "absolute, divided by max(1, |y|)",
        default_cases: 12,
    },
    SuiteDescriptor {
        name: "ml_reduction",
        anchor: "then in accordance with",
        tolerance: 1e-12,
        measure: "relative",
        default_cases: 50,
    },
];

/// The fixed suite registry.
pub fn list_suites() -> &'static [SuiteDescriptor] {
    &REGISTRY
}

pub fn find_suite(name: &str) -> Result<&'static SuiteDescriptor> {
    REGISTRY
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| QError::UnknownSuite(name.to_string()))
}

/// A recorded case input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputValue {
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

/// Outcome of a single case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub case: usize,
    pub inputs: BTreeMap<String, InputValue>,
    /// `None` when the case raised an error instead of producing a number.
    pub error: Option<f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// A failing case with the command that reruns it alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseFailure {
    pub case: usize,
    pub inputs: BTreeMap<String, InputValue>,
    pub error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub replay: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub tolerance: f64,
    pub max_error: f64,
    pub passed: bool,
    /// Per-case pass flags in case order.
    pub case_passed: Vec<bool>,
    pub failures: Vec<CaseFailure>,
}

/// Options that change what a suite checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SuiteOptions {
    /// `prop1` only: normalize the Caputo derivative with the classical
    /// Gamma function instead of `Γ_q`. Expected to fail.
    pub classical_gamma: bool,
}

struct Case {
    rng: ChaCha8Rng,
    index: usize,
    inputs: BTreeMap<String, InputValue>,
    ctx: QContext,
}

impl Case {
    fn new(ctx: &QContext, seed: u64, index: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        Case {
            rng,
            index,
            inputs: BTreeMap::new(),
            ctx: *ctx,
        }
    }

    fn num(&mut self, name: &str, v: f64) -> f64 {
        self.inputs.insert(name.to_string(), InputValue::Number(v));
        v
    }

    fn list(&mut self, name: &str, v: Vec<f64>) -> Vec<f64> {
        self.inputs
            .insert(name.to_string(), InputValue::List(v.clone()));
        v
    }

    fn text(&mut self, name: &str, v: &str) {
        self.inputs
            .insert(name.to_string(), InputValue::Text(v.to_string()));
    }

    fn uniform(&mut self, name: &str, lo: f64, hi: f64) -> f64 {
        let v = self.rng.random_range(lo..hi);
        self.num(name, v)
    }

    fn int(&mut self, name: &str, lo: i32, hi_inclusive: i32) -> i32 {
        let v = self.rng.random_range(lo..=hi_inclusive);
        self.num(name, v as f64);
        v
    }

    /// Draws from `[lo, hi)` rejecting points within 1e-3 of any value in
    /// `avoid(x)` (pole exclusion).
    fn uniform_avoiding(
        &mut self,
        name: &str,
        lo: f64,
        hi: f64,
        avoid: impl Fn(f64) -> bool,
    ) -> f64 {
        loop {
            let v = self.rng.random_range(lo..hi);
            if !avoid(v) {
                return self.num(name, v);
            }
        }
    }

    /// Sets `q` for this case and returns the matching context.
    fn q(&mut self, q: f64) -> QContext {
        self.num("q", q);
        self.ctx = self.ctx.with_q(q).expect("suite q lies in (0,1)");
        self.ctx
    }

    fn random_q(&mut self) -> QContext {
        let q = self.rng.random_range(0.2..0.9);
        self.q(q)
    }

    fn polynomial(&mut self, name: &str, max_degree: usize) -> Vec<f64> {
        let deg = self.rng.random_range(0..=max_degree);
        let c: Vec<f64> = (0..=deg)
            .map(|_| self.rng.random_range(-1.0..1.0))
            .collect();
        self.list(name, c)
    }

    /// Grid point `q^n` with `n` uniform in `[lo, hi]`.
    fn grid_point(&mut self, q: f64, lo: i32, hi: i32) -> f64 {
        let n = self.int("n", lo, hi);
        q.powi(n)
    }
}

fn near_negative_integer(x: f64) -> bool {
    x < 0.5 && (x - x.round()).abs() < 1e-3
}

fn rel_err(got: f64, want: f64) -> f64 {
    let d = (got - want).abs();
    if d == 0.0 {
        0.0
    } else {
        d / want.abs()
    }
}

fn poly_scale(c: &[f64], t: f64) -> f64 {
    c.iter()
        .enumerate()
        .map(|(j, x)| x.abs() * t.abs().powi(j as i32))
        .sum::<f64>()
        .max(1.0)
}

fn poly_eval(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, x| acc * t + x)
}

/// `∇_q F(t)` by the definition, with `F` evaluated at `t` and `qt`.
fn nabla_of(q: f64, t: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    Ok((f(t)? - f(q * t)?) / ((1.0 - q) * t))
}

fn case_ftc(c: &mut Case) -> Result<f64> {
    let ctx = c.random_q();
    let q = ctx.q();
    let coeffs = c.polynomial("coeffs", 5);
    let t = c.grid_point(q, -3, 6);
    let f = GridFunction::polynomial(coeffs.clone());
    let d = nabla_of(q, t, |x| Ok(q_integral_from_zero(&ctx, &f, x)?.0))?;
    Ok((d - poly_eval(&coeffs, t)).abs() / poly_scale(&coeffs, t))
}

fn case_cfq(c: &mut Case) -> Result<f64> {
    let ctx = c.random_q();
    let q = ctx.q();
    let coeffs = c.polynomial("coeffs", 5);
    let t = c.grid_point(q, -3, 6);
    let f = GridFunction::polynomial(coeffs.clone());
    let inner = ctx;
    let g = GridFunction::try_new("nabla f", 0.0, move |s| nabla_q_derivative(&inner, &f, s));
    let (lhs, _) = q_integral_from_zero(&ctx, &g, t)?;
    let rhs = poly_eval(&coeffs, t) - coeffs[0];
    Ok((lhs - rhs).abs() / poly_scale(&coeffs, t))
}

/// Kernel `f(t, s) = w t² s`, both identities for moving the q-derivative
/// through an integral with a variable limit.
fn case_diff_under_integral(c: &mut Case) -> Result<f64> {
    let ctx = c.random_q();
    let q = ctx.q();
    let w = c.uniform("w", -2.0, 2.0);
    let t = c.grid_point(q, -2, 4);
    let below = c.int("lower_steps", 1, 8);
    let above = c.int("upper_steps", 1, 8);
    let a = if below == 8 { 0.0 } else { t * q.powi(below) };
    let b = t * q.powi(-above);
    c.num("a", a);
    c.num("b", b);
    let kernel = move |t: f64, s: f64| w * t * t * s;
    let section = move |t: f64| GridFunction::new("f(t,.)", 0.0, move |s| kernel(t, s));
    let d_kernel = move |t: f64| {
        GridFunction::new("nabla_t f(t,.)", 0.0, move |s| {
            (kernel(t, s) - kernel(q * t, s)) / ((1.0 - q) * t)
        })
    };

    // lower limit fixed
    let lhs = nabla_of(q, t, |x| Ok(q_integral(&ctx, &section(x), a, x)?.0))?;
    let rhs = q_integral(&ctx, &d_kernel(t), a, t)?.0 + kernel(q * t, t);
    let e1 = (lhs - rhs).abs() / lhs.abs().max(1.0);

    // upper limit fixed
    let lhs = nabla_of(q, t, |x| {
        Ok(q_integral_tail(&ctx, &section(x), x, Upper::Finite(b))?.0)
    })?;
    let rhs = q_integral_tail(&ctx, &d_kernel(t), q * t, Upper::Finite(b))?.0 - kernel(t, t);
    let e2 = (lhs - rhs).abs() / lhs.abs().max(1.0);
    Ok(e1.max(e2))
}

fn case_product_rule(c: &mut Case) -> Result<f64> {
    let ctx = c.random_q();
    let q = ctx.q();
    let fc = c.polynomial("f", 4);
    let gc = c.polynomial("g", 4);
    let t = c.grid_point(q, -3, 6);
    let f = GridFunction::polynomial(fc.clone());
    let g = GridFunction::polynomial(gc.clone());
    let (f2, g2) = (fc.clone(), gc.clone());
    let fg = GridFunction::new("fg", 0.0, move |x| poly_eval(&f2, x) * poly_eval(&g2, x));
    let lhs = nabla_q_derivative(&ctx, &fg, t)?;
    let rhs = f.eval(q * t)? * nabla_q_derivative(&ctx, &g, t)?
        + nabla_q_derivative(&ctx, &f, t)? * g.eval(t)?;
    let scale = (poly_scale(&fc, t.max(1.0)) * poly_scale(&gc, t.max(1.0))).max(1.0);
    Ok((lhs - rhs).abs() / scale)
}

/// `s = t u` with `u < q^{1.5}` keeps every factorial power below in its
/// convergent regime for exponents above -1.5.
fn factorial_pair(c: &mut Case, q: f64) -> (f64, f64) {
    let t = c.uniform("t", 0.1, 10.0);
    let u = c.uniform("u", 0.0, 1.0) * q.powf(1.5);
    (t, t * u)
}

fn case_lemma1_i(c: &mut Case) -> Result<f64> {
    let ctx = c.random_q();
    let q = ctx.q();
    let beta = c.uniform_avoiding("beta", -1.5, 2.5, near_negative_integer);
    let gamma = c.uniform_avoiding("gamma", -1.5, 2.5, |g| near_negative_integer(g + beta));
    let (t, s) = factorial_pair(c, q);
    let lhs = q_factorial_power(&ctx, t, s, beta + gamma)?;
    let rhs =
        q_factorial_power(&ctx, t, s, beta)? * q_factorial_power(&ctx, t, q.powf(beta) * s, gamma)?;
    Ok(rel_err(rhs, lhs))
}

fn case_lemma1_ii(c: &mut Case) -> Result<f64> {
    let ctx = c.random_q();
    let q = ctx.q();
    let beta = c.uniform_avoiding("beta", -1.5, 2.5, near_negative_integer);
    let scale = c.uniform("scale", 0.1, 10.0);
    let (t, s) = factorial_pair(c, q);
    let lhs = q_factorial_power(&ctx, scale * t, scale * s, beta)?;
    let rhs = scale.powf(beta) * q_factorial_power(&ctx, t, s, beta)?;
    Ok(rel_err(lhs, rhs))
}

fn case_lemma1_iii(c: &mut Case) -> Result<f64> {
    let ctx = c.random_q();
    let q = ctx.q();
    let alpha = c.uniform("alpha", 0.2, 2.5);
    let t = c.grid_point(q, -2, 4);
    let j = c.int("j", 1, 6);
    let s = t * q.powi(j);
    let lhs = nabla_of(q, t, |x| q_factorial_power(&ctx, x, s, alpha))?;
    let rhs = q_bracket(&ctx, alpha) * q_factorial_power(&ctx, t, s, alpha - 1.0)?;
    Ok(rel_err(lhs, rhs))
}

fn case_lemma1_iv(c: &mut Case) -> Result<f64> {
    let ctx = c.random_q();
    let q = ctx.q();
    let alpha = c.uniform("alpha", 0.2, 2.5);
    let t = c.grid_point(q, -2, 4);
    let j = c.int("j", 1, 6);
    let s = t * q.powi(j);
    let lhs = nabla_of(q, s, |x| q_factorial_power(&ctx, t, x, alpha))?;
    let rhs = -q_bracket(&ctx, alpha) * q_factorial_power(&ctx, t, q * s, alpha - 1.0)?;
    Ok(rel_err(lhs, rhs))
}

const POWER_Q: [f64; 3] = [0.3, 0.5, 0.8];
const POWER_ALPHA: [f64; 4] = [0.3, 0.5, 1.2, 2.5];
const POWER_MU: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

/// The first 48 cases walk the fixed grid at `a = 0, t = 1`; later cases
/// are random, with `a` either 0 or on the lattice below `t`.
fn case_power_rule(c: &mut Case) -> Result<f64> {
    let (ctx, alpha, mu, a, t);
    if c.index < 48 {
        let i = c.index;
        ctx = c.q(POWER_Q[i / 16]);
        alpha = c.num("alpha", POWER_ALPHA[(i / 4) % 4]);
        mu = c.num("mu", POWER_MU[i % 4]);
        a = c.num("a", 0.0);
        t = c.num("t", 1.0);
    } else {
        ctx = c.random_q();
        alpha = c.uniform("alpha", 0.1, 3.0);
        mu = c.uniform("mu", 0.0, 3.0);
        t = c.uniform("t", 0.5, 2.0);
        let k = c.int("lattice_steps", 1, 12);
        a = c.num("a", if k == 12 { 0.0 } else { t * ctx.q().powi(k) });
    }
    let f = GridFunction::q_power(&ctx, a, mu);
    let (quad, _) = riemann_q_integral_frac(&ctx, &f, a, alpha, t)?;
    let closed =
        power_rule_closed_form(&ctx, alpha, mu)? * q_factorial_power(&ctx, t, a, mu + alpha)?;
    Ok(rel_err(quad, closed))
}

const PROP1_ALPHA: [f64; 5] = [0.3, 0.5, 0.9, 1.5, 2.5];

/// Points `a q^{-j}`, `j = 1..=20`, with `a = q^{20}`. `q` stays in
/// `[0.6, 0.9)`: for smaller `q` the lattice near `a` is so fine that the
/// `n`-th differences lose all accuracy to rounding.
fn case_prop1(c: &mut Case, classical: bool) -> Result<f64> {
    let q = c.rng.random_range(0.6..0.9);
    let ctx = c.q(q);
    let alpha = c.num("alpha", PROP1_ALPHA[c.index % PROP1_ALPHA.len()]);
    let n = caputo_order(alpha);
    let a = c.num("a", q.powi(20));
    let f = if c.rng.random_bool(0.5) {
        let coeffs = c.polynomial("poly", 4);
        GridFunction::polynomial(coeffs)
    } else {
        // base a q^n keeps the samples below a needed by ∇^k f(a) in range;
        // μ ≥ n keeps ∇^n f bounded near a, so rounding stays small
        let mu = c.uniform("qpow", n as f64, n as f64 + 2.0);
        let base = c.num("qpow_base", a * q.powi(n as i32));
        GridFunction::q_power(&ctx, base, mu)
    };
    let factor = if classical {
        c.text("gamma", "classical");
        let nu = n as f64 - alpha;
        q_gamma(&ctx, nu)? / libm::tgamma(nu)
    } else {
        1.0
    };
    let mut worst: f64 = 0.0;
    for j in 1..=20 {
        let t = a * q.powi(-j);
        let lhs = factor * integral_of_caputo(&ctx, &f, a, alpha, t)?;
        let rhs = taylor_remainder(&ctx, &f, a, alpha, t)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

const SP_Q: [f64; 3] = [0.3, 0.5, 0.8];
const SP_ALPHA: [f64; 3] = [0.4, 0.5, 1.0];
const SP_L: [f64; 3] = [0.0, 0.5, 1.0];

fn case_remark_sp(c: &mut Case) -> Result<f64> {
    let i = c.index % 81;
    let ctx = c.q(SP_Q[i / 27]);
    let q = ctx.q();
    let alpha = c.num("alpha", SP_ALPHA[(i / 9) % 3]);
    let l = c.num("l", SP_L[(i / 3) % 3]);
    let x = c.num("x", [q * q, q, 1.0][i % 3]);
    let bound = 0.5 / (x.powf(alpha) * (1.0 - q).powf(alpha));
    let lambda = c.uniform("lambda", -bound, bound);
    let p = GMLParams::new(alpha, 1.0, l, lambda, 0.0, 0)?;
    let (g, _) = gml_eval(&ctx, &p, x, SumMode::Adaptive)?;
    let ml = MLDoubleParams::new(alpha, alpha * l + 1.0, lambda, 0.0)?;
    let (e, _) = ml_double_eval(&ctx, &ml, x)?;
    Ok(rel_err(g, q_gamma(&ctx, alpha * l + 1.0)? * e))
}

const COEFF_Q: [f64; 3] = [0.3, 0.5, 0.8];
const COEFF_ALPHA: [f64; 3] = [0.3, 0.5, 0.7];
const COEFF_BETA: [f64; 4] = [-0.2, 0.0, 0.5, 1.0];
const COEFF_LAMBDA: [f64; 4] = [0.5, -0.5, 2.0, -2.0];

/// Walks the 144-point sweep; `b` is random.
fn case_solver_coeff(c: &mut Case) -> Result<f64> {
    let i = c.index % 144;
    let ctx = c.q(COEFF_Q[i / 48]);
    let q = ctx.q();
    let alpha = c.num("alpha", COEFF_ALPHA[(i / 16) % 3]);
    let beta = c.num("beta", COEFF_BETA[(i / 4) % 4]);
    let lambda = c.num("lambda", COEFF_LAMBDA[i % 4]);
    let b = c.uniform("b", 0.5, 2.0) * if c.rng.random_bool(0.5) { 1.0 } else { -1.0 };
    c.num("b", b);
    let spec = IVPSpec::new(alpha, beta, lambda, 0.0, vec![b])?;
    let closed = closed_form_series(&ctx, &spec, 40)?;
    let recurrence = coefficient_residual(&ctx, &closed, &spec)?;
    let mut mismatch: f64 = 0.0;
    for m in 1..=12 {
        let it = successive_approximation(&ctx, &spec, m)?;
        let want = closed.truncated(m as f64 * (alpha + beta));
        if it.terms.len() != want.terms.len() {
            return Err(QError::domain(format!(
                "iterate {m} has {} terms, expected {}",
                it.terms.len(),
                want.terms.len()
            )));
        }
        for (x, y) in it.terms.iter().zip(&want.terms) {
            mismatch = mismatch.max(x.relative_difference(y, q));
        }
    }
    Ok(recurrence.max(10.0 * mismatch))
}

/// Cases 0 and 1 are the fixed convergent problems at `q = 0.5`; later
/// cases draw `β ∈ (-α/2, 0]` and small `λ`. Points `x ∈ {q², q, 1}`.
fn case_solver_numeric(c: &mut Case) -> Result<f64> {
    let (ctx, alpha, beta, lambda, b);
    match c.index {
        0 | 1 => {
            ctx = c.q(0.5);
            alpha = c.num("alpha", 0.5);
            beta = c.num("beta", if c.index == 0 { 0.0 } else { -0.25 });
            lambda = c.num("lambda", 0.2);
            b = c.num("b", 1.0);
        }
        _ => {
            let q = c.rng.random_range(0.3..0.8);
            ctx = c.q(q);
            alpha = c.uniform("alpha", 0.3, 0.9);
            beta = if c.rng.random_bool(0.3) {
                c.num("beta", 0.0)
            } else {
                c.uniform("beta", -alpha / 2.0, 0.0)
            };
            lambda = c.uniform("lambda", -0.5, 0.5);
            b = c.uniform("b", -2.0, 2.0);
        }
    }
    let q = ctx.q();
    let spec = IVPSpec::new(alpha, beta, lambda, 0.0, vec![b])?;
    let s = closed_form_series(&ctx, &spec, 120)?;
    let mut worst: f64 = 0.0;
    for x in [q * q, q, 1.0] {
        let (y, _) = evaluate_series(&ctx, &s, x, SumMode::Adaptive)?;
        worst = worst.max(numeric_residual(&ctx, &s, &spec, x)? / y.abs().max(1.0));
        if beta == 0.0 {
            let ml = MLDoubleParams::new(alpha, 1.0, lambda, 0.0)?;
            let (e, _) = ml_double_eval(&ctx, &ml, x)?;
            worst = worst.max((y - b * e).abs() / y.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// β = 0 collapses the solution to `b E_α(λ, x-a)`; at `α = 1/2` the
/// generalized parameters are `(1+2β, 2β)`.
fn case_ml_reduction(c: &mut Case) -> Result<f64> {
    let ctx = c.random_q();
    let alpha = c.uniform_avoiding("alpha", 0.1, 2.9, |a| (a - a.round()).abs() < 1e-3);
    let lambda = c.uniform("lambda", -2.0, 2.0);
    let n = caputo_order(alpha);
    let b0 = c.uniform("b", -2.0, 2.0);
    let mut b = vec![0.0; n];
    b[0] = b0;
    let spec = IVPSpec::new(alpha, 0.0, lambda, 0.0, b)?;
    let s = closed_form_series(&ctx, &spec, 40)?;
    let mut worst: f64 = 0.0;
    for k in 0..=40 {
        let mu = k as f64 * alpha;
        let got = s.coefficient_of(mu).map_or(0.0, |t| t.value(ctx.q()));
        let g = ln_q_gamma(&ctx, mu + 1.0)?;
        let want = b0 * lambda.powi(k) * g.sign * (-g.ln_abs).exp();
        worst = worst.max(rel_err(got, want));
    }
    let beta = c.uniform("half_beta", -0.45, 2.0);
    let half = IVPSpec::new(0.5, beta, lambda, 0.0, vec![b0])?;
    let p = half.solution_params(0)?;
    worst = worst
        .max(rel_err(p.m, 1.0 + 2.0 * beta))
        .max((p.l - 2.0 * beta).abs());
    Ok(worst)
}

fn run_one(
    ctx: &QContext,
    desc: &SuiteDescriptor,
    seed: u64,
    index: usize,
    opts: SuiteOptions,
) -> CaseOutcome {
    let mut c = Case::new(ctx, seed, index);
    let res = match desc.name {
        "ftc" => case_ftc(&mut c),
        "cfq" => case_cfq(&mut c),
        "diff_under_integral" => case_diff_under_integral(&mut c),
        "product_rule" => case_product_rule(&mut c),
        "lemma1_i" => case_lemma1_i(&mut c),
        "lemma1_ii" => case_lemma1_ii(&mut c),
        "lemma1_iii" => case_lemma1_iii(&mut c),
        "lemma1_iv" => case_lemma1_iv(&mut c),
        "power_rule" => case_power_rule(&mut c),
        "prop1" => case_prop1(&mut c, opts.classical_gamma),
        "remark_sp" => case_remark_sp(&mut c),
        "solver_coeff" => case_solver_coeff(&mut c),
        "solver_numeric" => case_solver_numeric(&mut c),
        "ml_reduction" => case_ml_reduction(&mut c),
        other => Err(QError::UnknownSuite(other.to_string())),
    };
    match res {
        Ok(e) => CaseOutcome {
            case: index,
            inputs: c.inputs,
            error: Some(e),
            passed: e <= desc.tolerance,
            message: None,
        },
        Err(err) => CaseOutcome {
            case: index,
            inputs: c.inputs,
            error: None,
            passed: false,
            message: Some(err.to_string()),
        },
    }
}

/// Runs one case of a suite by index.
pub fn run_case(
    ctx: &QContext,
    name: &str,
    seed: u64,
    case: usize,
    opts: SuiteOptions,
) -> Result<CaseOutcome> {
    let desc = find_suite(name)?;
    Ok(run_one(ctx, desc, seed, case, opts))
}

fn replay_command(
    ctx: &QContext,
    name: &str,
    seed: u64,
    case: usize,
    opts: SuiteOptions,
) -> String {
    let mut cmd = format!(
        "qfrac --tol {:e} --tol-rel {:e} --max-terms {} verify --suite {name} --seed {seed} --case {case}",
        ctx.tol_abs(),
        ctx.tol_rel(),
        ctx.max_terms()
    );
    if opts.classical_gamma {
        cmd.push_str(" --classical-gamma");
    }
    cmd
}

fn assemble(
    ctx: &QContext,
    desc: &SuiteDescriptor,
    seed: u64,
    outcomes: Vec<CaseOutcome>,
    opts: SuiteOptions,
) -> SuiteReport {
    let max_error = outcomes.iter().filter_map(|o| o.error).fold(0.0, f64::max);
    let case_passed: Vec<bool> = outcomes.iter().map(|o| o.passed).collect();
    let failures = outcomes
        .into_iter()
        .filter(|o| !o.passed)
        .map(|o| CaseFailure {
            case: o.case,
            replay: replay_command(ctx, desc.name, seed, o.case, opts),
            inputs: o.inputs,
            error: o.error,
            message: o.message,
        })
        .collect::<Vec<_>>();
    SuiteReport {
        suite: desc.name.to_string(),
        seed,
        cases: case_passed.len(),
        tolerance: desc.tolerance,
        max_error,
        passed: failures.is_empty(),
        case_passed,
        failures,
    }
}

/// Runs cases `0..cases` of a suite.
pub fn run_suite(
    ctx: &QContext,
    name: &str,
    seed: u64,
    cases: usize,
    opts: SuiteOptions,
) -> Result<SuiteReport> {
    let desc = find_suite(name)?;
    if cases == 0 {
        return Err(QError::domain("cases must be at least 1"));
    }
    let outcomes = (0..cases)
        .map(|i| run_one(ctx, desc, seed, i, opts))
        .collect();
    Ok(assemble(ctx, desc, seed, outcomes, opts))
}

/// Report for a single replayed case.
pub fn run_single(
    ctx: &QContext,
    name: &str,
    seed: u64,
    case: usize,
    opts: SuiteOptions,
) -> Result<SuiteReport> {
    let desc = find_suite(name)?;
    let outcome = run_one(ctx, desc, seed, case, opts);
    Ok(assemble(ctx, desc, seed, vec![outcome], opts))
}
