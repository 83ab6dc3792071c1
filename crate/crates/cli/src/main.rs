//! `qfrac`: evaluate q-fractional operators and q-Mittag-Leffler functions,
//! solve linear Caputo q-fractional problems, run verification suites.
//!
//! Exit codes: 0 success, 1 invalid input, 2 convergence or divergence
//! failure, 3 verification failure.

mod args;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qfrac_core::props::find_suite;
use qfrac_core::{
    caputo_q_derivative, closed_form_series, evaluate_series, gml_eval, list_suites,
    ml_double_eval, numeric_residual, q_factorial_power, q_gamma, q_integral,
    riemann_q_integral_frac, run_single, run_suite, GMLParams, GridFunction, IVPSpec,
    MLDoubleParams, QContext, QError, SuiteOptions, SuiteReport, SumMode, TruncationReport,
};
use serde_json::json;

use args::{Cli, Command, EvalCommand, FunctionArgs, SolveArgs, VerifyArgs};
use output::Output;

enum Failure {
    Invalid(String),
    Numeric(String),
    Suite,
}

impl From<QError> for Failure {
    fn from(e: QError) -> Self {
        match e {
            QError::NonConvergence { .. } | QError::Divergence { .. } => {
                Failure::Numeric(e.to_string())
            }
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let mut out = Output::new(cli.format);
    let code = match run(&cli, &mut out) {
        Ok(()) => 0,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Suite) => 3,
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let _ = lock.write_all(out.text().as_bytes());
    let _ = lock.flush();
    ExitCode::from(code)
}

fn context(cli: &Cli) -> CliResult<QContext> {
    QContext::with_policy(cli.q, cli.tol, cli.tol_rel, cli.max_terms)
        .map_err(|e| Failure::Invalid(format!("{e} (flags --q, --tol, --tol-rel, --max-terms)")))
}

fn run(cli: &Cli, out: &mut Output) -> CliResult<()> {
    let ctx = context(cli)?;
    match &cli.command {
        Command::Eval { which } => eval(&ctx, which, out),
        Command::Solve(a) => solve(&ctx, a, out),
        Command::Verify(a) => verify(&ctx, a, out),
    }
}

fn require(ok: bool, flag: &str, constraint: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Invalid(format!(
            "--{flag} must satisfy {constraint}"
        )))
    }
}

fn function(ctx: &QContext, f: &FunctionArgs, a: f64) -> CliResult<GridFunction> {
    match (&f.poly, f.qpow) {
        (Some(c), None) => Ok(GridFunction::polynomial(c.clone())),
        (None, Some(mu)) => Ok(GridFunction::q_power(ctx, a, mu)),
        _ => Err(Failure::Invalid(
            "exactly one of --poly or --qpow is required".into(),
        )),
    }
}

fn eval(ctx: &QContext, which: &EvalCommand, out: &mut Output) -> CliResult<()> {
    let (name, params, value, report): (&str, serde_json::Value, f64, TruncationReport) =
        match which {
            EvalCommand::Gamma { x } => (
                "eval gamma",
                json!({ "q": ctx.q(), "x": x }),
                q_gamma(ctx, *x)?,
                TruncationReport::exact(1),
            ),
            EvalCommand::Qfact { t, s, gamma } => (
                "eval qfact",
                json!({ "q": ctx.q(), "t": t, "s": s, "gamma": gamma }),
                q_factorial_power(ctx, *t, *s, *gamma)?,
                TruncationReport::exact(1),
            ),
            EvalCommand::Ml {
                alpha,
                beta,
                lambda,
                z,
                z0,
            } => {
                let p = MLDoubleParams::new(*alpha, *beta, *lambda, *z0)?;
                let (v, rep) = ml_double_eval(ctx, &p, *z)?;
                let params = json!({ "q": ctx.q(), "alpha": alpha, "beta": beta, "lambda": lambda, "z": z, "z0": z0 });
                ("eval ml", params, v, rep)
            }
            EvalCommand::Gml {
                alpha,
                m,
                l,
                lambda,
                a,
                x,
                r,
                terms,
            } => {
                let p = GMLParams::new(*alpha, *m, *l, *lambda, *a, *r)?;
                let mode = terms.map_or(SumMode::Adaptive, SumMode::Fixed);
                let (v, rep) = gml_eval(ctx, &p, *x, mode)?;
                let params = json!({
                    "q": ctx.q(), "alpha": alpha, "m": m, "l": l, "lambda": lambda,
                    "a": a, "x": x, "r": r, "terms": terms,
                });
                ("eval gml", params, v, rep)
            }
            EvalCommand::Caputo { alpha, a, t, f } => {
                require(*alpha > 0.0, "alpha", "alpha > 0")?;
                require(*a >= 0.0, "a", "a >= 0")?;
                require(*t > *a, "t", "t > a")?;
                let g = function(ctx, f, *a)?;
                let (v, rep) = caputo_q_derivative(ctx, &g, *a, *alpha, *t)?;
                let params =
                    json!({ "q": ctx.q(), "alpha": alpha, "a": a, "t": t, "function": g.label() });
                ("eval caputo", params, v, rep)
            }
            EvalCommand::Integral { alpha, a, t, f } => {
                require(*a >= 0.0, "a", "a >= 0")?;
                require(*t >= *a, "t", "t >= a")?;
                let g = function(ctx, f, *a)?;
                let (v, rep) = match alpha {
                    Some(al) => {
                        require(*al > 0.0, "alpha", "alpha > 0")?;
                        riemann_q_integral_frac(ctx, &g, *a, *al, *t)?
                    }
                    None => q_integral(ctx, &g, *a, *t)?,
                };
                let params =
                    json!({ "q": ctx.q(), "alpha": alpha, "a": a, "t": t, "function": g.label() });
                ("eval integral", params, v, rep)
            }
        };
    out.scalar(name, params, value, &report);
    Ok(())
}

/// `{q^{points-1}, ..., q, 1}` for `a = 0`, `{a q^{-1}, ..., a q^{-points}}`
/// otherwise.
fn solve_grid(q: f64, a: f64, points: usize) -> Vec<f64> {
    if a == 0.0 {
        (0..points).rev().map(|i| q.powi(i as i32)).collect()
    } else {
        (1..=points).map(|i| a * q.powi(-(i as i32))).collect()
    }
}

fn solve(ctx: &QContext, a: &SolveArgs, out: &mut Output) -> CliResult<()> {
    require(a.points >= 1, "points", "points >= 1")?;
    require(a.terms >= 1, "terms", "terms >= 1")?;
    let spec = IVPSpec::new(a.alpha, a.beta, a.lambda, a.a, a.b.clone())?;
    let series = closed_form_series(ctx, &spec, a.terms)?;
    let mut rows = Vec::with_capacity(a.points);
    for x in solve_grid(ctx.q(), a.a, a.points) {
        let (y, _) = evaluate_series(ctx, &series, x, SumMode::Adaptive)?;
        let residual = numeric_residual(ctx, &series, &spec, x)?;
        rows.push([x, y, residual]);
    }
    let params = json!({
        "q": ctx.q(), "alpha": a.alpha, "beta": a.beta, "lambda": a.lambda,
        "a": a.a, "b": a.b, "points": a.points, "terms": a.terms,
    });
    out.table("solve", params, &["x", "y", "residual"], &rows);
    Ok(())
}

fn verify(ctx: &QContext, a: &VerifyArgs, out: &mut Output) -> CliResult<()> {
    let opts = SuiteOptions {
        classical_gamma: a.classical_gamma,
    };
    let names: Vec<&str> = match &a.suite {
        Some(s) => vec![find_suite(s)?.name],
        None => list_suites().iter().map(|d| d.name).collect(),
    };
    if a.case.is_some() && names.len() != 1 {
        return Err(Failure::Invalid("--case needs --suite".into()));
    }
    let mut reports: Vec<SuiteReport> = Vec::with_capacity(names.len());
    for name in names {
        let rep = match a.case {
            Some(c) => run_single(ctx, name, a.seed, c, opts)?,
            None => {
                let cases = a.cases.unwrap_or(find_suite(name)?.default_cases);
                require(cases >= 1, "cases", "cases >= 1")?;
                run_suite(ctx, name, a.seed, cases, opts)?
            }
        };
        for f in &rep.failures {
            eprintln!("{} case {} failed; replay: {}", rep.suite, f.case, f.replay);
        }
        reports.push(rep);
    }
    let params = json!({
        "suite": a.suite, "seed": a.seed, "cases": a.cases, "case": a.case,
        "classical_gamma": a.classical_gamma,
    });
    let passed = reports.iter().all(|r| r.passed);
    out.suites("verify", params, &reports);
    if passed {
        Ok(())
    } else {
        Err(Failure::Suite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::Format;

    #[test]
    fn grid_shapes() {
        assert_eq!(solve_grid(0.5, 0.0, 3), vec![0.25, 0.5, 1.0]);
        assert_eq!(solve_grid(0.5, 0.25, 2), vec![0.5, 1.0]);
    }

    #[test]
    fn format_names() {
        assert_eq!(Format::Json.to_string(), "json");
    }
}
