//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qfrac_core::{
    closed_form_components, closed_form_series, coefficient_residual, evaluate_series, gml_eval,
    q_gamma, run_suite, GMLParams, IVPSpec, QContext, QError, Result, SuiteOptions, SumMode,
};

struct Verdict {
    ok: bool,
    detail: String,
}

fn suite(name: &str, seed: u64, cases: usize, bound: f64) -> Result<(bool, f64)> {
    let ctx = QContext::new(0.5)?;
    let rep = run_suite(&ctx, name, seed, cases, SuiteOptions::default())?;
    for f in &rep.failures {
        eprintln!(
            "  {name} case {}: {:?} {:?} replay: {}",
            f.case, f.error, f.message, f.replay
        );
    }
    Ok((
        rep.passed && rep.max_error <= bound && rep.cases == cases,
        rep.max_error,
    ))
}

fn power_rule() -> Result<Verdict> {
    let (ok, err) = suite("power_rule", 1, 48, 1e-8)?;
    Ok(Verdict {
        ok,
        detail: format!("48 combos, max rel err {err:.2e} (<= 1e-8)"),
    })
}

fn core_identities() -> Result<Verdict> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, bound) in [
        ("ftc", 1e-9),
        ("cfq", 1e-9),
        ("product_rule", 1e-9),
        ("lemma1_i", 1e-9),
        ("lemma1_ii", 1e-9),
        ("lemma1_iii", 1e-9),
        ("lemma1_iv", 1e-9),
    ] {
        let (pass, err) = suite(name, 42, 200, bound)?;
        ok &= pass;
        parts.push(format!("{name} {err:.1e}"));
    }
    Ok(Verdict {
        ok,
        detail: format!("200 cases each: {}", parts.join(", ")),
    })
}

fn prop1() -> Result<Verdict> {
    let (ok, err) = suite("prop1", 42, 50, 1e-8)?;
    Ok(Verdict {
        ok,
        detail: format!("50 cases x 20 points, max residual {err:.2e} (<= 1e-8)"),
    })
}

fn remark_sp() -> Result<Verdict> {
    let (ok, err) = suite("remark_sp", 42, 81, 1e-10)?;
    Ok(Verdict {
        ok,
        detail: format!("81 grid points, max rel err {err:.2e} (<= 1e-10)"),
    })
}

fn solver_algebra() -> Result<Verdict> {
    let (ok, err) = suite("solver_coeff", 42, 144, 1e-11)?;
    Ok(Verdict {
        ok,
        detail: format!(
            "144-point sweep, k <= 40, iterates m <= 12: max defect {err:.2e} (<= 1e-11)"
        ),
    })
}

fn solver_numerics() -> Result<Verdict> {
    let (ok, err) = suite("solver_numeric", 42, 12, 1e-8)?;
    Ok(Verdict {
        ok,
        detail: format!("x in {{q^2, q, 1}}, 12 problems: max residual {err:.2e} (<= 1e-8)"),
    })
}

fn multi_order() -> Result<Verdict> {
    let mut worst_ic: f64 = 0.0;
    let mut worst_rec: f64 = 0.0;
    for q in [0.3, 0.5, 0.8] {
        let ctx = QContext::new(q)?;
        for alpha in [1.3, 1.5, 1.7] {
            // α + β > 1 keeps k(α+β) away from the initial-value power 1
            for beta in [-0.2, 0.0, 0.4] {
                for lambda in [0.5, -0.5, 2.0, -2.0] {
                    for a in [0.0, 0.125] {
                        let spec = IVPSpec::new(alpha, beta, lambda, a, vec![1.0, 0.5])?;
                        let s = closed_form_series(&ctx, &spec, 25)?;
                        for r in 0..2 {
                            let got = s.coefficient_of(r as f64).map_or(f64::NAN, |t| t.value(q));
                            let want = spec.b[r] / q_gamma(&ctx, r as f64 + 1.0)?;
                            worst_ic = worst_ic.max((got - want).abs());
                        }
                        for comp in closed_form_components(&ctx, &spec, 25)? {
                            worst_rec = worst_rec.max(coefficient_residual(&ctx, &comp, &spec)?);
                        }
                    }
                }
            }
        }
    }
    Ok(Verdict {
        ok: worst_ic <= 1e-12 && worst_rec <= 1e-11,
        detail: format!("initial values {worst_ic:.1e} (<= 1e-12), order-r recurrences {worst_rec:.1e} (<= 1e-11)"),
    })
}

fn diverged_within(res: Result<(f64, qfrac_core::TruncationReport)>, horizon: usize) -> bool {
    matches!(res, Err(QError::Divergence { terms, .. }) if terms <= horizon)
}

fn divergence_guard() -> Result<Verdict> {
    let mut checked = 0;
    let mut missed = Vec::new();
    for q in [0.3, 0.5, 0.8] {
        let ctx = QContext::new(q)?;
        for alpha in [0.3, 0.5, 1.2] {
            for m in [1.5, 2.0, 3.0] {
                for l in [0.0, 1.0] {
                    for lambda in [1e-3, 1.0, -1.0] {
                        for (a, x) in [(0.0, 0.1), (0.0, 1.0), (0.25, 0.5), (0.25, 2.0)] {
                            let p = GMLParams::new(alpha, m, l, lambda, a, 0)?;
                            checked += 1;
                            if !diverged_within(gml_eval(&ctx, &p, x, SumMode::Adaptive), 50) {
                                missed.push(format!(
                                    "gml q={q} alpha={alpha} m={m} l={l} lambda={lambda} x={x}"
                                ));
                            }
                        }
                    }
                }
            }
            for beta in [0.1, 0.5, 1.0] {
                for lambda in [1e-3, 0.2, -2.0] {
                    for k_max in [10, 40, 200] {
                        let spec = IVPSpec::new(alpha.min(0.9), beta, lambda, 0.0, vec![1.0])?;
                        let s = closed_form_series(&ctx, &spec, k_max)?;
                        for x in [0.1, 1.0] {
                            checked += 1;
                            if !diverged_within(evaluate_series(&ctx, &s, x, SumMode::Adaptive), 50)
                            {
                                missed.push(format!(
                                    "series q={q} beta={beta} lambda={lambda} k={k_max} x={x}"
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    let out = Command::new(env!("CARGO_BIN_EXE_qfrac"))
        .args([
            "eval", "gml", "--q", "0.5", "--alpha", "0.5", "--m", "2", "--l", "1", "--lambda", "1",
            "--a", "0", "--x", "1", "--r", "0",
        ])
        .output()
        .expect("binary runs");
    let cli_code = out.status.code();
    for m in missed.iter().take(5) {
        eprintln!("  no divergence: {m}");
    }
    Ok(Verdict {
        ok: missed.is_empty() && cli_code == Some(2) && out.stdout.is_empty(),
        detail: format!(
            "{checked} adaptive evaluations, {} missed; CLI exit {:?}",
            missed.len(),
            cli_code
        ),
    })
}

type Criterion = (&'static str, Duration, fn() -> Result<Verdict>);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 power rule", Duration::from_secs(2), power_rule),
        ("2 core identities", Duration::from_secs(5), core_identities),
        ("3 Taylor remainder identity", Duration::from_secs(5), prop1),
        ("4 reduction at m = 1", Duration::from_secs(2), remark_sp),
        ("5 solver algebra", Duration::from_secs(5), solver_algebra),
        ("6 solver numerics", Duration::from_secs(3), solver_numerics),
        (
            "7 multi-order solution",
            Duration::from_secs(3),
            multi_order,
        ),
        (
            "8 divergence guard",
            Duration::from_secs(1),
            divergence_guard,
        ),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match verdict {
            Ok(v) => (v.ok && elapsed < limit, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] criterion {name}: {detail}; {:.3} s (limit {} s)",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
