use std::fmt;
use std::fmt::Write;

use clap::ValueEnum;
use qfrac_core::{SuiteReport, TruncationReport};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Shortest representation that parses back to the same f64.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn truncation(r: &TruncationReport) -> Value {
    json!({ "terms_used": r.terms_used, "est_error": r.est_error, "converged": r.converged })
}

/// Collects everything written to the output stream.
pub struct Output {
    format: Format,
    buf: String,
}

impl Output {
    pub fn new(format: Format) -> Self {
        Output {
            format,
            buf: String::new(),
        }
    }

    pub fn text(&self) -> &str {
        &self.buf
    }

    fn json(&mut self, v: &Value) {
        self.buf
            .push_str(&serde_json::to_string(v).expect("serializable"));
        self.buf.push('\n');
    }

    pub fn scalar(&mut self, command: &str, params: Value, value: f64, rep: &TruncationReport) {
        match self.format {
            Format::Text => {
                let _ = writeln!(self.buf, "{}", num(value));
            }
            Format::Csv => {
                let _ = writeln!(self.buf, "result,terms_used,est_error,converged");
                let _ = writeln!(
                    self.buf,
                    "{},{},{},{}",
                    num(value),
                    rep.terms_used,
                    num(rep.est_error),
                    rep.converged
                );
            }
            Format::Json => self.json(&json!({
                "command": command,
                "params": params,
                "result": value,
                "truncation": truncation(rep),
            })),
        }
    }

    pub fn table(&mut self, command: &str, params: Value, header: &[&str], rows: &[[f64; 3]]) {
        match self.format {
            Format::Csv | Format::Text => {
                let sep = if self.format == Format::Csv { "," } else { " " };
                let _ = writeln!(self.buf, "{}", header.join(sep));
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|v| num(*v)).collect();
                    let _ = writeln!(self.buf, "{}", cells.join(sep));
                }
            }
            Format::Json => {
                let result: Vec<Value> = rows
                    .iter()
                    .map(|row| {
                        let mut m = Map::new();
                        for (h, v) in header.iter().zip(row) {
                            m.insert(h.to_string(), json!(v));
                        }
                        Value::Object(m)
                    })
                    .collect();
                self.json(&json!({ "command": command, "params": params, "result": result }));
            }
        }
    }

    pub fn suites(&mut self, command: &str, params: Value, reports: &[SuiteReport]) {
        match self.format {
            Format::Text => {
                for r in reports {
                    let _ = writeln!(
                        self.buf,
                        "{:<20} {} cases={} max_error={} tolerance={}",
                        r.suite,
                        if r.passed { "PASS" } else { "FAIL" },
                        r.cases,
                        num(r.max_error),
                        num(r.tolerance)
                    );
                }
            }
            Format::Csv => {
                let _ = writeln!(
                    self.buf,
                    "suite,seed,cases,tolerance,max_error,passed,failures"
                );
                for r in reports {
                    let _ = writeln!(
                        self.buf,
                        "{},{},{},{},{},{},{}",
                        r.suite,
                        r.seed,
                        r.cases,
                        num(r.tolerance),
                        num(r.max_error),
                        r.passed,
                        r.failures.len()
                    );
                }
            }
            Format::Json => {
                let mut obj = Map::new();
                obj.insert("command".into(), json!(command));
                obj.insert("params".into(), params);
                if let [one] = reports {
                    if let Value::Object(fields) = serde_json::to_value(one).expect("serializable")
                    {
                        obj.extend(fields);
                    }
                } else {
                    obj.insert(
                        "result".into(),
                        serde_json::to_value(reports).expect("serializable"),
                    );
                }
                self.json(&Value::Object(obj));
            }
        }
    }
}
