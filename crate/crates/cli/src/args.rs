use clap::{Args, Parser, Subcommand};
use qfrac_core::QContext;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "qfrac",
    version,
    about = "q-fractional calculus and q-Mittag-Leffler functions"
)]
pub struct Cli {
    /// Base q in (0, 1)
    #[arg(long, global = true, default_value_t = 0.5)]
    pub q: f64,

    /// Absolute truncation tolerance
    #[arg(long, global = true, default_value_t = QContext::DEFAULT_TOL_ABS)]
    pub tol: f64,

    /// Relative truncation tolerance
    #[arg(long = "tol-rel", global = true, default_value_t = QContext::DEFAULT_TOL_REL)]
    pub tol_rel: f64,

    /// Cap on series and product terms
    #[arg(long = "max-terms", global = true, env = "QFRAC_MAX_TERMS", default_value_t = QContext::DEFAULT_MAX_TERMS)]
    pub max_terms: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a function or operator
    Eval {
        #[command(subcommand)]
        which: EvalCommand,
    },
    /// Solve C^alpha y = lambda (x-a)^beta y(q^-beta x) on the lattice
    Solve(SolveArgs),
    /// Run verification suites
    Verify(VerifyArgs),
}

/// Test function: a polynomial or a q-factorial power `(x - a)_q^mu`.
#[derive(Debug, Args)]
pub struct FunctionArgs {
    /// Polynomial coefficients c0,c1,...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub poly: Option<Vec<f64>>,
    /// Exponent mu of (x - a)_q^mu
    #[arg(long, allow_hyphen_values = true)]
    pub qpow: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// q-Gamma function
    Gamma {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// q-factorial power (t - s)_q^gamma
    Qfact {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
    },
    /// Double-index q-Mittag-Leffler function
    Ml {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        z0: f64,
    },
    /// Generalized q-Mittag-Leffler function of order r
    Gml {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        m: f64,
        #[arg(long, allow_hyphen_values = true)]
        l: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, default_value_t = 0)]
        r: u32,
        /// Fixed number of terms instead of adaptive summation
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Caputo q-fractional derivative at t
    Caputo {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[command(flatten)]
        f: FunctionArgs,
    },
    /// Jackson integral from a to t, or the fractional integral with --alpha
    Integral {
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[command(flatten)]
        f: FunctionArgs,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub a: f64,
    /// Initial values b_0,...,b_{n-1}
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub b: Vec<f64>,
    /// Number of output points
    #[arg(long, default_value_t = 8)]
    pub points: usize,
    /// Series terms per solution component
    #[arg(long, default_value_t = 200)]
    pub terms: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name; all suites when omitted
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of cases; defaults to the suite's own count
    #[arg(long)]
    pub cases: Option<usize>,
    /// Replay a single case
    #[arg(long)]
    pub case: Option<usize>,
    /// prop1 only: normalize with the classical Gamma function
    #[arg(long = "classical-gamma")]
    pub classical_gamma: bool,
}
