use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};

/// Base `q` together with the truncation policy shared by every series and
/// product in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QContext {
    q: f64,
    tol_abs: f64,
    tol_rel: f64,
    max_terms: usize,
}

impl QContext {
    pub const DEFAULT_TOL_ABS: f64 = 1e-14;
    pub const DEFAULT_TOL_REL: f64 = 1e-12;
    pub const DEFAULT_MAX_TERMS: usize = 10_000;

    pub fn new(q: f64) -> Result<Self> {
        Self::with_policy(
            q,
            Self::DEFAULT_TOL_ABS,
            Self::DEFAULT_TOL_REL,
            Self::DEFAULT_MAX_TERMS,
        )
    }

    pub fn with_policy(q: f64, tol_abs: f64, tol_rel: f64, max_terms: usize) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(QError::InvalidContext(format!(
                "q must lie in (0, 1), got {q}"
            )));
        }
        if !(tol_abs > 0.0 && tol_abs.is_finite()) {
            return Err(QError::InvalidContext(format!(
                "tol_abs must be positive, got {tol_abs}"
            )));
        }
        if !(tol_rel >= 0.0 && tol_rel.is_finite()) {
            return Err(QError::InvalidContext(format!(
                "tol_rel must be nonnegative, got {tol_rel}"
            )));
        }
        if max_terms == 0 {
            return Err(QError::InvalidContext(
                "max_terms must be at least 1".into(),
            ));
        }
        Ok(QContext {
            q,
            tol_abs,
            tol_rel,
            max_terms,
        })
    }

    /// Same policy, different base.
    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::with_policy(q, self.tol_abs, self.tol_rel, self.max_terms)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn tol_abs(&self) -> f64 {
        self.tol_abs
    }

    pub fn tol_rel(&self) -> f64 {
        self.tol_rel
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub(crate) fn ln_q(&self) -> f64 {
        self.q.ln()
    }

    /// Threshold a series increment must stay under, given the running value.
    pub(crate) fn threshold(&self, running: f64) -> f64 {
        self.tol_abs + self.tol_rel * running.abs()
    }
}

/// How a truncated series or product ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub terms_used: usize,
    /// Magnitude of the last increment taken (proxy for the first omitted one).
    pub est_error: f64,
    pub converged: bool,
}

impl TruncationReport {
    /// Report for a result computed by a finite formula.
    pub fn exact(terms_used: usize) -> Self {
        TruncationReport {
            terms_used,
            est_error: 0.0,
            converged: true,
        }
    }

    /// Combine the reports of two sub-computations feeding one result.
    pub fn merge(self, other: TruncationReport) -> Self {
        TruncationReport {
            terms_used: self.terms_used + other.terms_used,
            est_error: self.est_error + other.est_error,
            converged: self.converged && other.converged,
        }
    }
}

/// Number of consecutive small increments required before a series stops.
pub(crate) const SMALL_RUN: usize = 3;

/// Running sum with the shared stopping rule: stop once `SMALL_RUN`
/// consecutive increments are below `tol_abs + tol_rel * |sum|`.
#[derive(Debug)]
pub(crate) struct SeriesAccumulator<'a> {
    ctx: &'a QContext,
    sum: f64,
    terms: usize,
    small_run: usize,
    last: f64,
}

impl<'a> SeriesAccumulator<'a> {
    pub(crate) fn new(ctx: &'a QContext) -> Self {
        SeriesAccumulator {
            ctx,
            sum: 0.0,
            terms: 0,
            small_run: 0,
            last: f64::INFINITY,
        }
    }

    pub(crate) fn starting_at(ctx: &'a QContext, value: f64) -> Self {
        let mut acc = Self::new(ctx);
        acc.sum = value;
        acc
    }

    /// Adds a term; returns true once the stopping rule is satisfied.
    pub(crate) fn push(&mut self, term: f64) -> bool {
        self.sum += term;
        self.terms += 1;
        self.last = term.abs();
        if self.last <= self.ctx.threshold(self.sum) {
            self.small_run += 1;
        } else {
            self.small_run = 0;
        }
        self.small_run >= SMALL_RUN
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.terms >= self.ctx.max_terms()
    }

    pub(crate) fn sum(&self) -> f64 {
        self.sum
    }

    pub(crate) fn report(&self, converged: bool) -> TruncationReport {
        TruncationReport {
            terms_used: self.terms,
            est_error: if self.terms == 0 { 0.0 } else { self.last },
            converged,
        }
    }

    pub(crate) fn non_convergence(&self) -> QError {
        QError::NonConvergence {
            terms: self.terms,
            est_error: self.last,
        }
    }
}

/// Tracks log-magnitudes of successive terms to spot runaway growth.
#[derive(Debug, Default)]
pub(crate) struct GrowthMonitor {
    prev: Option<f64>,
    prev_step: Option<f64>,
    run: usize,
    accelerating_run: usize,
}

/// Consecutive growing terms that count as divergence.
pub(crate) const GROWTH_RUN: usize = 5;

/// Terms examined before a series already known to have zero radius of
/// convergence is reported as divergent.
pub(crate) const DIVERGENCE_HORIZON: usize = 50;

impl GrowthMonitor {
    /// Feed `ln|term|`; zero terms (`-inf`) reset the run.
    pub(crate) fn observe(&mut self, ln_abs: f64) {
        match self.prev {
            Some(p) if ln_abs.is_finite() && p.is_finite() && ln_abs > p => {
                let step = ln_abs - p;
                self.run += 1;
                self.accelerating_run = match self.prev_step {
                    Some(s) if self.run > 1 && step >= s => self.accelerating_run + 1,
                    _ => 1,
                };
                self.prev_step = Some(step);
            }
            _ => {
                self.run = 0;
                self.accelerating_run = 0;
                self.prev_step = None;
            }
        }
        self.prev = Some(ln_abs);
    }

    /// Terms have grown `GROWTH_RUN` times in a row.
    pub(crate) fn growing(&self) -> bool {
        self.run >= GROWTH_RUN
    }

    /// Terms have grown `GROWTH_RUN` times in a row with non-decreasing ratios.
    pub(crate) fn accelerating(&self) -> bool {
        self.accelerating_run >= GROWTH_RUN
    }

    pub(crate) fn run(&self) -> usize {
        self.run
    }
}
