//! Failure-probability estimators: standard Monte Carlo and four
//! importance-sampling variants, generic over the evaluation backend.
//!
//! All estimators share the `std(P_f)/P_f` stopping rule, record a
//! convergence trace per batch, and count every evaluator call (presampling
//! and exploration included) toward `n_sims`. Sampling is counter-based, so a
//! run is fully determined by `(method, seed, stopping rule, options)` no
//! matter how batches are scheduled across threads.

mod acs;
mod ais;
mod hscs;
mod mc;
mod mnis;

pub use acs::{recovered_support, run_acs, AcsOptions, SparseModel};
pub use ais::{refined_means, run_ais, AisOptions};
pub use hscs::{discover_centers, run_hscs, HscsOptions};
pub use mc::{run_mc, McOptions};
pub use mnis::{run_mnis, MnisOptions};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A pass/fail boundary in standardized variation space.
///
/// `margin` is the continuous limit-state function: negative values are
/// failures. Implementations must be deterministic for a fixed input.
pub trait LimitState: Sync {
    /// Number of standardized coordinates the limit state consumes.
    fn dimension(&self) -> usize;

    /// Continuous failure margin; `margin(x) < 0` is a failure.
    fn margin(&self, x: &[f64]) -> f64;

    fn is_failure(&self, x: &[f64]) -> bool {
        self.margin(x) < 0.0
    }

    /// Whether `margin` carries gradient-like information beyond the failure
    /// indicator (cross-entropy elite selection exploits it when present).
    fn has_margin(&self) -> bool {
        true
    }
}

/// Estimation method tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mc,
    Mnis,
    Ais,
    Acs,
    Hscs,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Mc, Method::Mnis, Method::Ais, Method::Acs, Method::Hscs];

    pub fn name(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Mnis => "mnis",
            Method::Ais => "ais",
            Method::Acs => "acs",
            Method::Hscs => "hscs",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Termination criterion: stop once `std(P_f)/P_f <= fom_target` with at
/// least `min_failures` failures observed, or when `max_sims` is reached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub fom_target: f64,
    pub max_sims: u64,
    /// Minimum observed failures before the FoM may terminate the run;
    /// guards against near-zero variance estimates from a handful of hits.
    pub min_failures: u64,
    /// Evaluations per reporting batch.
    pub batch_size: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule {
            fom_target: 0.1,
            max_sims: 1_000_000,
            min_failures: 10,
            batch_size: 512,
        }
    }
}

impl StoppingRule {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.fom_target > 0.0) {
            return Err(crate::Error::InvalidConfig(format!(
                "fom_target must be > 0, got {}",
                self.fom_target
            )));
        }
        if self.batch_size == 0 || self.max_sims < self.batch_size {
            return Err(crate::Error::InvalidConfig(format!(
                "max_sims ({}) must be >= batch_size ({}) > 0",
                self.max_sims, self.batch_size
            )));
        }
        Ok(())
    }
}

/// One convergence-trace entry, recorded after each batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub n_sims: u64,
    pub p_fail: f64,
    pub estimator_fom: f64,
}

/// Terminal state of an estimation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// FoM target reached with the minimum failure count.
    Converged,
    /// Budget exhausted with failures observed but FoM above target.
    BudgetExhausted,
    /// Budget exhausted with zero failures; `p_fail = 0` is not resolved.
    Unresolved,
}

/// Result of a yield-estimation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YieldEstimate {
    pub method: Method,
    pub p_fail: f64,
    pub std_p_fail: f64,
    pub n_sims: u64,
    pub trace: Vec<TracePoint>,
    pub status: RunStatus,
    pub warnings: Vec<String>,
}

impl YieldEstimate {
    /// `std(P_f)/P_f`; +∞ when `p_fail` is zero.
    pub fn estimator_fom(&self) -> f64 {
        estimator_fom(self.p_fail, self.std_p_fail)
    }
}

/// Relative-accuracy figure of merit `std(P_f)/P_f`.
///
/// Degenerate `p_fail = 0` returns the +∞ sentinel.
pub fn estimator_fom(p_fail: f64, std_p_fail: f64) -> f64 {
    if p_fail > 0.0 {
        std_p_fail / p_fail
    } else {
        f64::INFINITY
    }
}

/// Array yield for a per-cell failure probability: the exact
/// `(1 - p_fail)^n_cells` and the rare-event approximation
/// `exp(-n_cells · p_fail)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YieldPair {
    pub exact: f64,
    pub approx: f64,
}

pub fn yield_from_pfail(p_fail: f64, n_cells: u64) -> YieldPair {
    let n = n_cells as f64;
    YieldPair {
        exact: (1.0 - p_fail).powf(n),
        approx: (-n * p_fail).exp(),
    }
}

/// Accumulator over per-sample estimator terms `t_i` with `E[t_i] = P_f`.
///
/// For plain MC the term is the failure indicator; for importance sampling it
/// is `w_i · 1{fail}`. The standard error of the mean is the population
/// standard deviation of the terms divided by sqrt(n).
#[derive(Debug, Clone, Default)]
pub(crate) struct TermAccumulator {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
    pub n_failures: u64,
}

impl TermAccumulator {
    pub fn push(&mut self, term: f64, failed: bool) {
        self.n += 1;
        self.sum += term;
        self.sum_sq += term * term;
        if failed {
            self.n_failures += 1;
        }
    }

    pub fn p_fail(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    pub fn std_p_fail(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = (self.sum_sq / n - mean * mean).max(0.0);
        (var / n).sqrt()
    }

    pub fn fom(&self) -> f64 {
        estimator_fom(self.p_fail(), self.std_p_fail())
    }
}

/// Shared batch-loop bookkeeping: trace recording and stop decisions.
#[derive(Debug)]
pub(crate) struct RunState {
    pub rule: StoppingRule,
    pub n_sims: u64,
    pub trace: Vec<TracePoint>,
    pub warnings: Vec<String>,
}

impl RunState {
    pub fn new(rule: StoppingRule) -> Self {
        RunState {
            rule,
            n_sims: 0,
            trace: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn charge(&mut self, evals: u64) {
        self.n_sims += evals;
    }

    pub fn record(&mut self, p_fail: f64, std_p_fail: f64) {
        self.trace.push(TracePoint {
            n_sims: self.n_sims,
            p_fail,
            estimator_fom: estimator_fom(p_fail, std_p_fail),
        });
    }

    /// Remaining evaluation budget.
    pub fn budget_left(&self) -> u64 {
        self.rule.max_sims.saturating_sub(self.n_sims)
    }

    pub fn should_stop(&self, fom: f64, n_failures: u64) -> Option<RunStatus> {
        if n_failures >= self.rule.min_failures && fom <= self.rule.fom_target {
            return Some(RunStatus::Converged);
        }
        if self.budget_left() == 0 {
            return Some(if n_failures == 0 {
                RunStatus::Unresolved
            } else {
                RunStatus::BudgetExhausted
            });
        }
        None
    }

    pub fn finish(self, method: Method, acc: &TermAccumulator, status: RunStatus) -> YieldEstimate {
        YieldEstimate {
            method,
            p_fail: acc.p_fail(),
            std_p_fail: acc.std_p_fail(),
            n_sims: self.n_sims,
            trace: self.trace,
            status,
            warnings: self.warnings,
        }
    }
}

/// Evaluate a batch of points in parallel, preserving input order.
pub(crate) fn margins_of<L: LimitState + ?Sized>(limit: &L, points: &[Vec<f64>]) -> Vec<f64> {
    points.par_iter().map(|x| limit.margin(x)).collect()
}

/// Standard-normal log-density up to the dimension-constant term, which
/// cancels in every likelihood ratio used here.
pub(crate) fn log_phi_unnormalized(x: &[f64]) -> f64 {
    -0.5 * x.iter().map(|v| v * v).sum::<f64>()
}

/// Log-density of `N(mean, diag(var))` up to the same constant.
pub(crate) fn log_gaussian_diag_unnormalized(x: &[f64], mean: &[f64], var: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..x.len() {
        let d = x[i] - mean[i];
        acc += d * d / var[i] + var[i].ln();
    }
    -0.5 * acc
}
