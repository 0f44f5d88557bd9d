//! Standard Monte Carlo, optionally enhanced with radial stratification and
//! a fitted linear control variate.

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use super::{margins_of, LimitState, Method, RunState, RunStatus, StoppingRule, YieldEstimate};
use crate::rng;
use crate::Result;

/// Number of equal-probability radial strata.
const N_STRATA: u64 = 16;

const SAMPLE_STREAM: &str = "mc.sample";
const STRAT_U_STREAM: &str = "mc.strat.u";
const STRAT_DIR_STREAM: &str = "mc.strat.dir";
const CV_PILOT_STREAM: &str = "mc.cv.pilot";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    /// Stratify the sample radius over equal-probability chi² bins.
    /// The stratification variable is documented in `docs/estimators.md`.
    pub stratified: bool,
    /// Fit a linear margin surrogate on this many pilot samples and use its
    /// failure indicator (with exact Gaussian expectation) as a control
    /// variate. Requires a limit state with a continuous margin.
    pub control_variate: Option<u64>,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            stratified: false,
            control_variate: None,
        }
    }
}

/// Draw plain sample `index` of the MC stream.
fn plain_sample(seed: u64, index: u64, dim: usize) -> Vec<f64> {
    rng::standard_normal_vec(seed, SAMPLE_STREAM, index, dim)
}

/// Draw stratified sample `index`: stratum `index % N_STRATA`, radius from
/// the inverse chi CDF within the stratum, direction uniform on the sphere.
/// Proportional allocation keeps the marginal distribution exactly N(0, I).
fn stratified_sample(seed: u64, index: u64, dim: usize, chi2: &ChiSquared) -> Vec<f64> {
    let stratum = index % N_STRATA;
    let mut u_rng = rng::stream(seed, STRAT_U_STREAM, index);
    let u01: f64 = u_rng.gen();
    let u = ((stratum as f64 + u01) / N_STRATA as f64).clamp(1e-15, 1.0 - 1e-15);
    let r = chi2.inverse_cdf(u).sqrt();
    let mut dir = rng::standard_normal_vec(seed, STRAT_DIR_STREAM, index, dim);
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    for v in &mut dir {
        *v *= r / norm;
    }
    dir
}

/// Linear margin surrogate `m(x) ≈ c + a·x` fitted on pilot samples.
///
/// Coordinates are iid standard normal, so the population least-squares
/// coefficients are simply `c = E[m]` and `a_j = E[x_j m]`.
struct LinearControlVariate {
    intercept: f64,
    coeffs: Vec<f64>,
    /// Exact `E[1{c + a·x < 0}] = Φ(-c/‖a‖)` under N(0, I).
    expectation: f64,
}

impl LinearControlVariate {
    fn fit(points: &[Vec<f64>], margins: &[f64], dim: usize) -> Option<Self> {
        let mut c = 0.0;
        let mut a = vec![0.0; dim];
        let mut n_used = 0usize;
        for (x, &m) in points.iter().zip(margins) {
            if !m.is_finite() {
                continue;
            }
            n_used += 1;
            c += m;
            for j in 0..dim {
                a[j] += x[j] * m;
            }
        }
        if n_used < dim.min(32).max(8) {
            return None;
        }
        c /= n_used as f64;
        for v in &mut a {
            *v /= n_used as f64;
        }
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return None;
        }
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let expectation = normal.cdf(-c / norm);
        Some(LinearControlVariate {
            intercept: c,
            coeffs: a,
            expectation,
        })
    }

    fn indicator(&self, x: &[f64]) -> f64 {
        let lin: f64 = self.intercept + self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
        if lin < 0.0 {
            1.0
        } else {
            0.0
        }
    }
}

/// Joint accumulator over failure indicators and control-variate values.
#[derive(Debug, Default, Clone)]
struct PairAccumulator {
    n: u64,
    sum_f: f64,
    sum_h: f64,
    sum_ff: f64,
    sum_hh: f64,
    sum_fh: f64,
    n_failures: u64,
    /// Per-stratum (failures, count) when stratified.
    strata: Vec<(u64, u64)>,
}

impl PairAccumulator {
    fn new(stratified: bool) -> Self {
        PairAccumulator {
            strata: if stratified {
                vec![(0, 0); N_STRATA as usize]
            } else {
                Vec::new()
            },
            ..Default::default()
        }
    }

    fn push(&mut self, failed: bool, h: f64, stratum: Option<u64>) {
        let f = if failed { 1.0 } else { 0.0 };
        self.n += 1;
        self.sum_f += f;
        self.sum_h += h;
        self.sum_ff += f * f;
        self.sum_hh += h * h;
        self.sum_fh += f * h;
        if failed {
            self.n_failures += 1;
        }
        if let Some(s) = stratum {
            let e = &mut self.strata[s as usize];
            if failed {
                e.0 += 1;
            }
            e.1 += 1;
        }
    }

    /// (p_fail, std) for the configured estimator.
    fn estimate(&self, cv: Option<&LinearControlVariate>) -> (f64, f64) {
        if self.n == 0 {
            return (0.0, 0.0);
        }
        let n = self.n as f64;
        let mean_f = self.sum_f / n;
        let var_f = (self.sum_ff / n - mean_f * mean_f).max(0.0);

        // Stratified point estimate: equal-probability strata, so the
        // estimate is the mean of per-stratum rates and its variance the
        // weighted sum of per-stratum binomial variances.
        let (p_base, var_base) = if !self.strata.is_empty() {
            let s = self.strata.len() as f64;
            let mut p = 0.0;
            let mut var = 0.0;
            for &(fails, count) in &self.strata {
                if count == 0 {
                    continue;
                }
                let pb = fails as f64 / count as f64;
                p += pb / s;
                var += pb * (1.0 - pb) / count as f64 / (s * s);
            }
            (p, var)
        } else {
            (mean_f, var_f / n)
        };

        match cv {
            None => (p_base, var_base.sqrt()),
            Some(cv) => {
                let mean_h = self.sum_h / n;
                let var_h = (self.sum_hh / n - mean_h * mean_h).max(0.0);
                let cov = self.sum_fh / n - mean_f * mean_h;
                if var_h < 1e-300 {
                    return (p_base, var_base.sqrt());
                }
                let beta = cov / var_h;
                let p = p_base - beta * (mean_h - cv.expectation);
                // Residual variance of f - beta·h, conservative when
                // combined with stratification.
                let var = ((var_f - cov * cov / var_h).max(0.0) / n).min(var_base.max(var_f / n));
                (p, var.sqrt())
            }
        }
    }
}

/// Standard Monte Carlo estimation of `P(margin < 0)` under N(0, I).
pub fn run_mc(
    limit: &dyn LimitState,
    rule: StoppingRule,
    seed: u64,
    options: McOptions,
) -> Result<YieldEstimate> {
    rule.validate()?;
    let dim = limit.dimension();
    let mut state = RunState::new(rule);
    let mut acc = PairAccumulator::new(options.stratified);

    let chi2 = ChiSquared::new(dim as f64).expect("positive dof");

    // Pilot phase for the control variate. Pilot evaluations count toward
    // n_sims; when the fit succeeds they are excluded from the estimator
    // statistics so the CV covariance is measured on scored samples only.
    let mut cv: Option<LinearControlVariate> = None;
    let mut next_index: u64 = 0;
    if let Some(pilot) = options.control_variate {
        if !limit.has_margin() {
            state
                .warnings
                .push("control variate requested but limit state has no margin; disabled".into());
        } else {
            let pilot = pilot.min(state.budget_left());
            let points: Vec<Vec<f64>> =
                (0..pilot).map(|i| rng::standard_normal_vec(seed, CV_PILOT_STREAM, i, dim)).collect();
            let margins = margins_of(limit, &points);
            state.charge(pilot);
            cv = LinearControlVariate::fit(&points, &margins, dim);
            if cv.is_none() {
                state
                    .warnings
                    .push("control-variate fit degenerate; falling back to plain MC".into());
                if !options.stratified {
                    for &m in &margins {
                        acc.push(m < 0.0, 0.0, None);
                    }
                }
            }
        }
    }

    let status = loop {
        let batch = state
            .rule
            .batch_size
            .next_multiple_of(N_STRATA)
            .min(state.budget_left());
        if batch == 0 {
            break if acc.n_failures == 0 {
                RunStatus::Unresolved
            } else {
                RunStatus::BudgetExhausted
            };
        }
        let indices: Vec<u64> = (next_index..next_index + batch).collect();
        next_index += batch;

        let points: Vec<Vec<f64>> = indices
            .iter()
            .map(|&i| {
                if options.stratified {
                    stratified_sample(seed, i, dim, &chi2)
                } else {
                    plain_sample(seed, i, dim)
                }
            })
            .collect();
        let margins = margins_of(limit, &points);
        state.charge(batch);

        for ((x, &m), &i) in points.iter().zip(&margins).zip(&indices) {
            let h = cv.as_ref().map_or(0.0, |c| c.indicator(x));
            let stratum = options.stratified.then(|| i % N_STRATA);
            acc.push(m < 0.0, h, stratum);
        }

        let (p, std) = acc.estimate(cv.as_ref());
        state.record(p, std);
        if let Some(status) = state.should_stop(super::estimator_fom(p, std), acc.n_failures) {
            break status;
        }
    };

    let (p, std) = acc.estimate(cv.as_ref());
    let n_sims = state.n_sims;
    let mut estimate = YieldEstimate {
        method: Method::Mc,
        p_fail: p,
        std_p_fail: std,
        n_sims,
        trace: state.trace,
        status,
        warnings: state.warnings,
    };
    // Clamp control-variate adjustments out of [0, 1].
    estimate.p_fail = estimate.p_fail.clamp(0.0, 1.0);
    Ok(estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{truth, Linear3};

    #[test]
    fn always_failing_limit_converges_to_one() {
        struct AlwaysFail;
        impl LimitState for AlwaysFail {
            fn dimension(&self) -> usize {
                4
            }
            fn margin(&self, _x: &[f64]) -> f64 {
                -1.0
            }
        }
        let est = run_mc(&AlwaysFail, StoppingRule::default(), 1, McOptions::default()).unwrap();
        assert_eq!(est.p_fail, 1.0);
        assert_eq!(est.std_p_fail, 0.0);
        assert_eq!(est.status, RunStatus::Converged);
    }

    #[test]
    fn never_failing_limit_is_unresolved() {
        struct NeverFail;
        impl LimitState for NeverFail {
            fn dimension(&self) -> usize {
                2
            }
            fn margin(&self, _x: &[f64]) -> f64 {
                1.0
            }
        }
        let rule = StoppingRule {
            max_sims: 2048,
            ..Default::default()
        };
        let est = run_mc(&NeverFail, rule, 1, McOptions::default()).unwrap();
        assert_eq!(est.p_fail, 0.0);
        assert_eq!(est.status, RunStatus::Unresolved);
        assert!(est.estimator_fom().is_infinite());
    }

    #[test]
    fn matches_linear3_tail_within_three_sigma() {
        let rule = StoppingRule {
            max_sims: 100_000,
            fom_target: 0.1,
            ..Default::default()
        };
        let est = run_mc(&Linear3::default(), rule, 42, McOptions::default()).unwrap();
        assert!(
            (est.p_fail - truth::LINEAR3).abs() <= 3.0 * est.std_p_fail,
            "p={} std={}",
            est.p_fail,
            est.std_p_fail
        );
    }

    #[test]
    fn trace_counts_increase_and_end_at_n_sims() {
        let rule = StoppingRule {
            max_sims: 20_000,
            ..Default::default()
        };
        let est = run_mc(&Linear3::default(), rule, 7, McOptions::default()).unwrap();
        for pair in est.trace.windows(2) {
            assert!(pair[1].n_sims > pair[0].n_sims);
        }
        assert_eq!(est.trace.last().unwrap().n_sims, est.n_sims);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let rule = StoppingRule {
            max_sims: 30_000,
            ..Default::default()
        };
        let a = run_mc(&Linear3::default(), rule, 9, McOptions::default()).unwrap();
        let b = run_mc(&Linear3::default(), rule, 9, McOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stratified_std_does_not_exceed_plain() {
        let rule = StoppingRule {
            max_sims: 64_000,
            fom_target: 1e-9, // force full budget on both runs
            ..Default::default()
        };
        let plain = run_mc(&Linear3::default(), rule, 11, McOptions::default()).unwrap();
        let strat = run_mc(
            &Linear3::default(),
            rule,
            11,
            McOptions {
                stratified: true,
                control_variate: None,
            },
        )
        .unwrap();
        assert!((strat.p_fail - truth::LINEAR3).abs() <= 4.0 * strat.std_p_fail);
        assert!(
            strat.std_p_fail <= plain.std_p_fail * 1.05,
            "stratified {} vs plain {}",
            strat.std_p_fail,
            plain.std_p_fail
        );
    }

    #[test]
    fn control_variate_reduces_std_on_linear_boundary() {
        let rule = StoppingRule {
            max_sims: 64_000,
            fom_target: 1e-9,
            ..Default::default()
        };
        let plain = run_mc(&Linear3::default(), rule, 13, McOptions::default()).unwrap();
        let cv = run_mc(
            &Linear3::default(),
            rule,
            13,
            McOptions {
                stratified: false,
                control_variate: Some(2000),
            },
        )
        .unwrap();
        assert!((cv.p_fail - truth::LINEAR3).abs() <= 4.0 * plain.std_p_fail.max(cv.std_p_fail));
        assert!(
            cv.std_p_fail < plain.std_p_fail,
            "cv {} vs plain {}",
            cv.std_p_fail,
            plain.std_p_fail
        );
    }
}
