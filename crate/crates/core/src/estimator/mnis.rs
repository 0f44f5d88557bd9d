//! Mean-shifted importance sampling.
//!
//! Phase 1 presamples from a widened Gaussian to locate failing points, takes
//! the minimum-norm one, and polishes it toward the most probable failure
//! point: a radial shrink followed by coordinate-wise shrinkage passes, all
//! charged to the simulation budget. Phase 2 samples from `N(μ_shift, I)` and
//! weights each draw by the standard-normal likelihood ratio
//! `w(x) = φ(x)/φ(x - μ) = exp(‖μ‖²/2 - x·μ)`.

use super::{margins_of, LimitState, Method, RunState, RunStatus, StoppingRule, TermAccumulator, YieldEstimate};
use crate::rng;
use crate::{Error, Result};

const PRESAMPLE_STREAM: &str = "mnis.presample";
const SAMPLE_STREAM: &str = "mnis.sample";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MnisOptions {
    /// Presampling budget for locating the shift.
    pub n_presample: u64,
    /// Standard deviation of the widened presampling Gaussian.
    pub presample_sigma: f64,
}

impl Default for MnisOptions {
    fn default() -> Self {
        MnisOptions {
            n_presample: 1000,
            presample_sigma: 2.0,
        }
    }
}

/// Find the minimum-norm failing presample, if any.
pub(crate) fn min_norm_failure(
    limit: &dyn LimitState,
    seed: u64,
    label: &str,
    n: u64,
    sigma: f64,
) -> Option<Vec<f64>> {
    let dim = limit.dimension();
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut x = rng::standard_normal_vec(seed, label, i, dim);
            for v in &mut x {
                *v *= sigma;
            }
            x
        })
        .collect();
    let margins = margins_of(limit, &points);
    let mut best: Option<(f64, usize)> = None;
    for (i, &m) in margins.iter().enumerate() {
        if m < 0.0 {
            let norm2 = points[i].iter().map(|v| v * v).sum::<f64>();
            if best.map_or(true, |(b, _)| norm2 < b) {
                best = Some((norm2, i));
            }
        }
    }
    best.map(|(_, i)| points[i].clone())
}

/// Shrink a failing point toward the origin while keeping it failing.
///
/// First a radial bisection along the ray to the origin, then coordinate
/// shrinkage passes in decreasing-magnitude order: a coordinate that can be
/// zeroed without leaving the failure region is zeroed, otherwise its minimal
/// magnitude is bisected. Every limit evaluation is added to `evals`.
pub(crate) fn polish_toward_boundary(
    limit: &dyn LimitState,
    start: Vec<f64>,
    evals: &mut u64,
) -> Vec<f64> {
    debug_assert!(limit.is_failure(&start));
    let mut x = start;

    // Radial shrink: smallest scale t with t·x still failing.
    let base = x.clone();
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        let probe: Vec<f64> = base.iter().map(|v| v * mid).collect();
        *evals += 1;
        if limit.is_failure(&probe) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    for (v, b) in x.iter_mut().zip(&base) {
        *v = b * hi;
    }

    // Coordinate passes.
    for _pass in 0..2 {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()));
        for j in order {
            if x[j] == 0.0 {
                continue;
            }
            let saved = x[j];
            x[j] = 0.0;
            *evals += 1;
            if limit.is_failure(&x) {
                continue;
            }
            // Zeroing left the region; bisect the minimal keeping magnitude.
            let mut lo = 0.0f64;
            let mut hi = 1.0f64;
            for _ in 0..8 {
                let mid = 0.5 * (lo + hi);
                x[j] = saved * mid;
                *evals += 1;
                if limit.is_failure(&x) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            x[j] = saved * hi;
        }
    }
    x
}

/// Log of the standard-normal likelihood ratio for a single-Gaussian shift.
pub(crate) fn log_shift_weight(x: &[f64], shift: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut norm2 = 0.0;
    for (xi, mi) in x.iter().zip(shift) {
        dot += xi * mi;
        norm2 += mi * mi;
    }
    0.5 * norm2 - dot
}

/// Shared phase 2: sample `N(shift, I)`, weight by the likelihood ratio,
/// run the stopping rule. Used by MNIS and by the ACS fallback.
pub(crate) fn shifted_estimation(
    limit: &dyn LimitState,
    shift: &[f64],
    seed: u64,
    sample_stream: &str,
    state: &mut RunState,
) -> (TermAccumulator, RunStatus) {
    let dim = limit.dimension();
    let mut acc = TermAccumulator::default();
    let mut next_index: u64 = 0;
    let status = loop {
        let batch = state.rule.batch_size.min(state.budget_left());
        if batch == 0 {
            break if acc.n_failures == 0 {
                RunStatus::Unresolved
            } else {
                RunStatus::BudgetExhausted
            };
        }
        let points: Vec<Vec<f64>> = (next_index..next_index + batch)
            .map(|i| {
                let mut x = rng::standard_normal_vec(seed, sample_stream, i, dim);
                for (v, m) in x.iter_mut().zip(shift) {
                    *v += m;
                }
                x
            })
            .collect();
        next_index += batch;
        let margins = margins_of(limit, &points);
        state.charge(batch);

        for (x, &m) in points.iter().zip(&margins) {
            let failed = m < 0.0;
            let w = log_shift_weight(x, shift).exp();
            acc.push(if failed { w } else { 0.0 }, failed);
        }
        state.record(acc.p_fail(), acc.std_p_fail());
        if let Some(status) = state.should_stop(acc.fom(), acc.n_failures) {
            break status;
        }
    };
    (acc, status)
}

/// Locate, polish, and return the shift vector. Charges `state` for all
/// presample and polish evaluations.
pub(crate) fn find_shift(
    limit: &dyn LimitState,
    seed: u64,
    label: &str,
    n_presample: u64,
    sigma: f64,
    state: &mut RunState,
) -> Result<Vec<f64>> {
    let n = n_presample.min(state.budget_left());
    let raw = min_norm_failure(limit, seed, label, n, sigma);
    state.charge(n);
    let raw = raw.ok_or(Error::ShiftNotFound { n_presampled: n })?;
    let mut polish_evals = 0u64;
    let shift = polish_toward_boundary(limit, raw, &mut polish_evals);
    state.charge(polish_evals.min(state.budget_left()));
    Ok(shift)
}

pub fn run_mnis(
    limit: &dyn LimitState,
    rule: StoppingRule,
    seed: u64,
    options: MnisOptions,
) -> Result<YieldEstimate> {
    rule.validate()?;
    let mut state = RunState::new(rule);
    let shift = find_shift(
        limit,
        seed,
        PRESAMPLE_STREAM,
        options.n_presample,
        options.presample_sigma,
        &mut state,
    )?;
    let (acc, status) = shifted_estimation(limit, &shift, seed, SAMPLE_STREAM, &mut state);
    Ok(state.finish(Method::Mnis, &acc, status))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{truth, Linear3};

    #[test]
    fn shift_lands_near_hyperplane_projection() {
        // Min-norm point of {x0 > 3} is (3, 0, ..., 0).
        let limit = Linear3::default();
        let mut state = RunState::new(StoppingRule::default());
        let shift = find_shift(&limit, 3, PRESAMPLE_STREAM, 4000, 2.0, &mut state).unwrap();
        assert!(shift[0] >= 3.0);
        assert!(shift[0] < 3.2, "x0 = {}", shift[0]);
        let rest: f64 = shift[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(rest < 0.5, "off-axis norm {rest}");
    }

    #[test]
    fn estimates_linear3_within_three_sigma_and_beats_mc_budget() {
        let rule = StoppingRule {
            fom_target: 0.1,
            max_sims: 200_000,
            ..Default::default()
        };
        let est = run_mnis(&Linear3::default(), rule, 5, MnisOptions::default()).unwrap();
        assert_eq!(est.status, RunStatus::Converged);
        assert!((est.p_fail - truth::LINEAR3).abs() <= 3.0 * est.std_p_fail);

        let mc = super::super::run_mc(&Linear3::default(), rule, 5, Default::default()).unwrap();
        assert!(
            est.n_sims < mc.n_sims,
            "mnis {} sims vs mc {}",
            est.n_sims,
            mc.n_sims
        );
    }

    #[test]
    fn raw_weight_mean_is_near_one() {
        // Likelihood-ratio normalization identity: E_q[w] = 1 for any shift.
        // Checked at a modest shift where the weight variance is small enough
        // for a 3-sigma empirical test to be meaningful.
        let dim = 18;
        let mut shift = vec![0.0; dim];
        shift[0] = 1.5;
        let n = 20_000u64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..n {
            let mut x = rng::standard_normal_vec(11, SAMPLE_STREAM, i, dim);
            for (v, m) in x.iter_mut().zip(&shift) {
                *v += m;
            }
            let w = log_shift_weight(&x, &shift).exp();
            sum += w;
            sum_sq += w * w;
        }
        let mean = sum / n as f64;
        let std = ((sum_sq / n as f64 - mean * mean).max(0.0) / n as f64).sqrt();
        assert!(
            (mean - 1.0).abs() <= 3.0 * std,
            "weight mean {mean} ± {std}"
        );
    }

    #[test]
    fn polish_reaches_the_boundary_from_a_noisy_start() {
        let limit = Linear3::default();
        let mut start = vec![0.7; limit.dimension()];
        start[0] = 4.4;
        assert!(limit.is_failure(&start));
        let mut evals = 0;
        let polished = polish_toward_boundary(&limit, start, &mut evals);
        assert!(limit.is_failure(&polished));
        assert!((polished[0] - 3.0).abs() < 0.05, "x0 = {}", polished[0]);
        let rest: f64 = polished[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(rest < 0.1, "off-axis norm {rest}");
        assert!(evals > 0);
    }

    #[test]
    fn missing_failure_region_reports_shift_not_found() {
        struct NeverFail;
        impl LimitState for NeverFail {
            fn dimension(&self) -> usize {
                3
            }
            fn margin(&self, _x: &[f64]) -> f64 {
                1.0
            }
        }
        let err = run_mnis(&NeverFail, StoppingRule::default(), 1, MnisOptions::default())
            .unwrap_err();
        match err {
            Error::ShiftNotFound { n_presampled } => assert_eq!(n_presampled, 1000),
            other => panic!("unexpected error {other}"),
        }
    }
}
