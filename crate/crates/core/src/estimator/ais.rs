//! Adaptive importance sampling via cross-entropy refinement.
//!
//! Several proposal chains run in parallel (initial means are antithetic
//! pairs, so symmetric failure modes are discovered deterministically). Each
//! iteration samples from the chain's diagonal Gaussian, selects the elite
//! fraction (failing samples first, then nearest-to-failure by margin),
//! and refits mean and diagonal covariance with likelihood-ratio weights
//! toward the original density. The final estimate samples an equal-weight
//! mixture of the refined proposals, floored at unit variance, and weights by
//! the exact mixture likelihood ratio.

use rand_distr::{Distribution, StandardNormal};

use super::mnis::polish_toward_boundary;
use super::{
    log_gaussian_diag_unnormalized, log_phi_unnormalized, margins_of, LimitState, Method, RunState,
    RunStatus, StoppingRule, TermAccumulator, YieldEstimate,
};
use crate::rng;
use crate::Result;

const INIT_STREAM: &str = "ais.init";
const ITER_STREAM: &str = "ais.iter";
const SAMPLE_STREAM: &str = "ais.sample";

/// Search-phase variance clamp.
const VAR_FLOOR: f64 = 0.04;
const VAR_CAP: f64 = 4.0;
/// Estimation-phase variance floor; keeps likelihood ratios integrable.
const EST_VAR_FLOOR: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AisOptions {
    /// Samples per cross-entropy iteration (split across chains).
    pub n_per_iter: u64,
    pub elite_fraction: f64,
    pub max_iters: u32,
    /// Number of proposal chains; initial means form antithetic pairs.
    pub k_starts: usize,
    /// Smoothing factor applied to mean updates (1 = replace).
    pub smoothing: f64,
}

impl Default for AisOptions {
    fn default() -> Self {
        AisOptions {
            n_per_iter: 400,
            elite_fraction: 0.25,
            max_iters: 12,
            k_starts: 2,
            smoothing: 0.7,
        }
    }
}

/// One cross-entropy proposal chain.
#[derive(Debug, Clone)]
pub(crate) struct Proposal {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

impl Proposal {
    fn sample(&self, rng: &mut impl rand::Rng) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.var)
            .map(|(m, v)| {
                let z: f64 = StandardNormal.sample(rng);
                m + v.sqrt() * z
            })
            .collect()
    }
}

/// Cross-entropy search. Returns refined proposals and charges all
/// evaluations to `state`.
fn cross_entropy_search(
    limit: &dyn LimitState,
    seed: u64,
    options: &AisOptions,
    state: &mut RunState,
) -> Vec<Proposal> {
    let dim = limit.dimension();
    let k = options.k_starts.max(1);

    // Antithetic unit-norm initial means: chains 2j and 2j+1 start at ±m_j.
    let mut chains: Vec<Proposal> = (0..k)
        .map(|j| {
            let mut m = rng::standard_normal_vec(seed, INIT_STREAM, (j / 2) as u64, dim);
            let norm = m.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            for v in &mut m {
                *v *= sign / norm;
            }
            Proposal {
                mean: m,
                var: vec![1.0; dim],
            }
        })
        .collect();

    let per_chain = (options.n_per_iter / k as u64).max(8);
    // Minimum-norm failing sample seen by each chain.
    let mut best_failing: Vec<Option<(f64, Vec<f64>)>> = vec![None; k];
    let mut saturated_iters = 0u32;
    let mut index: u64 = 0;
    for _iter in 0..options.max_iters {
        if state.budget_left() < per_chain * k as u64 {
            break;
        }
        let mut all_saturated = true;
        for (chain_idx, chain) in chains.iter_mut().enumerate() {
            let points: Vec<Vec<f64>> = (0..per_chain)
                .map(|_| {
                    let mut r = rng::stream(seed, ITER_STREAM, index);
                    index += 1;
                    chain.sample(&mut r)
                })
                .collect();
            let margins = margins_of(limit, &points);
            state.charge(per_chain);

            for (p, &m) in points.iter().zip(&margins) {
                if m < 0.0 {
                    let n2: f64 = p.iter().map(|v| v * v).sum();
                    let slot = &mut best_failing[chain_idx];
                    if slot.as_ref().map_or(true, |(b, _)| n2 < *b) {
                        *slot = Some((n2, p.clone()));
                    }
                }
            }

            // Elite selection: failing samples first, then nearest to the
            // boundary; indicator-only limits keep failing samples only.
            let mut order: Vec<usize> = (0..points.len()).collect();
            if limit.has_margin() {
                order.sort_by(|&a, &b| margins[a].total_cmp(&margins[b]));
            } else {
                order.retain(|&i| margins[i] < 0.0);
            }
            let n_elite = ((per_chain as f64 * options.elite_fraction) as usize).max(4);
            let elite: Vec<usize> = order.into_iter().take(n_elite).collect();
            if elite.is_empty() {
                continue;
            }
            let n_fail = elite.iter().filter(|&&i| margins[i] < 0.0).count();
            let saturated = n_fail * 5 >= elite.len() * 4;
            if !saturated {
                all_saturated = false;
            }

            // Level-search phase: unweighted elite fit drags the proposal
            // toward the failure region. Once elites are dominated by
            // failures, switch to likelihood-ratio weights toward the
            // original density, which pulls the mean onto the most probable
            // failure point instead of deeper into the tail.
            let weights: Vec<f64> = if saturated {
                let raw: Vec<f64> = elite
                    .iter()
                    .map(|&i| {
                        (log_phi_unnormalized(&points[i])
                            - log_gaussian_diag_unnormalized(&points[i], &chain.mean, &chain.var))
                        .min(50.0)
                        .exp()
                    })
                    .collect();
                if raw.iter().sum::<f64>() > 0.0 && raw.iter().all(|w| w.is_finite()) {
                    raw
                } else {
                    vec![1.0; elite.len()]
                }
            } else {
                vec![1.0; elite.len()]
            };
            let wsum: f64 = weights.iter().sum();

            let mut new_mean = vec![0.0; dim];
            for (&i, &w) in elite.iter().zip(&weights) {
                for (acc, v) in new_mean.iter_mut().zip(&points[i]) {
                    *acc += w * v;
                }
            }
            for v in &mut new_mean {
                *v /= wsum;
            }
            let mut new_var = vec![0.0; dim];
            for (&i, &w) in elite.iter().zip(&weights) {
                for j in 0..dim {
                    let d = points[i][j] - new_mean[j];
                    new_var[j] += w * d * d;
                }
            }
            let mut clamped = false;
            for v in &mut new_var {
                *v /= wsum;
                if *v < VAR_FLOOR {
                    *v = VAR_FLOOR;
                    clamped = true;
                }
                if *v > VAR_CAP {
                    *v = VAR_CAP;
                    clamped = true;
                }
            }
            if clamped {
                state
                    .warnings
                    .push("proposal covariance clamped to [floor, cap]".into());
            }

            let a = options.smoothing;
            for j in 0..dim {
                chain.mean[j] = (1.0 - a) * chain.mean[j] + a * new_mean[j];
                chain.var[j] = (1.0 - a) * chain.var[j] + a * new_var[j];
            }
        }
        // A few consecutive saturated iterations mean every chain has settled
        // on its failure region; further refinement wastes budget.
        if all_saturated {
            saturated_iters += 1;
            if saturated_iters >= 3 {
                break;
            }
        } else {
            saturated_iters = 0;
        }
    }

    // Re-center each chain on its best failing sample polished to the
    // boundary: the cross-entropy iterations discover the region and adapt
    // the covariance, the polish removes the residual tail bias and off-axis
    // noise from the mean.
    for (chain, best) in chains.iter_mut().zip(best_failing) {
        if let Some((_, point)) = best {
            let mut polish_evals = 0u64;
            let polished = polish_toward_boundary(limit, point, &mut polish_evals);
            state.charge(polish_evals.min(state.budget_left()));
            chain.mean = polished;
        }
    }
    chains
}

/// Draw from the equal-weight mixture and return the standard-normal
/// likelihood ratio for sample index `i`.
fn mixture_draw(proposals: &[Proposal], seed: u64, index: u64) -> (Vec<f64>, f64) {
    let k = proposals.len();
    let mut r = rng::stream(seed, SAMPLE_STREAM, index);
    let component = (index % k as u64) as usize;
    let x = proposals[component].sample(&mut r);

    // log q(x) = logsumexp_j [log(1/k) + log N(x; m_j, V_j)] + const
    let logs: Vec<f64> = proposals
        .iter()
        .map(|p| log_gaussian_diag_unnormalized(&x, &p.mean, &p.var))
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_q = max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
        - (k as f64).ln();
    let log_w = log_phi_unnormalized(&x) - log_q;
    (x, log_w.exp())
}

pub fn run_ais(
    limit: &dyn LimitState,
    rule: StoppingRule,
    seed: u64,
    options: AisOptions,
) -> Result<YieldEstimate> {
    rule.validate()?;
    let mut state = RunState::new(rule);

    let mut proposals = cross_entropy_search(limit, seed, &options, &mut state);
    for p in &mut proposals {
        for v in &mut p.var {
            *v = v.max(EST_VAR_FLOOR);
        }
    }

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
        let draws: Vec<(Vec<f64>, f64)> = (next_index..next_index + batch)
            .map(|i| mixture_draw(&proposals, seed, i))
            .collect();
        next_index += batch;
        let points: Vec<Vec<f64>> = draws.iter().map(|(x, _)| x.clone()).collect();
        let margins = margins_of(limit, &points);
        state.charge(batch);

        for ((_, w), &m) in draws.iter().zip(&margins) {
            let failed = m < 0.0;
            acc.push(if failed { *w } else { 0.0 }, failed);
        }
        state.record(acc.p_fail(), acc.std_p_fail());
        if let Some(status) = state.should_stop(acc.fom(), acc.n_failures) {
            break status;
        }
    };

    Ok(state.finish(Method::Ais, &acc, status))
}

/// Refined proposal means, exposed for convergence diagnostics and tests.
pub fn refined_means(
    limit: &dyn LimitState,
    rule: StoppingRule,
    seed: u64,
    options: AisOptions,
) -> Vec<Vec<f64>> {
    let mut state = RunState::new(rule);
    cross_entropy_search(limit, seed, &options, &mut state)
        .into_iter()
        .map(|p| p.mean)
        .collect()
}
