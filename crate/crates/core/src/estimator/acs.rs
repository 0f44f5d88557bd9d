//! Adaptive compressed sampling: sparse recovery of the limit-state margin
//! followed by importance sampling along the recovered subspace.
//!
//! Probe samples regress a sparse linear surrogate of the margin via
//! matching pursuit (greedy coordinate selection with least-squares refits).
//! The importance-sampling shift is the minimum-norm failure point of that
//! surrogate, `x* = -c·a/‖a‖²`, which lives in the recovered subspace.
//! Support and shift are re-estimated on a fixed schedule; every estimator
//! term is weighted against its own stage's proposal, which keeps the pooled
//! estimate unbiased. Weak recoveries (low explained variance) fall back to
//! mean-shifted IS.

use super::mnis::{find_shift, log_shift_weight, shifted_estimation};
use super::{margins_of, LimitState, Method, RunState, RunStatus, StoppingRule, TermAccumulator, YieldEstimate};
use crate::rng;
use crate::Result;

const PROBE_STREAM: &str = "acs.probe";
const SAMPLE_STREAM: &str = "acs.sample";
const FALLBACK_STREAM: &str = "acs.fallback";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcsOptions {
    /// Maximum size of the recovered support.
    pub sparsity_k: usize,
    /// Probe samples for the initial fit.
    pub n_probe: u64,
    /// Standard deviation of the probing Gaussian.
    pub probe_sigma: f64,
    /// Number of support (re-)estimation stages.
    pub n_stage: u32,
    /// IS samples between re-estimations.
    pub refit_interval: u64,
    /// Minimum explained-variance ratio; below this the sparse surrogate is
    /// considered unreliable and the run falls back to MNIS.
    pub min_r2: f64,
}

impl Default for AcsOptions {
    fn default() -> Self {
        AcsOptions {
            sparsity_k: 8,
            n_probe: 600,
            probe_sigma: 1.5,
            n_stage: 3,
            refit_interval: 2000,
            min_r2: 0.5,
        }
    }
}

/// Sparse linear margin model `m(x) ≈ c + Σ_{j∈support} a_j x_j`.
#[derive(Debug, Clone)]
pub struct SparseModel {
    pub intercept: f64,
    /// `(coordinate, coefficient)` pairs.
    pub terms: Vec<(usize, f64)>,
    /// Explained-variance ratio of the fit.
    pub r_squared: f64,
}

impl SparseModel {
    pub fn support(&self) -> Vec<usize> {
        self.terms.iter().map(|&(j, _)| j).collect()
    }

    /// Minimum-norm point on the fitted boundary `c + a·x = 0`.
    fn min_norm_boundary_point(&self, dim: usize) -> Vec<f64> {
        let norm2: f64 = self.terms.iter().map(|&(_, a)| a * a).sum();
        let mut x = vec![0.0; dim];
        if norm2 > 0.0 {
            for &(j, a) in &self.terms {
                x[j] = -self.intercept * a / norm2;
            }
        }
        x
    }
}

/// Solve the small symmetric system `G·b = r` by Gaussian elimination with
/// partial pivoting. `G` is `k×k` row-major.
fn solve_dense(mut g: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let k = r.len();
    for col in 0..k {
        let pivot = (col..k).max_by(|&a, &b| g[a][col].abs().total_cmp(&g[b][col].abs()))?;
        if g[pivot][col].abs() < 1e-12 {
            return None;
        }
        g.swap(col, pivot);
        r.swap(col, pivot);
        for row in col + 1..k {
            let f = g[row][col] / g[col][col];
            for c in col..k {
                g[row][c] -= f * g[col][c];
            }
            r[row] -= f * r[col];
        }
    }
    let mut b = vec![0.0; k];
    for col in (0..k).rev() {
        let mut acc = r[col];
        for c in col + 1..k {
            acc -= g[col][c] * b[c];
        }
        b[col] = acc / g[col][col];
    }
    Some(b)
}

/// Matching-pursuit fit of a sparse linear model to `(points, margins)`.
/// Non-finite margins are dropped.
pub(crate) fn matching_pursuit(
    points: &[Vec<f64>],
    margins: &[f64],
    dim: usize,
    sparsity_k: usize,
) -> Option<SparseModel> {
    let rows: Vec<usize> = (0..points.len()).filter(|&i| margins[i].is_finite()).collect();
    if rows.len() < 16 {
        return None;
    }
    let n = rows.len() as f64;
    let mean_m = rows.iter().map(|&i| margins[i]).sum::<f64>() / n;
    let total_var: f64 = rows.iter().map(|&i| (margins[i] - mean_m).powi(2)).sum::<f64>() / n;
    if total_var < 1e-24 {
        return None;
    }

    let mut support: Vec<usize> = Vec::new();
    let mut coeffs: Vec<f64> = Vec::new();
    let mut intercept = mean_m;
    let mut residual: Vec<f64> = rows.iter().map(|&i| margins[i] - mean_m).collect();
    let mut res_var = total_var;

    for _ in 0..sparsity_k.min(dim) {
        // Coordinate most correlated with the residual.
        let mut best = (0usize, 0.0f64);
        for j in 0..dim {
            if support.contains(&j) {
                continue;
            }
            let corr: f64 = rows
                .iter()
                .enumerate()
                .map(|(ri, &i)| points[i][j] * residual[ri])
                .sum::<f64>()
                / n;
            if corr.abs() > best.1.abs() {
                best = (j, corr);
            }
        }
        if best.1.abs() < 1e-12 {
            break;
        }
        support.push(best.0);

        // Least-squares refit over the selected coordinates (plus intercept).
        let k = support.len();
        let mut g = vec![vec![0.0; k + 1]; k + 1];
        let mut rhs = vec![0.0; k + 1];
        for &i in &rows {
            let mut row_vals = Vec::with_capacity(k + 1);
            row_vals.push(1.0);
            for &j in &support {
                row_vals.push(points[i][j]);
            }
            for a in 0..k + 1 {
                for b in 0..k + 1 {
                    g[a][b] += row_vals[a] * row_vals[b];
                }
                rhs[a] += row_vals[a] * margins[i];
            }
        }
        let Some(beta) = solve_dense(g, rhs) else {
            support.pop();
            break;
        };
        intercept = beta[0];
        coeffs = beta[1..].to_vec();

        for (ri, &i) in rows.iter().enumerate() {
            let mut pred = intercept;
            for (s, &j) in support.iter().enumerate() {
                pred += coeffs[s] * points[i][j];
            }
            residual[ri] = margins[i] - pred;
        }
        let new_res_var = residual.iter().map(|r| r * r).sum::<f64>() / n;
        if res_var - new_res_var < 1e-4 * total_var {
            res_var = new_res_var;
            break;
        }
        res_var = new_res_var;
    }

    // Prune negligible coefficients.
    let max_a = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let terms: Vec<(usize, f64)> = support
        .iter()
        .zip(&coeffs)
        .filter(|(_, a)| a.abs() >= 0.05 * max_a)
        .map(|(&j, &a)| (j, a))
        .collect();
    if terms.is_empty() {
        return None;
    }
    Some(SparseModel {
        intercept,
        terms,
        r_squared: 1.0 - res_var / total_var,
    })
}

fn draw_probe(seed: u64, index: u64, dim: usize, sigma: f64) -> Vec<f64> {
    let mut x = rng::standard_normal_vec(seed, PROBE_STREAM, index, dim);
    for v in &mut x {
        *v *= sigma;
    }
    x
}

pub fn run_acs(
    limit: &dyn LimitState,
    rule: StoppingRule,
    seed: u64,
    options: AcsOptions,
) -> Result<YieldEstimate> {
    rule.validate()?;
    let dim = limit.dimension();
    let mut state = RunState::new(rule);

    if !limit.has_margin() {
        return run_fallback(limit, seed, state, "limit state exposes no margin".into());
    }

    // Stage 0 probes and initial fit.
    let mut probe_points: Vec<Vec<f64>> = Vec::new();
    let mut probe_margins: Vec<f64> = Vec::new();
    let mut probe_index: u64 = 0;
    let n0 = options.n_probe.min(state.budget_left());
    let fresh: Vec<Vec<f64>> = (0..n0)
        .map(|_| {
            let p = draw_probe(seed, probe_index, dim, options.probe_sigma);
            probe_index += 1;
            p
        })
        .collect();
    probe_margins.extend(margins_of(limit, &fresh));
    probe_points.extend(fresh);
    state.charge(n0);

    let model = matching_pursuit(&probe_points, &probe_margins, dim, options.sparsity_k);
    let mut shift = match model {
        Some(m) if m.r_squared >= options.min_r2 => m.min_norm_boundary_point(dim),
        Some(m) => {
            return run_fallback(
                limit,
                seed,
                state,
                format!("sparse surrogate explains only {:.0}% of margin variance", 100.0 * m.r_squared),
            )
        }
        None => return run_fallback(limit, seed, state, "sparse recovery found empty support".into()),
    };

    let mut acc = TermAccumulator::default();
    let mut next_index: u64 = 0;
    let mut sims_since_refit: u64 = 0;
    let mut stages_done: u32 = 1;
    let status = loop {
        let batch = state.rule.batch_size.min(state.budget_left());
        if batch == 0 {
            break if acc.n_failures == 0 {
                RunStatus::Unresolved
            } else {
                RunStatus::BudgetExhausted
            };
        }

        // Scheduled support re-estimation.
        if stages_done < options.n_stage && sims_since_refit >= options.refit_interval {
            let refresh = (options.n_probe / 2).min(state.budget_left());
            if refresh > 0 {
                let fresh: Vec<Vec<f64>> = (0..refresh)
                    .map(|_| {
                        let p = draw_probe(seed, probe_index, dim, options.probe_sigma);
                        probe_index += 1;
                        p
                    })
                    .collect();
                probe_margins.extend(margins_of(limit, &fresh));
                probe_points.extend(fresh);
                state.charge(refresh);
                if let Some(m) = matching_pursuit(&probe_points, &probe_margins, dim, options.sparsity_k)
                {
                    if m.r_squared >= options.min_r2 {
                        shift = m.min_norm_boundary_point(dim);
                    }
                }
            }
            stages_done += 1;
            sims_since_refit = 0;
        }

        let shift_now = shift.clone();
        let points: Vec<Vec<f64>> = (next_index..next_index + batch)
            .map(|i| {
                let mut x = rng::standard_normal_vec(seed, SAMPLE_STREAM, i, dim);
                for (v, m) in x.iter_mut().zip(&shift_now) {
                    *v += m;
                }
                x
            })
            .collect();
        next_index += batch;
        let margins = margins_of(limit, &points);
        state.charge(batch);
        sims_since_refit += batch;

        for (x, &m) in points.iter().zip(&margins) {
            let failed = m < 0.0;
            let w = log_shift_weight(x, &shift_now).exp();
            acc.push(if failed { w } else { 0.0 }, failed);
        }
        state.record(acc.p_fail(), acc.std_p_fail());
        if let Some(status) = state.should_stop(acc.fom(), acc.n_failures) {
            break status;
        }
    };

    Ok(state.finish(Method::Acs, &acc, status))
}

/// MNIS-style fallback sharing the already-charged budget.
fn run_fallback(
    limit: &dyn LimitState,
    seed: u64,
    mut state: RunState,
    reason: String,
) -> Result<YieldEstimate> {
    state.warnings.push(format!("falling back to mean-shift IS: {reason}"));
    let shift = find_shift(limit, seed, FALLBACK_STREAM, 1000, 2.0, &mut state)?;
    let (acc, status) = shifted_estimation(limit, &shift, seed, SAMPLE_STREAM, &mut state);
    Ok(state.finish(Method::Acs, &acc, status))
}

/// Recovered support for diagnostics and tests.
pub fn recovered_support(
    limit: &dyn LimitState,
    seed: u64,
    options: AcsOptions,
) -> Option<Vec<usize>> {
    let dim = limit.dimension();
    let points: Vec<Vec<f64>> =
        (0..options.n_probe).map(|i| draw_probe(seed, i, dim, options.probe_sigma)).collect();
    let margins = margins_of(limit, &points);
    matching_pursuit(&points, &margins, dim, options.sparsity_k).map(|m| m.support())
}
