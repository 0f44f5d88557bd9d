//! Hyperspherical presampling with cluster-mixture importance sampling.
//!
//! Failure regions are located by sampling uniform directions on spheres of
//! increasing radius (the schedule is expressed in multiples of `sqrt(dim)`,
//! the typical norm of a standard-normal vector). Failing points are
//! clustered with k-means; each cluster centroid is sparsified (coordinates
//! below a fraction of the largest magnitude are zeroed — failure boundaries
//! in standardized variation space are typically low-dimensional) and the
//! boundary is re-located by a ray scan plus bisection along the sparsified
//! direction. The resulting boundary points center an equal-weight Gaussian
//! mixture proposal; estimation uses exact mixture likelihood ratios.

use rand::Rng;

use super::{
    log_phi_unnormalized, margins_of, LimitState, Method, RunState, RunStatus, StoppingRule,
    TermAccumulator, YieldEstimate,
};
use crate::rng;
use crate::{Error, Result};

const SPHERE_STREAM: &str = "hscs.sphere";
const KMEANS_STREAM: &str = "hscs.kmeans";
const SAMPLE_STREAM: &str = "hscs.sample";

#[derive(Debug, Clone, PartialEq)]
pub struct HscsOptions {
    /// Directions sampled per sphere radius.
    pub n_sphere_samples: u64,
    /// Sphere radii as multiples of `sqrt(dim)`.
    pub radii_schedule: Vec<f64>,
    pub n_clusters: usize,
    /// Stop exploring once this many failing points are collected.
    pub target_failures: usize,
    /// Sparsification threshold: centroid coordinates below this fraction of
    /// the largest magnitude are zeroed before the boundary search.
    pub sparsify_fraction: f64,
}

impl Default for HscsOptions {
    fn default() -> Self {
        HscsOptions {
            n_sphere_samples: 96,
            radii_schedule: vec![0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0],
            n_clusters: 2,
            target_failures: 48,
            sparsify_fraction: 0.25,
        }
    }
}

fn unit_direction(seed: u64, index: u64, dim: usize) -> Vec<f64> {
    let mut d = rng::standard_normal_vec(seed, SPHERE_STREAM, index, dim);
    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    for v in &mut d {
        *v /= norm;
    }
    d
}

/// Plain k-means with deterministic k-means++ seeding.
fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<Vec<f64>> {
    let k = k.min(points.len()).max(1);
    let dim = points[0].len();
    let mut rng = rng::stream(seed, KMEANS_STREAM, 0);

    let mut centroids: Vec<Vec<f64>> = vec![points[rng.gen_range(0..points.len())].clone()];
    while centroids.len() < k {
        let dists: Vec<f64> = points
            .iter()
            .map(|p| {
                centroids
                    .iter()
                    .map(|c| p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = dists.iter().sum();
        if total <= 0.0 {
            centroids.push(points[centroids.len() % points.len()].clone());
            continue;
        }
        let mut pick = rng.gen::<f64>() * total;
        let mut chosen = points.len() - 1;
        for (i, d) in dists.iter().enumerate() {
            pick -= d;
            if pick <= 0.0 {
                chosen = i;
                break;
            }
        }
        centroids.push(points[chosen].clone());
    }

    let mut assignment = vec![0usize; points.len()];
    for _ in 0..25 {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let best = (0..centroids.len())
                .min_by(|&a, &b| {
                    let da: f64 =
                        p.iter().zip(&centroids[a]).map(|(x, c)| (x - c) * (x - c)).sum();
                    let db: f64 =
                        p.iter().zip(&centroids[b]).map(|(x, c)| (x - c) * (x - c)).sum();
                    da.total_cmp(&db)
                })
                .unwrap();
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        for (ci, centroid) in centroids.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = points
                .iter()
                .zip(&assignment)
                .filter(|(_, &a)| a == ci)
                .map(|(p, _)| p)
                .collect();
            if members.is_empty() {
                continue;
            }
            for j in 0..dim {
                centroid[j] = members.iter().map(|p| p[j]).sum::<f64>() / members.len() as f64;
            }
        }
        if !changed {
            break;
        }
    }
    centroids
}

/// Zero coordinates below `fraction` of the largest magnitude, then
/// normalize. Returns `None` for a zero vector.
fn sparsify(direction: &[f64], fraction: f64) -> Option<Vec<f64>> {
    let max = direction.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max <= 0.0 {
        return None;
    }
    let mut d: Vec<f64> = direction
        .iter()
        .map(|&v| if v.abs() >= fraction * max { v } else { 0.0 })
        .collect();
    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= 0.0 {
        return None;
    }
    for v in &mut d {
        *v /= norm;
    }
    Some(d)
}

/// Locate the failure boundary along `direction` by a coarse scan followed by
/// bisection. Returns a failing point near the boundary and the evaluation
/// count, or `None` when the ray never fails within `max_radius`.
fn boundary_along_ray(
    limit: &dyn LimitState,
    direction: &[f64],
    max_radius: f64,
    evals: &mut u64,
) -> Option<Vec<f64>> {
    const SCAN: usize = 24;
    let at = |t: f64| -> Vec<f64> { direction.iter().map(|d| d * t).collect() };
    let mut lo = 0.0f64;
    let mut hi = None;
    for s in 1..=SCAN {
        let t = max_radius * s as f64 / SCAN as f64;
        *evals += 1;
        if limit.is_failure(&at(t)) {
            hi = Some(t);
            break;
        }
        lo = t;
    }
    let mut hi = hi?;
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        *evals += 1;
        if limit.is_failure(&at(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(at(hi))
}

/// Mixture proposal centers discovered by exploration; exposed for tests.
pub fn discover_centers(
    limit: &dyn LimitState,
    seed: u64,
    options: &HscsOptions,
) -> Result<(Vec<Vec<f64>>, u64)> {
    let dim = limit.dimension();
    let scale = (dim as f64).sqrt();
    let mut evals: u64 = 0;
    let mut failing: Vec<Vec<f64>> = Vec::new();
    let mut index: u64 = 0;
    let mut max_radius = 0.0f64;

    for &mult in &options.radii_schedule {
        let r = mult * scale;
        max_radius = max_radius.max(r);
        let points: Vec<Vec<f64>> = (0..options.n_sphere_samples)
            .map(|_| {
                let mut p = unit_direction(seed, index, dim);
                index += 1;
                for v in &mut p {
                    *v *= r;
                }
                p
            })
            .collect();
        let margins = margins_of(limit, &points);
        evals += options.n_sphere_samples;
        for (p, &m) in points.into_iter().zip(&margins) {
            if m < 0.0 {
                failing.push(p);
            }
        }
        if failing.len() >= options.target_failures {
            break;
        }
    }
    if failing.is_empty() {
        return Err(Error::RegionNotFound { max_radius });
    }

    let centroids = kmeans(&failing, options.n_clusters, seed);
    let mut centers = Vec::with_capacity(centroids.len());
    for centroid in &centroids {
        let norm = centroid.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ray_limit = (norm * 1.5).max(1.0);
        // Candidate directions at increasing sparsification strength, plus
        // the raw centroid direction; keep the boundary point of minimal
        // norm — the most probable failure point among the candidates.
        let mut taus = vec![0.0, options.sparsify_fraction];
        taus.extend([0.4, 0.6, 0.85]);
        let mut best: Option<Vec<f64>> = None;
        for tau in taus {
            let Some(dir) = sparsify(centroid, tau) else { continue };
            if let Some(point) = boundary_along_ray(limit, &dir, ray_limit, &mut evals) {
                let n2: f64 = point.iter().map(|v| v * v).sum();
                let better = best
                    .as_ref()
                    .map_or(true, |b| n2 < b.iter().map(|v| v * v).sum::<f64>());
                if better {
                    best = Some(point);
                }
            }
        }
        centers.push(best.unwrap_or_else(|| centroid.clone()));
    }
    Ok((centers, evals))
}

/// Log-density of the equal-weight unit-variance Gaussian mixture, up to the
/// same constant dropped from the standard normal.
fn log_mixture_unnormalized(x: &[f64], centers: &[Vec<f64>]) -> f64 {
    let logs: Vec<f64> = centers
        .iter()
        .map(|c| -0.5 * x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln() - (centers.len() as f64).ln()
}

pub fn run_hscs(
    limit: &dyn LimitState,
    rule: StoppingRule,
    seed: u64,
    options: HscsOptions,
) -> Result<YieldEstimate> {
    rule.validate()?;
    let dim = limit.dimension();
    let mut state = RunState::new(rule);

    let (centers, exploration_evals) = discover_centers(limit, seed, &options)?;
    state.charge(exploration_evals.min(state.budget_left()));

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
                let component = (i % centers.len() as u64) as usize;
                let mut x = rng::standard_normal_vec(seed, SAMPLE_STREAM, i, dim);
                for (v, c) in x.iter_mut().zip(&centers[component]) {
                    *v += c;
                }
                x
            })
            .collect();
        next_index += batch;
        let margins = margins_of(limit, &points);
        state.charge(batch);

        for (x, &m) in points.iter().zip(&margins) {
            let failed = m < 0.0;
            let w = (log_phi_unnormalized(x) - log_mixture_unnormalized(x, &centers)).exp();
            acc.push(if failed { w } else { 0.0 }, failed);
        }
        state.record(acc.p_fail(), acc.std_p_fail());
        if let Some(status) = state.should_stop(acc.fom(), acc.n_failures) {
            break status;
        }
    };

    Ok(state.finish(Method::Hscs, &acc, status))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{truth, Planted1Sparse, TwoTail35};

    #[test]
    fn two_mode_oracle_yields_opposite_sign_centers() {
        let (centers, _) =
            discover_centers(&TwoTail35::default(), 3, &HscsOptions::default()).unwrap();
        assert_eq!(centers.len(), 2);
        let signs: Vec<f64> = centers.iter().map(|c| c[0]).collect();
        assert!(
            signs.iter().any(|&s| s > 3.0) && signs.iter().any(|&s| s < -3.0),
            "centers x0 = {signs:?}"
        );
    }

    #[test]
    fn estimates_two_tail_probability() {
        let rule = StoppingRule {
            fom_target: 0.1,
            max_sims: 100_000,
            ..Default::default()
        };
        let est = run_hscs(&TwoTail35::default(), rule, 7, HscsOptions::default()).unwrap();
        assert!(
            (est.p_fail - truth::TWOTAIL35).abs() <= 3.0 * est.std_p_fail,
            "p={} std={}",
            est.p_fail,
            est.std_p_fail
        );
    }

    #[test]
    fn high_dimensional_planted_boundary_completes_in_budget() {
        let rule = StoppingRule {
            fom_target: 0.1,
            max_sims: 20_000,
            min_failures: 10,
            batch_size: 512,
        };
        let est = run_hscs(&Planted1Sparse::default(), rule, 5, HscsOptions::default()).unwrap();
        assert!(est.n_sims <= 20_000);
        assert!(
            (est.p_fail - truth::PLANTED1SPARSE).abs() <= 3.0 * est.std_p_fail,
            "p={} std={} truth={}",
            est.p_fail,
            est.std_p_fail,
            truth::PLANTED1SPARSE
        );
    }

    #[test]
    fn missing_region_is_reported() {
        struct NeverFail;
        impl LimitState for NeverFail {
            fn dimension(&self) -> usize {
                8
            }
            fn margin(&self, _x: &[f64]) -> f64 {
                1.0
            }
        }
        let err =
            run_hscs(&NeverFail, StoppingRule::default(), 1, HscsOptions::default()).unwrap_err();
        assert!(matches!(err, Error::RegionNotFound { .. }));
    }

    #[test]
    fn deterministic_per_seed() {
        let rule = StoppingRule {
            max_sims: 30_000,
            ..Default::default()
        };
        let a = run_hscs(&TwoTail35::default(), rule, 9, HscsOptions::default()).unwrap();
        let b = run_hscs(&TwoTail35::default(), rule, 9, HscsOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
