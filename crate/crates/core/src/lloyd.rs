//! Standard K-means (Lloyd's algorithm) with random-sample initialization.

use std::time::Instant;

use ndarray::{Array2, Axis};
use rand::Rng;

use crate::error::{ClusterError, Result};
use crate::model::{
    objective_complete, sq_dist_unchecked, Assignment, ClusterModel, Dataset, IterationRecord,
    RunConfig, RunTrace,
};
use crate::rng::{derive_seed, rng_from_seed};
use crate::scalar::Scalar;

/// Output of a Lloyd or MM fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydResult<T> {
    pub model: ClusterModel<T>,
    pub assignment: Assignment,
    pub trace: RunTrace<T>,
}

impl<T: Scalar> LloydResult<T> {
    pub fn final_objective(&self) -> T {
        self.trace
            .final_objective()
            .expect("a fit always records at least one iteration")
    }
}

/// Picks `k` distinct rows uniformly at random as the initial centroids.
pub fn init_random_samples<T: Scalar, R: Rng + ?Sized>(
    data: &Dataset<T>,
    k: usize,
    rng: &mut R,
) -> Result<ClusterModel<T>> {
    if k == 0 || k > data.m() {
        return Err(ClusterError::InvalidConfig(format!(
            "cannot pick {k} initial centroids from {} samples",
            data.m()
        )));
    }
    let picks = rand::seq::index::sample(rng, data.m(), k).into_vec();
    ClusterModel::new(data.points().select(Axis(0), &picks))
}

/// Assigns every sample to its nearest centroid. Ties go to the lowest cluster index.
pub fn assign_step<T: Scalar>(data: &Dataset<T>, model: &ClusterModel<T>) -> Result<Assignment> {
    if model.d() != data.d() {
        return Err(ClusterError::dim("centroid dimension", data.d(), model.d()));
    }
    let cluster_of = data
        .points()
        .outer_iter()
        .map(|x| {
            let mut best = 0;
            let mut best_dist = T::infinity();
            for (k, mu) in model.centroids().outer_iter().enumerate() {
                let dist = sq_dist_unchecked(x, mu);
                if dist < best_dist {
                    best_dist = dist;
                    best = k;
                }
            }
            best
        })
        .collect();
    Assignment::new(cluster_of, model.k())
}

/// Moves each centroid to the mean of its members. Empty clusters keep their previous centroid.
pub fn centroid_update_step<T: Scalar>(
    data: &Dataset<T>,
    asg: &Assignment,
    k: usize,
    previous: &ClusterModel<T>,
) -> Result<ClusterModel<T>> {
    if asg.len() != data.m() {
        return Err(ClusterError::dim("assignment length", data.m(), asg.len()));
    }
    if previous.k() != k || asg.k() != k {
        return Err(ClusterError::dim("cluster count", k, previous.k().max(asg.k())));
    }
    if previous.d() != data.d() {
        return Err(ClusterError::dim("centroid dimension", data.d(), previous.d()));
    }
    let d = data.d();
    let mut sums = Array2::<T>::zeros((k, d));
    let mut counts = vec![0usize; k];
    for (i, x) in data.points().outer_iter().enumerate() {
        let c = asg.cluster(i);
        counts[c] += 1;
        for j in 0..d {
            sums[[c, j]] = sums[[c, j]] + x[j];
        }
    }
    let mut next = previous.clone();
    let centroids = next.centroids_mut();
    for c in 0..k {
        if counts[c] == 0 {
            continue;
        }
        let n = T::from_count(counts[c]);
        for j in 0..d {
            centroids[[c, j]] = sums[[c, j]] / n;
        }
    }
    Ok(next)
}

/// One complete Lloyd run from a random-sample initialization drawn with `cfg.seed`.
pub fn run_lloyd<T: Scalar>(data: &Dataset<T>, cfg: &RunConfig) -> Result<LloydResult<T>> {
    cfg.validate(data.m())?;
    let start = Instant::now();
    let mut rng = rng_from_seed(cfg.seed);
    let initial = init_random_samples(data, cfg.k, &mut rng)?;
    let mut result = lloyd_from(data, initial, cfg)?;
    result.trace.elapsed = start.elapsed().as_secs_f64();
    Ok(result)
}

/// Lloyd iterations from explicit initial centroids. `cfg.seed` is ignored.
pub fn lloyd_from<T: Scalar>(
    data: &Dataset<T>,
    initial: ClusterModel<T>,
    cfg: &RunConfig,
) -> Result<LloydResult<T>> {
    cfg.validate(data.m())?;
    if initial.k() != cfg.k {
        return Err(ClusterError::dim("initial centroid count", cfg.k, initial.k()));
    }
    let start = Instant::now();
    let eps = T::from_f64_lossy(cfg.epsilon);
    let mut model = initial;
    let mut iterations = Vec::new();
    let mut converged = false;
    let mut assignment = None;

    for n in 1..=cfg.max_iter {
        let asg = assign_step(data, &model)?;
        let next = centroid_update_step(data, &asg, cfg.k, &model)?;
        let movement = next.movement(&model)?;
        let objective = objective_complete(data, &asg, &next)?;
        iterations.push(IterationRecord {
            n,
            centroids: next.clone(),
            objective,
            movement,
        });
        model = next;
        assignment = Some(asg);
        if movement <= eps {
            converged = true;
            break;
        }
    }

    Ok(LloydResult {
        model,
        assignment: assignment.expect("max_iter >= 1"),
        trace: RunTrace {
            iterations,
            converged,
            elapsed: start.elapsed().as_secs_f64(),
        },
    })
}

/// Seed used by restart `r`; restart 0 reuses the configured seed.
pub(crate) fn restart_seed(seed: u64, r: usize) -> u64 {
    if r == 0 {
        seed
    } else {
        derive_seed(seed, &[r as u64])
    }
}

/// Best of `n_init` independent Lloyd runs by final objective (earliest wins ties).
/// The returned trace's `elapsed` covers all restarts.
pub fn run_lloyd_restarts<T: Scalar>(
    data: &Dataset<T>,
    cfg: &RunConfig,
    n_init: usize,
) -> Result<LloydResult<T>> {
    best_of(n_init, |r| run_lloyd(data, &cfg.with_seed(restart_seed(cfg.seed, r))))
}

pub(crate) fn best_of<T: Scalar>(
    n_init: usize,
    mut fit: impl FnMut(usize) -> Result<LloydResult<T>>,
) -> Result<LloydResult<T>> {
    if n_init == 0 {
        return Err(ClusterError::InvalidConfig(
            "n_init must be at least 1".into(),
        ));
    }
    let start = Instant::now();
    let mut best: Option<LloydResult<T>> = None;
    for r in 0..n_init {
        let candidate = fit(r)?;
        let better = match &best {
            None => true,
            Some(b) => candidate.final_objective() < b.final_objective(),
        };
        if better {
            best = Some(candidate);
        }
    }
    let mut best = best.expect("n_init >= 1");
    best.trace.elapsed = start.elapsed().as_secs_f64();
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    fn ds(rows: &[Vec<f64>]) -> Dataset<f64> {
        Dataset::from_rows(rows, None).unwrap()
    }

    fn random_data(seed: u64, m: usize, d: usize) -> Dataset<f64> {
        let mut rng = rng_from_seed(seed);
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect())
            .collect();
        ds(&rows)
    }

    #[test]
    fn init_k_equals_m_is_a_permutation() {
        let data = ds(&[vec![1.0], vec![2.0], vec![3.0], vec![4.0]]);
        let model = init_random_samples(&data, 4, &mut rng_from_seed(3)).unwrap();
        let mut got: Vec<f64> = model.centroids().iter().copied().collect();
        got.sort_by(f64::total_cmp);
        assert_eq!(got, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn init_single_centroid_is_a_row() {
        let data = random_data(1, 10, 3);
        let model = init_random_samples(&data, 1, &mut rng_from_seed(9)).unwrap();
        assert!(data
            .points()
            .outer_iter()
            .any(|r| r == model.centroid(0)));
    }

    #[test]
    fn init_is_deterministic_and_checks_k() {
        let data = random_data(2, 20, 2);
        let a = init_random_samples(&data, 5, &mut rng_from_seed(11)).unwrap();
        let b = init_random_samples(&data, 5, &mut rng_from_seed(11)).unwrap();
        assert_eq!(a, b);
        assert!(init_random_samples(&data, 21, &mut rng_from_seed(0)).is_err());
        assert!(init_random_samples(&data, 0, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn assign_examples() {
        let model = ClusterModel::from_rows(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![5.0, 5.0]])
            .unwrap();
        let data = ds(&[vec![5.0, 5.0], vec![1.0, 0.0]]);
        let asg = assign_step(&data, &model).unwrap();
        assert_eq!(asg.cluster(0), 2);
        // equidistant to centroids 0 and 1
        assert_eq!(asg.cluster(1), 0);
    }

    proptest! {
        #[test]
        fn assign_matches_exhaustive_argmin(seed in any::<u64>(), k in 1usize..6) {
            let data = random_data(seed, 15, 3);
            let model = init_random_samples(&data, k, &mut rng_from_seed(seed ^ 1)).unwrap();
            let asg = assign_step(&data, &model).unwrap();
            for i in 0..data.m() {
                let dists: Vec<f64> = (0..k)
                    .map(|c| (0..3).map(|j| (data.points()[[i, j]] - model.centroids()[[c, j]]).powi(2)).sum())
                    .collect();
                let min = dists.iter().copied().fold(f64::INFINITY, f64::min);
                let first = dists.iter().position(|&v| v == min).unwrap();
                prop_assert_eq!(asg.cluster(i), first);
            }
            // idempotence
            prop_assert_eq!(assign_step(&data, &model).unwrap(), asg);
        }
    }

    #[test]
    fn update_examples() {
        let data = ds(&[vec![0.0, 0.0], vec![2.0, 2.0], vec![7.0, -1.0]]);
        let asg = Assignment::new(vec![0, 0, 1], 3).unwrap();
        let prev = ClusterModel::from_rows(&[vec![9.0, 9.0], vec![9.0, 9.0], vec![4.0, 4.0]])
            .unwrap();
        let next = centroid_update_step(&data, &asg, 3, &prev).unwrap();
        assert_eq!(next.centroid(0).to_vec(), vec![1.0, 1.0]);
        assert_eq!(next.centroid(1).to_vec(), vec![7.0, -1.0]);
        // empty cluster keeps its centroid
        assert_eq!(next.centroid(2).to_vec(), vec![4.0, 4.0]);
    }

    #[test]
    fn update_beats_grid_perturbations() {
        for seed in 0..20 {
            let data = random_data(seed, 30, 2);
            let model = init_random_samples(&data, 3, &mut rng_from_seed(seed)).unwrap();
            let asg = assign_step(&data, &model).unwrap();
            let next = centroid_update_step(&data, &asg, 3, &model).unwrap();
            let base = objective_complete(&data, &asg, &next).unwrap();
            for c in 0..3 {
                for j in 0..2 {
                    for step in -50..=50 {
                        if step == 0 {
                            continue;
                        }
                        let mut rows = next.to_rows();
                        rows[c][j] += step as f64 * 0.01;
                        let moved = ClusterModel::from_rows(&rows).unwrap();
                        let value = objective_complete(&data, &asg, &moved).unwrap();
                        assert!(value >= base, "seed {seed} c {c} j {j} step {step}");
                    }
                }
            }
        }
    }

    #[test]
    fn four_points_two_clusters() {
        let data = ds(&[vec![0.0], vec![1.0], vec![9.0], vec![10.0]]);
        // brute force over the 2-partitions of four points
        let mut best = (f64::INFINITY, vec![]);
        for bits in 1u32..15 {
            let mut groups = [vec![], vec![]];
            for i in 0..4 {
                groups[((bits >> i) & 1) as usize].push(data.points()[[i, 0]]);
            }
            let sse: f64 = groups
                .iter()
                .map(|g| {
                    let mean = g.iter().sum::<f64>() / g.len() as f64;
                    g.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                })
                .sum();
            if sse < best.0 {
                let mut means: Vec<f64> = groups
                    .iter()
                    .map(|g| g.iter().sum::<f64>() / g.len() as f64)
                    .collect();
                means.sort_by(f64::total_cmp);
                best = (sse, means);
            }
        }
        assert_eq!(best.1, vec![0.5, 9.5]);
        for seed in 0..10 {
            let res = run_lloyd(&data, &RunConfig::new(2, seed)).unwrap();
            let mut got: Vec<f64> = res.model.centroids().iter().copied().collect();
            got.sort_by(f64::total_cmp);
            assert_eq!(got, best.1, "seed {seed}");
        }
    }

    #[test]
    fn separable_repeated_points_reach_zero() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for rep in 0..20 {
            for (c, p) in [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]].iter().enumerate() {
                rows.push(p.to_vec());
                labels.push(c);
                let _ = rep;
            }
        }
        let data = Dataset::from_rows(&rows, Some(labels.clone())).unwrap();
        let res = run_lloyd(&data, &RunConfig::new(3, 4)).unwrap();
        assert_eq!(res.final_objective(), 0.0);
        assert!(res.trace.converged);
        // partition equals the labels up to renaming
        let mut map = [usize::MAX; 3];
        for (i, &l) in labels.iter().enumerate() {
            let c = res.assignment.cluster(i);
            if map[l] == usize::MAX {
                map[l] = c;
            }
            assert_eq!(map[l], c);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn descent_and_trace_consistency(seed in any::<u64>(), k in 1usize..5) {
            let data = random_data(seed, 40, 2);
            let res = run_lloyd(&data, &RunConfig::new(k, seed).with_epsilon(0.0)).unwrap();
            let its = &res.trace.iterations;
            prop_assert!(!its.is_empty());
            for (idx, rec) in its.iter().enumerate() {
                prop_assert_eq!(rec.n, idx + 1);
                if idx > 0 {
                    let prev = &its[idx - 1];
                    prop_assert!(rec.objective <= prev.objective * (1.0 + 1e-9));
                    prop_assert_eq!(rec.movement, rec.centroids.movement(&prev.centroids).unwrap());
                }
            }
            prop_assert_eq!(&res.model, &its.last().unwrap().centroids);
        }
    }

    #[test]
    fn permutation_equivariance() {
        // integer coordinates keep every sum exact, so reordering cannot change the means
        for seed in 0..30u64 {
            let mut rng = rng_from_seed(seed);
            let rows: Vec<Vec<f64>> = (0..24)
                .map(|_| (0..2).map(|_| rng.random_range(-20..20) as f64).collect())
                .collect();
            let data = ds(&rows);
            let picks = rand::seq::index::sample(&mut rng, 24, 3).into_vec();
            let mut order: Vec<usize> = (0..24).collect();
            for i in (1..24).rev() {
                order.swap(i, rng.random_range(0..=i));
            }
            let permuted = data.permuted(&order).unwrap();
            let inverse: Vec<usize> = {
                let mut inv = vec![0; 24];
                for (new, &old) in order.iter().enumerate() {
                    inv[old] = new;
                }
                inv
            };
            let cfg = RunConfig::new(3, 0).with_epsilon(0.0);
            let init_a = ClusterModel::new(data.points().select(Axis(0), &picks)).unwrap();
            let moved: Vec<usize> = picks.iter().map(|&p| inverse[p]).collect();
            let init_b = ClusterModel::new(permuted.points().select(Axis(0), &moved)).unwrap();
            let a = lloyd_from(&data, init_a, &cfg).unwrap();
            let b = lloyd_from(&permuted, init_b, &cfg).unwrap();
            assert_eq!(a.model, b.model, "seed {seed}");
            for (new, &old) in order.iter().enumerate() {
                assert_eq!(a.assignment.cluster(old), b.assignment.cluster(new));
            }
        }
    }

    #[test]
    fn stops_on_epsilon_or_budget() {
        let data = random_data(5, 50, 2);
        let capped = run_lloyd(&data, &RunConfig::new(4, 1).with_epsilon(0.0).with_max_iter(1))
            .unwrap();
        assert_eq!(capped.trace.iterations.len(), 1);
        assert!(!capped.trace.converged || capped.trace.iterations[0].movement == 0.0);

        let loose = run_lloyd(&data, &RunConfig::new(4, 1).with_epsilon(1e9)).unwrap();
        assert_eq!(loose.trace.iterations.len(), 1);
        assert!(loose.trace.converged);
    }

    #[test]
    fn restarts_keep_the_lowest_objective() {
        let data = random_data(8, 60, 2);
        let cfg = RunConfig::new(5, 21);
        let single = run_lloyd(&data, &cfg).unwrap();
        let one = run_lloyd_restarts(&data, &cfg, 1).unwrap();
        assert!(one.trace.same_path(&single.trace));
        let many = run_lloyd_restarts(&data, &cfg, 8).unwrap();
        assert!(many.final_objective() <= single.final_objective());
        for r in 0..8 {
            let run = run_lloyd(&data, &cfg.with_seed(restart_seed(21, r))).unwrap();
            assert!(many.final_objective() <= run.final_objective());
        }
        assert!(run_lloyd_restarts(&data, &cfg, 0).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let data: Dataset<f32> = random_data(3, 30, 2).cast();
        let res = run_lloyd(&data, &RunConfig::new(3, 2)).unwrap();
        assert_eq!(res.assignment.len(), 30);
    }
}
