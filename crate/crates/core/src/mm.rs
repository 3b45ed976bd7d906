//! MM K-means: Lloyd iterations on a working copy of the data whose unobserved
//! coordinates are overwritten by the assigned centroid after every update.
//!
//! After imputation each unobserved residual is zero, so the completed-data
//! objective equals the observed-coordinate objective. The next assign/update pass then
//! minimizes the majorizer anchored at the current centroids, and the observed objective
//! can only go down.

use std::time::Instant;

use ndarray::Array2;
use rand::Rng;

use crate::error::{ClusterError, Result};
use crate::lloyd::{assign_step, best_of, centroid_update_step, restart_seed, LloydResult};
use crate::model::{
    objective_observed, Assignment, ClusterModel, Dataset, IterationRecord, ObservationMask,
    RunConfig, RunTrace,
};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

/// Working matrix for one MM run. Observed slots always hold the source values.
/// Unobserved slots start at zero and are filled by [`initial_imputation`].
#[derive(Debug, Clone)]
pub struct CompletedDataset<'a, T> {
    working: Dataset<T>,
    mask: &'a ObservationMask,
    source: &'a Dataset<T>,
}

impl<'a, T: Scalar> CompletedDataset<'a, T> {
    pub fn new(source: &'a Dataset<T>, mask: &'a ObservationMask) -> Result<Self> {
        mask.check_matches(source)?;
        let mut working = source.without_labels();
        let (m, d) = mask.dim();
        let slots = working.points_mut();
        for i in 0..m {
            for j in 0..d {
                if !mask.is_observed(i, j) {
                    slots[[i, j]] = T::zero();
                }
            }
        }
        Ok(CompletedDataset {
            working,
            mask,
            source,
        })
    }

    pub fn working(&self) -> &Dataset<T> {
        &self.working
    }

    pub fn mask(&self) -> &ObservationMask {
        self.mask
    }

    pub fn source(&self) -> &Dataset<T> {
        self.source
    }

    pub fn into_working(self) -> Dataset<T> {
        self.working
    }

    fn fill_unobserved(&mut self, mut value: impl FnMut(usize, usize) -> T) {
        let (m, d) = self.mask.dim();
        let mask = self.mask;
        let slots = self.working.points_mut();
        for i in 0..m {
            for j in 0..d {
                if !mask.is_observed(i, j) {
                    slots[[i, j]] = value(i, j);
                }
            }
        }
    }
}

/// Picks `k` distinct fully observed rows as centroids.
///
/// With fewer than `k` complete rows, falls back to the `k` rows with the most observed
/// coordinates (ties by row index). Their gaps are filled with the per-feature mean of the
/// observed entries, or zero for a feature with no observations at all.
pub fn init_fully_observed<T: Scalar, R: Rng + ?Sized>(
    data: &Dataset<T>,
    mask: &ObservationMask,
    k: usize,
    rng: &mut R,
) -> Result<ClusterModel<T>> {
    mask.check_matches(data)?;
    if k == 0 || k > data.m() {
        return Err(ClusterError::InvalidConfig(format!(
            "cannot pick {k} initial centroids from {} samples",
            data.m()
        )));
    }
    let (m, d) = mask.dim();
    let complete: Vec<usize> = (0..m).filter(|&i| mask.is_row_complete(i)).collect();
    let x = data.points();

    if complete.len() >= k {
        let picks: Vec<usize> = rand::seq::index::sample(rng, complete.len(), k)
            .into_iter()
            .map(|p| complete[p])
            .collect();
        return ClusterModel::new(x.select(ndarray::Axis(0), &picks));
    }

    let mut feature_mean = vec![T::zero(); d];
    for (j, mean) in feature_mean.iter_mut().enumerate() {
        let mut sum = T::zero();
        let mut count = 0usize;
        for i in 0..m {
            if mask.is_observed(i, j) {
                sum = sum + x[[i, j]];
                count += 1;
            }
        }
        if count > 0 {
            *mean = sum / T::from_count(count);
        }
    }

    let mut ranked: Vec<usize> = (0..m).collect();
    ranked.sort_by(|&a, &b| {
        mask.observed_count(b)
            .cmp(&mask.observed_count(a))
            .then(a.cmp(&b))
    });
    let mut centroids = Array2::zeros((k, d));
    for (c, &i) in ranked.iter().take(k).enumerate() {
        for j in 0..d {
            centroids[[c, j]] = if mask.is_observed(i, j) {
                x[[i, j]]
            } else {
                feature_mean[j]
            };
        }
    }
    ClusterModel::new(centroids)
}

/// Fills each unobserved slot with the matching coordinate of a centroid drawn
/// uniformly and independently per slot (row-major order).
pub fn initial_imputation<T: Scalar, R: Rng + ?Sized>(
    cd: &mut CompletedDataset<'_, T>,
    model: &ClusterModel<T>,
    rng: &mut R,
) -> Result<()> {
    if model.d() != cd.working.d() {
        return Err(ClusterError::dim("centroid dimension", cd.working.d(), model.d()));
    }
    let k = model.k();
    let mu = model.centroids();
    cd.fill_unobserved(|_, j| mu[[rng.random_range(0..k), j]]);
    Ok(())
}

/// Replaces every unobserved slot of sample `i` with the coordinate of its assigned centroid.
pub fn impute_step<T: Scalar>(
    cd: &mut CompletedDataset<'_, T>,
    asg: &Assignment,
    model: &ClusterModel<T>,
) -> Result<()> {
    if asg.len() != cd.working.m() {
        return Err(ClusterError::dim("assignment length", cd.working.m(), asg.len()));
    }
    if asg.k() != model.k() {
        return Err(ClusterError::dim("assignment cluster count", model.k(), asg.k()));
    }
    if model.d() != cd.working.d() {
        return Err(ClusterError::dim("centroid dimension", cd.working.d(), model.d()));
    }
    let mu = model.centroids();
    cd.fill_unobserved(|i, j| mu[[asg.cluster(i), j]]);
    Ok(())
}

/// One MM K-means run. The trace records the observed-coordinate objective after each
/// imputation.
pub fn run_mm<T: Scalar>(
    data: &Dataset<T>,
    mask: &ObservationMask,
    cfg: &RunConfig,
) -> Result<LloydResult<T>> {
    run_mm_with_state(data, mask, cfg).map(|(res, _)| res)
}

/// Like [`run_mm`], also returning the final completed data.
pub fn run_mm_with_state<'a, T: Scalar>(
    data: &'a Dataset<T>,
    mask: &'a ObservationMask,
    cfg: &RunConfig,
) -> Result<(LloydResult<T>, CompletedDataset<'a, T>)> {
    cfg.validate(data.m())?;
    mask.check_matches(data)?;
    let start = Instant::now();
    let mut rng = rng_from_seed(cfg.seed);
    let mut model = init_fully_observed(data, mask, cfg.k, &mut rng)?;
    let mut cd = CompletedDataset::new(data, mask)?;
    initial_imputation(&mut cd, &model, &mut rng)?;

    let eps = T::from_f64_lossy(cfg.epsilon);
    let mut iterations = Vec::new();
    let mut converged = false;
    let mut assignment = None;

    for n in 1..=cfg.max_iter {
        let asg = assign_step(cd.working(), &model)?;
        let next = centroid_update_step(cd.working(), &asg, cfg.k, &model)?;
        impute_step(&mut cd, &asg, &next)?;
        let movement = next.movement(&model)?;
        let objective = objective_observed(data, mask, &asg, &next)?;
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

    let result = LloydResult {
        model,
        assignment: assignment.expect("max_iter >= 1"),
        trace: RunTrace {
            iterations,
            converged,
            elapsed: start.elapsed().as_secs_f64(),
        },
    };
    Ok((result, cd))
}

/// Best of `n_init` MM runs by final observed objective.
pub fn run_mm_restarts<T: Scalar>(
    data: &Dataset<T>,
    mask: &ObservationMask,
    cfg: &RunConfig,
    n_init: usize,
) -> Result<LloydResult<T>> {
    best_of(n_init, |r| {
        run_mm(data, mask, &cfg.with_seed(restart_seed(cfg.seed, r)))
    })
}
