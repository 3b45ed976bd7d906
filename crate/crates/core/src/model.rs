//! Shared data types and the clustering objectives.
//!
//! Three objectives live here:
//!
//! * [`objective_complete`]: the within-cluster sum of squares over all coordinates.
//! * [`objective_observed`]: the same sum restricted to observed coordinates.
//! * [`majorizer`]: the observed objective plus a penalty that pulls each unobserved
//!   coordinate of a centroid toward an anchor model. It touches the observed objective
//!   when `model == anchor` and dominates it everywhere else.
//!
//! All three sum clusters in the outer loop, samples in the middle loop and coordinates
//! in the inner loop. With a single accumulator, equal inputs give bit-identical results.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{ClusterError, Result};
use crate::scalar::Scalar;

/// An m×d sample matrix with optional ground-truth class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    points: Array2<T>,
    labels: Option<Vec<usize>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(points: Array2<T>, labels: Option<Vec<usize>>) -> Result<Self> {
        let (m, d) = points.dim();
        if m == 0 || d == 0 {
            return Err(ClusterError::InvalidData(format!(
                "dataset must have at least one row and one column, got {m}x{d}"
            )));
        }
        if let Some((idx, _)) = points.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(ClusterError::InvalidData(format!(
                "non-finite value at row {}, column {}",
                idx / d,
                idx % d
            )));
        }
        if let Some(labels) = &labels {
            if labels.len() != m {
                return Err(ClusterError::dim("dataset labels", m, labels.len()));
            }
        }
        Ok(Dataset { points, labels })
    }

    pub fn from_rows(rows: &[Vec<T>], labels: Option<Vec<usize>>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(ClusterError::dim("dataset row", d, row.len()));
            }
            flat.extend_from_slice(row);
        }
        let points = Array2::from_shape_vec((rows.len(), d), flat)
            .map_err(|e| ClusterError::InvalidData(e.to_string()))?;
        Dataset::new(points, labels)
    }

    /// Number of samples.
    pub fn m(&self) -> usize {
        self.points.nrows()
    }

    /// Number of features.
    pub fn d(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> ArrayView2<'_, T> {
        self.points.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, T> {
        self.points.row(i)
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Number of distinct class ids implied by the labels (max id + 1).
    pub fn num_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(0, |x| x + 1))
    }

    pub fn without_labels(&self) -> Self {
        Dataset {
            points: self.points.clone(),
            labels: None,
        }
    }

    pub fn cast<U: Scalar>(&self) -> Dataset<U> {
        Dataset {
            points: self.points.mapv(|v| U::from_f64_lossy(v.to_f64_lossy())),
            labels: self.labels.clone(),
        }
    }

    /// Reorders samples so that new row `r` is old row `order[r]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.m() {
            return Err(ClusterError::dim("permutation", self.m(), order.len()));
        }
        let points = self.points.select(Axis(0), order);
        let labels = self
            .labels
            .as_ref()
            .map(|l| order.iter().map(|&i| l[i]).collect());
        Ok(Dataset { points, labels })
    }

    pub fn into_points(self) -> Array2<T> {
        self.points
    }

    pub(crate) fn points_mut(&mut self) -> &mut Array2<T> {
        &mut self.points
    }
}

/// Per-element observation flags; `true` means the coordinate was measured.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationMask {
    observed: Array2<bool>,
}

impl ObservationMask {
    pub fn new(observed: Array2<bool>) -> Self {
        ObservationMask { observed }
    }

    pub fn all_observed(m: usize, d: usize) -> Self {
        ObservationMask::new(Array2::from_elem((m, d), true))
    }

    pub fn none_observed(m: usize, d: usize) -> Self {
        ObservationMask::new(Array2::from_elem((m, d), false))
    }

    pub fn dim(&self) -> (usize, usize) {
        self.observed.dim()
    }

    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.observed[[i, j]]
    }

    pub fn set(&mut self, i: usize, j: usize, observed: bool) {
        self.observed[[i, j]] = observed;
    }

    /// |O_{x_i}|, the number of observed coordinates in row `i`.
    pub fn observed_count(&self, i: usize) -> usize {
        self.observed.row(i).iter().filter(|&&o| o).count()
    }

    pub fn is_row_complete(&self, i: usize) -> bool {
        self.observed.row(i).iter().all(|&o| o)
    }

    pub fn has_missing(&self, i: usize) -> bool {
        !self.is_row_complete(i)
    }

    pub fn missing_count(&self) -> usize {
        self.observed.iter().filter(|&&o| !o).count()
    }

    pub fn is_all_observed(&self) -> bool {
        self.observed.iter().all(|&o| o)
    }

    pub fn view(&self) -> ArrayView2<'_, bool> {
        self.observed.view()
    }

    pub fn check_matches<T: Scalar>(&self, data: &Dataset<T>) -> Result<()> {
        let (m, d) = self.dim();
        if m != data.m() {
            return Err(ClusterError::dim("mask rows", data.m(), m));
        }
        if d != data.d() {
            return Err(ClusterError::dim("mask columns", data.d(), d));
        }
        Ok(())
    }
}

/// K centroids in d dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel<T> {
    centroids: Array2<T>,
}

impl<T: Scalar> ClusterModel<T> {
    pub fn new(centroids: Array2<T>) -> Result<Self> {
        if centroids.nrows() == 0 || centroids.ncols() == 0 {
            return Err(ClusterError::InvalidConfig(
                "a model needs at least one centroid with at least one coordinate".into(),
            ));
        }
        if centroids.iter().any(|v| !v.is_finite()) {
            return Err(ClusterError::InvalidData(
                "centroids must be finite".into(),
            ));
        }
        Ok(ClusterModel { centroids })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(ClusterError::InvalidData("ragged centroid rows".into()));
        }
        let flat: Vec<T> = rows.iter().flatten().copied().collect();
        let centroids = Array2::from_shape_vec((rows.len(), d), flat)
            .map_err(|e| ClusterError::InvalidData(e.to_string()))?;
        ClusterModel::new(centroids)
    }

    pub fn k(&self) -> usize {
        self.centroids.nrows()
    }

    pub fn d(&self) -> usize {
        self.centroids.ncols()
    }

    pub fn centroid(&self, k: usize) -> ArrayView1<'_, T> {
        self.centroids.row(k)
    }

    pub fn centroids(&self) -> ArrayView2<'_, T> {
        self.centroids.view()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.centroids.outer_iter().map(|r| r.to_vec()).collect()
    }

    /// Σ_k ‖self_k − other_k‖², the stopping statistic.
    pub fn movement(&self, other: &ClusterModel<T>) -> Result<T> {
        self.check_same_shape(other)?;
        let mut total = T::zero();
        for k in 0..self.k() {
            for j in 0..self.d() {
                let diff = self.centroids[[k, j]] - other.centroids[[k, j]];
                total = total + diff * diff;
            }
        }
        Ok(total)
    }

    pub(crate) fn check_same_shape(&self, other: &ClusterModel<T>) -> Result<()> {
        if self.k() != other.k() {
            return Err(ClusterError::dim("centroid count", self.k(), other.k()));
        }
        if self.d() != other.d() {
            return Err(ClusterError::dim("centroid dimension", self.d(), other.d()));
        }
        Ok(())
    }

    pub(crate) fn centroids_mut(&mut self) -> &mut Array2<T> {
        &mut self.centroids
    }
}

/// Hard partition of m samples into K clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    cluster_of: Vec<usize>,
    k: usize,
}

impl Assignment {
    pub fn new(cluster_of: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = cluster_of.iter().find(|&&c| c >= k) {
            return Err(ClusterError::InvalidData(format!(
                "cluster id {bad} out of range for k = {k}"
            )));
        }
        Ok(Assignment { cluster_of, k })
    }

    pub fn len(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cluster_of.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cluster(&self, i: usize) -> usize {
        self.cluster_of[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.cluster_of
    }

    /// Sample indices in cluster `k`, in increasing order.
    pub fn members(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.cluster_of
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == k)
            .map(|(i, _)| i)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.cluster_of {
            sizes[c] += 1;
        }
        sizes
    }
}

/// Solver settings shared by Lloyd and MM runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub k: usize,
    pub epsilon: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl RunConfig {
    pub const DEFAULT_EPSILON: f64 = 1e-6;
    pub const DEFAULT_MAX_ITER: usize = 100;

    pub fn new(k: usize, seed: u64) -> Self {
        RunConfig {
            k,
            epsilon: Self::DEFAULT_EPSILON,
            max_iter: Self::DEFAULT_MAX_ITER,
            seed,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.k == 0 {
            return Err(ClusterError::InvalidConfig("k must be at least 1".into()));
        }
        if self.k > m {
            return Err(ClusterError::InvalidConfig(format!(
                "k = {} exceeds the sample count {m}",
                self.k
            )));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(ClusterError::InvalidConfig(format!(
                "epsilon must be nonnegative, got {}",
                self.epsilon
            )));
        }
        if self.max_iter == 0 {
            return Err(ClusterError::InvalidConfig(
                "max_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    /// 1-based iteration index.
    pub n: usize,
    pub centroids: ClusterModel<T>,
    /// Objective over observed coordinates after this iteration.
    pub objective: T,
    /// Σ_k ‖μ_k^n − μ_k^{n−1}‖².
    pub movement: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<T> {
    pub iterations: Vec<IterationRecord<T>>,
    pub converged: bool,
    /// Wall-clock seconds spent in the solver.
    pub elapsed: f64,
}

impl<T: Scalar> RunTrace<T> {
    pub fn final_objective(&self) -> Option<T> {
        self.iterations.last().map(|r| r.objective)
    }

    /// Compares everything except wall-clock time.
    pub fn same_path(&self, other: &RunTrace<T>) -> bool {
        self.converged == other.converged && self.iterations == other.iterations
    }
}

/// Σ_j (a_j − b_j)².
pub fn squared_distance<T: Scalar>(a: ArrayView1<'_, T>, b: ArrayView1<'_, T>) -> Result<T> {
    if a.len() != b.len() {
        return Err(ClusterError::dim("squared_distance", a.len(), b.len()));
    }
    Ok(sq_dist_unchecked(a, b))
}

#[inline]
pub(crate) fn sq_dist_unchecked<T: Scalar>(a: ArrayView1<'_, T>, b: ArrayView1<'_, T>) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b.iter()) {
        let diff = x - y;
        acc = acc + diff * diff;
    }
    acc
}

fn check_fit_shapes<T: Scalar>(
    data: &Dataset<T>,
    asg: &Assignment,
    model: &ClusterModel<T>,
) -> Result<()> {
    if asg.len() != data.m() {
        return Err(ClusterError::dim("assignment length", data.m(), asg.len()));
    }
    if asg.k() != model.k() {
        return Err(ClusterError::dim("assignment cluster count", model.k(), asg.k()));
    }
    if model.d() != data.d() {
        return Err(ClusterError::dim("centroid dimension", data.d(), model.d()));
    }
    Ok(())
}

/// Within-cluster sum of squares over all coordinates.
pub fn objective_complete<T: Scalar>(
    data: &Dataset<T>,
    asg: &Assignment,
    model: &ClusterModel<T>,
) -> Result<T> {
    check_fit_shapes(data, asg, model)?;
    let x = data.points();
    let mu = model.centroids();
    let mut acc = T::zero();
    for k in 0..model.k() {
        for i in asg.members(k) {
            for j in 0..data.d() {
                let diff = x[[i, j]] - mu[[k, j]];
                acc = acc + diff * diff;
            }
        }
    }
    Ok(acc)
}

/// Within-cluster sum of squares over observed coordinates only.
pub fn objective_observed<T: Scalar>(
    data: &Dataset<T>,
    mask: &ObservationMask,
    asg: &Assignment,
    model: &ClusterModel<T>,
) -> Result<T> {
    mask.check_matches(data)?;
    check_fit_shapes(data, asg, model)?;
    let x = data.points();
    let mu = model.centroids();
    let mut acc = T::zero();
    for k in 0..model.k() {
        for i in asg.members(k) {
            for j in 0..data.d() {
                if mask.is_observed(i, j) {
                    let diff = x[[i, j]] - mu[[k, j]];
                    acc = acc + diff * diff;
                }
            }
        }
    }
    Ok(acc)
}

/// Surrogate g(model | anchor): observed residuals plus (anchor_kj − model_kj)² for every
/// unobserved coordinate of every member of cluster k.
pub fn majorizer<T: Scalar>(
    data: &Dataset<T>,
    mask: &ObservationMask,
    asg: &Assignment,
    model: &ClusterModel<T>,
    anchor: &ClusterModel<T>,
) -> Result<T> {
    mask.check_matches(data)?;
    check_fit_shapes(data, asg, model)?;
    model.check_same_shape(anchor)?;
    let x = data.points();
    let mu = model.centroids();
    let nu = anchor.centroids();
    let mut acc = T::zero();
    for k in 0..model.k() {
        for i in asg.members(k) {
            for j in 0..data.d() {
                let diff = if mask.is_observed(i, j) {
                    x[[i, j]] - mu[[k, j]]
                } else {
                    nu[[k, j]] - mu[[k, j]]
                };
                acc = acc + diff * diff;
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1};
    use proptest::prelude::*;

    fn ds(rows: &[Vec<f64>]) -> Dataset<f64> {
        Dataset::from_rows(rows, None).unwrap()
    }

    #[test]
    fn squared_distance_examples() {
        let z = array![0.0, 0.0];
        assert_eq!(squared_distance(z.view(), z.view()).unwrap(), 0.0);
        let a = array![1.0, 2.0];
        let b = array![4.0, 6.0];
        assert_eq!(squared_distance(a.view(), b.view()).unwrap(), 25.0);
        let c = array![1.0, 2.0, 3.0];
        assert!(matches!(
            squared_distance(a.view(), c.view()),
            Err(ClusterError::Dimension { .. })
        ));
    }

    proptest! {
        #[test]
        fn squared_distance_matches_scalar_loop(a0 in -1e3..1e3f64, a1 in -1e3..1e3f64,
                                                b0 in -1e3..1e3f64, b1 in -1e3..1e3f64) {
            let a = Array1::from(vec![a0, a1]);
            let b = Array1::from(vec![b0, b1]);
            let expected = (a0 - b0) * (a0 - b0) + (a1 - b1) * (a1 - b1);
            prop_assert_eq!(squared_distance(a.view(), b.view()).unwrap(), expected);
        }
    }

    #[test]
    fn dataset_rejects_bad_input() {
        assert!(Dataset::<f64>::from_rows(&[], None).is_err());
        assert!(Dataset::from_rows(&[vec![f64::NAN]], None).is_err());
        assert!(Dataset::from_rows(&[vec![1.0], vec![2.0]], Some(vec![0])).is_err());
        assert!(Dataset::from_rows(&[vec![1.0, 2.0], vec![2.0]], None).is_err());
        let d = Dataset::from_rows(&[vec![1.0], vec![2.0]], Some(vec![0, 3])).unwrap();
        assert_eq!(d.num_classes(), Some(4));
    }

    #[test]
    fn objective_complete_examples() {
        let data = ds(&[vec![0.0], vec![2.0]]);
        let asg = Assignment::new(vec![0, 0], 1).unwrap();
        let model = ClusterModel::from_rows(&[vec![1.0]]).unwrap();
        assert_eq!(objective_complete(&data, &asg, &model).unwrap(), 2.0);

        let exact = ClusterModel::from_rows(&[vec![0.0], vec![2.0]]).unwrap();
        let asg2 = Assignment::new(vec![0, 1], 2).unwrap();
        assert_eq!(objective_complete(&data, &asg2, &exact).unwrap(), 0.0);

        let wrong_d = ClusterModel::from_rows(&[vec![0.0, 1.0]]).unwrap();
        assert!(objective_complete(&data, &asg, &wrong_d).is_err());
    }

    #[test]
    fn objective_observed_examples() {
        let data = ds(&[vec![1.0, 5.0]]);
        let asg = Assignment::new(vec![0], 1).unwrap();
        let origin = ClusterModel::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let mut mask = ObservationMask::all_observed(1, 2);
        mask.set(0, 1, false);
        assert_eq!(objective_observed(&data, &mask, &asg, &origin).unwrap(), 1.0);

        let none = ObservationMask::none_observed(1, 2);
        let far = ClusterModel::from_rows(&[vec![100.0, -40.0]]).unwrap();
        assert_eq!(objective_observed(&data, &none, &asg, &far).unwrap(), 0.0);

        let short = ObservationMask::all_observed(2, 2);
        assert!(objective_observed(&data, &short, &asg, &origin).is_err());
    }

    #[test]
    fn majorizer_hand_example() {
        let data = ds(&[vec![1.0, 7.0]]);
        let mut mask = ObservationMask::all_observed(1, 2);
        mask.set(0, 1, false);
        let asg = Assignment::new(vec![0], 1).unwrap();
        let anchor = ClusterModel::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let model = ClusterModel::from_rows(&[vec![0.0, 1.0]]).unwrap();
        let f = objective_observed(&data, &mask, &asg, &model).unwrap();
        let g = majorizer(&data, &mask, &asg, &model, &anchor).unwrap();
        assert_eq!(f, 1.0);
        assert_eq!(g, 2.0);

        let bad_anchor = ClusterModel::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(majorizer(&data, &mask, &asg, &model, &bad_anchor).is_err());
    }

    #[test]
    fn all_false_rows_contribute_nothing() {
        let data = ds(&[vec![3.0, 4.0], vec![1.0, 1.0]]);
        let mut mask = ObservationMask::all_observed(2, 2);
        mask.set(0, 0, false);
        mask.set(0, 1, false);
        let asg = Assignment::new(vec![0, 0], 1).unwrap();
        let model = ClusterModel::from_rows(&[vec![0.0, 0.0]]).unwrap();
        assert_eq!(objective_observed(&data, &mask, &asg, &model).unwrap(), 2.0);
    }

    #[test]
    fn movement_sums_squared_shifts() {
        let a = ClusterModel::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let b = ClusterModel::from_rows(&[vec![3.0, 4.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(a.movement(&b).unwrap(), 26.0);
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::new(3, 0).validate(3).is_ok());
        assert!(RunConfig::new(4, 0).validate(3).is_err());
        assert!(RunConfig::new(0, 0).validate(3).is_err());
        assert!(RunConfig::new(1, 0).with_epsilon(-1.0).validate(3).is_err());
        assert!(RunConfig::new(1, 0).with_epsilon(f64::NAN).validate(3).is_err());
        assert!(RunConfig::new(1, 0).with_max_iter(0).validate(3).is_err());
    }

    #[test]
    fn works_with_f32() {
        let data: Dataset<f32> = ds(&[vec![0.0], vec![2.0]]).cast();
        let asg = Assignment::new(vec![0, 0], 1).unwrap();
        let model = ClusterModel::from_rows(&[vec![1.0f32]]).unwrap();
        assert_eq!(objective_complete(&data, &asg, &model).unwrap(), 2.0f32);
    }
}
