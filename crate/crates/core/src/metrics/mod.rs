//! Partition scores: homogeneity, completeness, V-measure, adjusted Rand index,
//! adjusted mutual information and the silhouette coefficient.

mod ami;
mod contingency;
mod entropy;
mod pair;
mod silhouette;

pub use ami::{adjusted_mutual_information, expected_mutual_information, mutual_information};
pub use contingency::ContingencyTable;
pub use entropy::{
    entropy, entropy_classes_given_clusters, entropy_clusters_given_classes,
    homogeneity_completeness_v,
};
pub use pair::adjusted_rand_index;
pub use silhouette::{silhouette, silhouette_samples};

use crate::error::Result;
use crate::model::Dataset;
use crate::scalar::Scalar;

/// The six agreement/cohesion scores for one fitted partition, plus fit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub time_seconds: f64,
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
    pub ari: f64,
    pub ami: f64,
    /// `NaN` when fewer than two clusters are present.
    pub silhouette: f64,
}

impl MetricReport {
    /// Scores `pred` against `truth`, with silhouette evaluated on `data`.
    pub fn compute<T: Scalar>(
        data: &Dataset<T>,
        truth: &[usize],
        pred: &[usize],
        time_seconds: f64,
    ) -> Result<Self> {
        let ct = ContingencyTable::new(truth, pred)?;
        let (homogeneity, completeness, v_measure) = homogeneity_completeness_v(&ct);
        let ari = adjusted_rand_index(&ct)?;
        let ami = adjusted_mutual_information(&ct);
        let silhouette = match silhouette(data, pred) {
            Ok(s) => s,
            Err(crate::ClusterError::UndefinedMetric(_)) => f64::NAN,
            Err(e) => return Err(e),
        };
        Ok(MetricReport {
            time_seconds,
            homogeneity,
            completeness,
            v_measure,
            ari,
            ami,
            silhouette,
        })
    }

    /// The five ground-truth agreement scores in report order.
    pub fn agreement(&self) -> [f64; 5] {
        [
            self.homogeneity,
            self.completeness,
            self.v_measure,
            self.ari,
            self.ami,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::Rng;

    /// ARI from pair-confusion counts over all C(m, 2) pairs.
    fn brute_force_ari(t: &[usize], p: &[usize]) -> f64 {
        let (mut ss, mut sd, mut ds, mut dd) = (0f64, 0f64, 0f64, 0f64);
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                match (t[i] == t[j], p[i] == p[j]) {
                    (true, true) => ss += 1.0,
                    (true, false) => sd += 1.0,
                    (false, true) => ds += 1.0,
                    (false, false) => dd += 1.0,
                }
            }
        }
        let denom = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd);
        if denom == 0.0 {
            1.0
        } else {
            2.0 * (ss * dd - sd * ds) / denom
        }
    }

    fn relabel(labels: &[usize], seed: u64) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..10).collect();
        ids.shuffle(&mut rng_from_seed(seed));
        labels.iter().map(|&l| ids[l] + 3).collect()
    }

    proptest! {
        #[test]
        fn ari_matches_pair_counting(seed in any::<u64>(), m in 2usize..=50, l in 1usize..5, k in 1usize..6) {
            let mut rng = rng_from_seed(seed);
            let t: Vec<usize> = (0..m).map(|_| rng.random_range(0..l)).collect();
            let p: Vec<usize> = (0..m).map(|_| rng.random_range(0..k)).collect();
            let got = adjusted_rand_index(&ContingencyTable::new(&t, &p).unwrap()).unwrap();
            prop_assert!((got - brute_force_ari(&t, &p)).abs() < 1e-12);
        }

        #[test]
        fn scores_ignore_label_names(seed in any::<u64>(), m in 4usize..40) {
            let mut rng = rng_from_seed(seed);
            let rows: Vec<Vec<f64>> = (0..m).map(|_| vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]).collect();
            let data = Dataset::from_rows(&rows, None).unwrap();
            let t: Vec<usize> = (0..m).map(|_| rng.random_range(0..3)).collect();
            let mut p: Vec<usize> = (0..m).map(|_| rng.random_range(0..4)).collect();
            p[0] = 0;
            p[1] = 1;
            let base = MetricReport::compute(&data, &t, &p, 0.0).unwrap();
            let other = MetricReport::compute(&data, &relabel(&t, seed ^ 1), &relabel(&p, seed ^ 2), 0.0).unwrap();
            prop_assert_eq!(base, other);
        }

        #[test]
        fn homogeneity_completeness_swap(seed in any::<u64>(), m in 1usize..40) {
            let mut rng = rng_from_seed(seed);
            let t: Vec<usize> = (0..m).map(|_| rng.random_range(0..3)).collect();
            let p: Vec<usize> = (0..m).map(|_| rng.random_range(0..4)).collect();
            let (h, c, v) = homogeneity_completeness_v(&ContingencyTable::new(&t, &p).unwrap());
            let (h2, c2, v2) = homogeneity_completeness_v(&ContingencyTable::new(&p, &t).unwrap());
            prop_assert_eq!(h, c2);
            prop_assert_eq!(c, h2);
            prop_assert_eq!(v, v2);
        }
    }

    #[test]
    fn independent_labelings_have_zero_mean_ari() {
        let mut rng = rng_from_seed(2024);
        let mut total = 0.0;
        for _ in 0..1000 {
            let t: Vec<usize> = (0..200).map(|_| rng.random_range(0..3)).collect();
            let p: Vec<usize> = (0..200).map(|_| rng.random_range(0..3)).collect();
            total += adjusted_rand_index(&ContingencyTable::new(&t, &p).unwrap()).unwrap();
        }
        assert!((total / 1000.0).abs() <= 0.02);
    }

    #[test]
    fn report_for_truth_as_prediction() {
        let data = Dataset::from_rows(
            &[vec![0.0], vec![0.1], vec![5.0], vec![5.2]],
            None,
        )
        .unwrap();
        let r = MetricReport::compute(&data, &[0, 0, 1, 1], &[0, 0, 1, 1], 0.0).unwrap();
        assert_eq!(r.agreement().map(|v| (v * 1000.0).round() / 1000.0), [1.0; 5]);
        let single = MetricReport::compute(&data, &[0, 0, 1, 1], &[0; 4], 0.0).unwrap();
        assert!(single.silhouette.is_nan());
    }
}
