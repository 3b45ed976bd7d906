use std::collections::BTreeMap;

use crate::error::{ClusterError, Result};
use crate::model::Dataset;
use crate::scalar::Scalar;

/// Mean silhouette coefficient with Euclidean distances.
///
/// Only labels that occur in `pred` count as clusters. Samples in singleton clusters
/// score 0.
pub fn silhouette<T: Scalar>(data: &Dataset<T>, pred: &[usize]) -> Result<f64> {
    let scores = silhouette_samples(data, pred)?;
    let mut total = 0.0f64;
    for s in &scores {
        total += s;
    }
    Ok(total / scores.len() as f64)
}

/// Per-sample silhouette values `(b − a) / max(a, b)`.
pub fn silhouette_samples<T: Scalar>(data: &Dataset<T>, pred: &[usize]) -> Result<Vec<f64>> {
    let m = data.m();
    if pred.len() != m {
        return Err(ClusterError::dim("silhouette labels", m, pred.len()));
    }
    let ids: BTreeMap<usize, usize> = pred
        .iter()
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(idx, label)| (label, idx))
        .collect();
    let k = ids.len();
    if k < 2 {
        return Err(ClusterError::UndefinedMetric(format!(
            "silhouette needs at least two clusters, found {k}"
        )));
    }
    let cluster: Vec<usize> = pred.iter().map(|l| ids[l]).collect();
    let mut sizes = vec![0usize; k];
    for &c in &cluster {
        sizes[c] += 1;
    }

    let x = data.points();
    let d = data.d();
    let mut sums = vec![0.0f64; k];
    let mut scores = vec![0.0f64; m];
    for i in 0..m {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for jdx in 0..m {
            if jdx == i {
                continue;
            }
            let mut sq = 0.0f64;
            for f in 0..d {
                let diff = x[[i, f]].to_f64_lossy() - x[[jdx, f]].to_f64_lossy();
                sq += diff * diff;
            }
            sums[cluster[jdx]] += sq.sqrt();
        }
        let own = cluster[i];
        if sizes[own] == 1 {
            continue;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            scores[i] = (b - a) / denom;
        }
    }
    Ok(scores)
}
