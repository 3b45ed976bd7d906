//! Entropy-based scores: homogeneity, completeness and V-measure (natural log).

use super::contingency::ContingencyTable;

/// Entropy of a marginal, summed over sorted counts.
pub fn entropy(counts: &[u64], total: u64) -> f64 {
    let n = total as f64;
    -ContingencyTable::sorted(counts)
        .into_iter()
        .map(|c| {
            let p = c as f64 / n;
            p * (c as f64 / n).ln()
        })
        .sum::<f64>()
}

/// Σ over cells of −(n_ij/N)·ln(n_ij/marginal), for `(n_ij, marginal)` pairs.
fn conditional_entropy(mut pairs: Vec<(u64, u64)>, total: u64) -> f64 {
    pairs.sort_unstable();
    let n = total as f64;
    -pairs
        .into_iter()
        .map(|(nij, marg)| {
            let p = nij as f64 / n;
            p * (nij as f64 / marg as f64).ln()
        })
        .sum::<f64>()
}

/// H(classes | clusters).
pub fn entropy_classes_given_clusters(ct: &ContingencyTable) -> f64 {
    let pairs = ct.cells().into_iter().map(|(n, _, b)| (n, b)).collect();
    conditional_entropy(pairs, ct.total())
}

/// H(clusters | classes).
pub fn entropy_clusters_given_classes(ct: &ContingencyTable) -> f64 {
    let pairs = ct.cells().into_iter().map(|(n, a, _)| (n, a)).collect();
    conditional_entropy(pairs, ct.total())
}

/// `(homogeneity, completeness, v_measure)`.
pub fn homogeneity_completeness_v(ct: &ContingencyTable) -> (f64, f64, f64) {
    let h_classes = entropy(ct.row_sums(), ct.total());
    let h_clusters = entropy(ct.col_sums(), ct.total());
    let homogeneity = if h_classes == 0.0 {
        1.0
    } else {
        1.0 - entropy_classes_given_clusters(ct) / h_classes
    };
    let completeness = if h_clusters == 0.0 {
        1.0
    } else {
        1.0 - entropy_clusters_given_classes(ct) / h_clusters
    };
    let v = if homogeneity + completeness == 0.0 {
        0.0
    } else {
        2.0 * homogeneity * completeness / (homogeneity + completeness)
    };
    (homogeneity, completeness, v)
}
