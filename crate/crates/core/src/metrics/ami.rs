//! Mutual information and its chance-adjusted variant.
//!
//! The expected mutual information is the exact hypergeometric expectation over all
//! tables with the observed marginals, evaluated with log-factorials.

use super::contingency::ContingencyTable;
use super::entropy::entropy;

/// Mutual information in nats.
pub fn mutual_information(ct: &ContingencyTable) -> f64 {
    let n = ct.total() as f64;
    let mi: f64 = ct
        .cells()
        .into_iter()
        .map(|(nij, a, b)| {
            let nij = nij as f64;
            nij / n * ((n * nij) / (a as f64 * b as f64)).ln()
        })
        .sum();
    mi.max(0.0)
}

fn log_factorials(n: u64) -> Vec<f64> {
    let mut table = Vec::with_capacity(n as usize + 1);
    table.push(0.0);
    let mut acc = 0.0f64;
    for i in 1..=n {
        acc += (i as f64).ln();
        table.push(acc);
    }
    table
}

/// E[MI] under random relabeling with both marginals held fixed.
pub fn expected_mutual_information(ct: &ContingencyTable) -> f64 {
    let total = ct.total();
    let n = total as f64;
    let lf = log_factorials(total);
    let lf = |k: u64| lf[k as usize];
    let rows = ContingencyTable::sorted(ct.row_sums());
    let cols = ContingencyTable::sorted(ct.col_sums());
    let mut emi = 0.0;
    for &a in &rows {
        for &b in &cols {
            let start = (a + b).saturating_sub(total).max(1);
            let end = a.min(b);
            let fixed = lf(a) + lf(b) + lf(total - a) + lf(total - b) - lf(total);
            for nij in start..=end {
                let nf = nij as f64;
                let log_p = fixed
                    - lf(nij)
                    - lf(a - nij)
                    - lf(b - nij)
                    - lf(total + nij - a - b);
                let term = nf / n * ((n * nf) / (a as f64 * b as f64)).ln();
                emi += term * log_p.exp();
            }
        }
    }
    emi
}

/// Adjusted mutual information with arithmetic-mean normalization.
pub fn adjusted_mutual_information(ct: &ContingencyTable) -> f64 {
    let rows = ContingencyTable::sorted(ct.row_sums()).len();
    let cols = ContingencyTable::sorted(ct.col_sums()).len();
    if rows == cols && (rows <= 1 || rows as u64 == ct.total()) {
        // identical trivial partitions: one block, or all singletons
        return 1.0;
    }
    let mi = mutual_information(ct);
    let emi = expected_mutual_information(ct);
    let h_true = entropy(ct.row_sums(), ct.total());
    let h_pred = entropy(ct.col_sums(), ct.total());
    let normalizer = 0.5 * (h_true + h_pred);
    let mut denominator = normalizer - emi;
    if denominator == 0.0 && mi == emi {
        return 1.0;
    }
    if denominator < 0.0 {
        denominator = denominator.min(-f64::EPSILON);
    } else {
        denominator = denominator.max(f64::EPSILON);
    }
    (mi - emi) / denominator
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::seq::SliceRandom;

    fn ct(t: &[usize], p: &[usize]) -> ContingencyTable {
        ContingencyTable::new(t, p).unwrap()
    }

    #[test]
    fn identical_labelings_score_one() {
        let t = [0, 0, 1, 1, 2, 2, 2];
        assert!((adjusted_mutual_information(&ct(&t, &t)) - 1.0).abs() < 1e-12);
        let renamed = [5, 5, 3, 3, 0, 0, 0];
        assert!((adjusted_mutual_information(&ct(&t, &renamed)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_prediction_scores_zero() {
        let table = ct(&[0, 0, 1, 1, 2], &[0; 5]);
        assert_eq!(mutual_information(&table), 0.0);
        assert_eq!(expected_mutual_information(&table), 0.0);
        assert_eq!(adjusted_mutual_information(&table), 0.0);
    }

    #[test]
    fn both_constant_is_one() {
        assert_eq!(adjusted_mutual_information(&ct(&[1; 4], &[0; 4])), 1.0);
    }

    #[test]
    fn expected_mi_matches_permutation_sampling() {
        let cases: [(&[usize], &[usize]); 3] = [
            (&[0, 0, 0, 1, 1, 1], &[0, 0, 1, 1, 2, 2]),
            (&[0, 0, 1, 1, 1, 2], &[0, 1, 1, 0, 1, 1]),
            (&[0, 1, 1, 2, 2, 2], &[0, 0, 0, 1, 1, 2]),
        ];
        for (case, (truth, pred)) in cases.iter().enumerate() {
            let exact = expected_mutual_information(&ct(truth, pred));
            let mut rng = rng_from_seed(case as u64);
            let mut shuffled = pred.to_vec();
            let trials = 100_000;
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..trials {
                shuffled.shuffle(&mut rng);
                let mi = mutual_information(&ct(truth, &shuffled));
                sum += mi;
                sum_sq += mi * mi;
            }
            let mean = sum / trials as f64;
            let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
            let se = (var / trials as f64).sqrt();
            assert!(
                (exact - mean).abs() <= 3.0 * se,
                "case {case}: exact {exact} vs sampled {mean} (se {se})"
            );
        }
    }
}
