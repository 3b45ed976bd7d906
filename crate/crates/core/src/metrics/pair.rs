use super::contingency::ContingencyTable;
use crate::error::{ClusterError, Result};

fn comb2(n: u64) -> u128 {
    let n = n as u128;
    n * n.saturating_sub(1) / 2
}

/// Adjusted Rand index. Returns 1 when the chance-corrected denominator vanishes.
pub fn adjusted_rand_index(ct: &ContingencyTable) -> Result<f64> {
    if ct.total() < 2 {
        return Err(ClusterError::UndefinedMetric(
            "adjusted Rand index needs at least two samples".into(),
        ));
    }
    let index: u128 = ct.counts().iter().flatten().map(|&n| comb2(n)).sum();
    let sum_rows: u128 = ct.row_sums().iter().map(|&a| comb2(a)).sum();
    let sum_cols: u128 = ct.col_sums().iter().map(|&b| comb2(b)).sum();
    let pairs = comb2(ct.total()) as f64;
    let expected = sum_rows as f64 * sum_cols as f64 / pairs;
    let max_index = 0.5 * (sum_rows as f64 + sum_cols as f64);
    let denominator = max_index - expected;
    if denominator == 0.0 {
        return Ok(1.0);
    }
    Ok((index as f64 - expected) / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ari(t: &[usize], p: &[usize]) -> f64 {
        adjusted_rand_index(&ContingencyTable::new(t, p).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(ari(&[0, 0, 1, 1, 2], &[0, 0, 1, 1, 2]), 1.0);
        assert_eq!(ari(&[0, 0, 1, 1, 2], &[2, 2, 0, 0, 1]), 1.0);
        assert!((ari(&[0, 0, 1, 1], &[0, 1, 0, 1]) + 0.5).abs() < 1e-15);
        assert_eq!(ari(&[0, 0, 0], &[1, 1, 1]), 1.0);
        assert_eq!(ari(&[0, 1, 2], &[0, 1, 2]), 1.0);
        assert!(adjusted_rand_index(&ContingencyTable::new(&[0], &[0]).unwrap()).is_err());
    }
}
