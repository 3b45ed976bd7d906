use std::collections::BTreeMap;

use crate::error::{ClusterError, Result};

/// Class × cluster counts. Rows are the distinct true labels in increasing order and
/// columns are the distinct predicted labels in increasing order. Absent labels get no
/// row or column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    total: u64,
}

fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let ids: BTreeMap<usize, usize> = labels
        .iter()
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(idx, label)| (label, idx))
        .collect();
    (labels.iter().map(|l| ids[l]).collect(), ids.len())
}

impl ContingencyTable {
    pub fn new(truth: &[usize], pred: &[usize]) -> Result<Self> {
        if truth.len() != pred.len() {
            return Err(ClusterError::dim("label vectors", truth.len(), pred.len()));
        }
        if truth.is_empty() {
            return Err(ClusterError::UndefinedMetric(
                "empty label vectors".into(),
            ));
        }
        let (t, rows) = compact(truth);
        let (p, cols) = compact(pred);
        let mut counts = vec![vec![0u64; cols]; rows];
        for (&r, &c) in t.iter().zip(&p) {
            counts[r][c] += 1;
        }
        Ok(Self::from_counts_unchecked(counts))
    }

    /// Builds a table from explicit counts; empty rows and columns are kept.
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let cols = counts.first().map_or(0, Vec::len);
        if counts.is_empty() || cols == 0 || counts.iter().any(|r| r.len() != cols) {
            return Err(ClusterError::InvalidData(
                "contingency counts must be a nonempty rectangle".into(),
            ));
        }
        let table = Self::from_counts_unchecked(counts);
        if table.total == 0 {
            return Err(ClusterError::UndefinedMetric("empty table".into()));
        }
        Ok(table)
    }

    fn from_counts_unchecked(counts: Vec<Vec<u64>>) -> Self {
        let row_sums: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let cols = counts.first().map_or(0, Vec::len);
        let col_sums: Vec<u64> = (0..cols).map(|c| counts.iter().map(|r| r[c]).sum()).collect();
        let total = row_sums.iter().sum();
        ContingencyTable {
            counts,
            row_sums,
            col_sums,
            total,
        }
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn transposed(&self) -> Self {
        let cols = self.col_sums.len();
        let counts = (0..cols)
            .map(|c| self.counts.iter().map(|r| r[c]).collect())
            .collect();
        Self::from_counts_unchecked(counts)
    }

    /// Nonzero cells as `(n_ij, row_sum_i, col_sum_j)`, sorted. Every statistic sums over
    /// this order, so relabeling either side cannot change a result bit.
    pub fn cells(&self) -> Vec<(u64, u64, u64)> {
        let mut cells: Vec<(u64, u64, u64)> = self
            .counts
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &n)| n > 0)
                    .map(move |(j, &n)| (n, self.row_sums[i], self.col_sums[j]))
            })
            .collect();
        cells.sort_unstable();
        cells
    }

    pub(crate) fn sorted(values: &[u64]) -> Vec<u64> {
        let mut v: Vec<u64> = values.iter().copied().filter(|&x| x > 0).collect();
        v.sort_unstable();
        v
    }
}
