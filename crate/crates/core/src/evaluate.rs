//! Partition scoring against ground truth: partition accuracy under the
//! optimal label mapping (Kuhn-Munkres) and normalized mutual information.

use crate::error::{Error, Result};

/// Cross-tabulation of predicted vs true labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// `counts[p][t]` = number of objects with predicted label `p` and true
    /// label `t`.
    pub counts: Vec<Vec<u64>>,
    pub n_total: usize,
}

impl ContingencyTable {
    /// Builds the table from two equal-length label vectors. Labels are
    /// remapped to dense ids internally, so any nonnegative ids work.
    pub fn new(pred: &[usize], truth: &[usize]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::SizeMismatch { expected: truth.len(), actual: pred.len() });
        }
        if pred.is_empty() {
            return Err(Error::EmptyInput);
        }
        let pred = crate::data::relabel_contiguous(pred);
        let truth = crate::data::relabel_contiguous(truth);
        let k_pred = pred.iter().max().unwrap() + 1;
        let k_true = truth.iter().max().unwrap() + 1;
        let mut counts = vec![vec![0u64; k_true]; k_pred];
        for (&p, &t) in pred.iter().zip(&truth) {
            counts[p][t] += 1;
        }
        Ok(ContingencyTable { counts, n_total: pred.len() })
    }

    pub fn k_pred(&self) -> usize {
        self.counts.len()
    }

    pub fn k_true(&self) -> usize {
        self.counts[0].len()
    }

    fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|row| row.iter().sum()).collect()
    }

    fn col_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.k_true()];
        for row in &self.counts {
            for (t, &c) in row.iter().enumerate() {
                sums[t] += c;
            }
        }
        sums
    }
}

/// Exact minimum-cost assignment on a square cost matrix (Kuhn-Munkres with
/// slack arrays, O(n^3)). Returns the column assigned to each row.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    debug_assert!(cost.iter().all(|row| row.len() == n));

    // Potentials and matching, 1-based internally with column 0 as the
    // standard virtual root of the augmenting search.
    let mut potential_row = vec![0.0; n + 1];
    let mut potential_col = vec![0.0; n + 1];
    let mut matched_row = vec![0usize; n + 1]; // column -> row
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        matched_row[0] = row;
        let mut current_col = 0usize;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[current_col] = true;
            let i = matched_row[current_col];
            let mut delta = f64::INFINITY;
            let mut next_col = 0usize;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced =
                    cost[i - 1][col - 1] - potential_row[i] - potential_col[col];
                if reduced < min_slack[col] {
                    min_slack[col] = reduced;
                    way[col] = current_col;
                }
                if min_slack[col] < delta {
                    delta = min_slack[col];
                    next_col = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    potential_row[matched_row[col]] += delta;
                    potential_col[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            current_col = next_col;
            if matched_row[current_col] == 0 {
                break;
            }
        }
        // Augment along the alternating path.
        while current_col != 0 {
            let prev = way[current_col];
            matched_row[current_col] = matched_row[prev];
            current_col = prev;
        }
    }

    let mut assignment = vec![0usize; n];
    for col in 1..=n {
        if matched_row[col] > 0 {
            assignment[matched_row[col] - 1] = col - 1;
        }
    }
    assignment
}

/// Maximum-weight assignment on a (possibly rectangular) weight matrix,
/// zero-padded to square. Returns per-row column choices (padded columns
/// mean "unmatched") and the achieved total weight.
pub fn max_weight_assignment(weights: &[Vec<u64>]) -> (Vec<usize>, u64) {
    let rows = weights.len();
    let cols = weights.first().map_or(0, |r| r.len());
    let dim = rows.max(cols);
    let peak = weights.iter().flatten().copied().max().unwrap_or(0);
    let mut cost = vec![vec![peak as f64; dim]; dim];
    for (i, row) in weights.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            // Integer-valued f64 arithmetic stays exact far beyond any
            // realistic object count.
            cost[i][j] = (peak - w) as f64;
        }
    }
    let assignment = min_cost_assignment(&cost);
    let mut total = 0u64;
    for (i, &j) in assignment.iter().enumerate().take(rows) {
        if j < cols {
            total += weights[i][j];
        }
    }
    (assignment, total)
}

/// Partition accuracy: the percentage of objects whose predicted label
/// matches ground truth under the best bijective label mapping. Extra
/// predicted clusters are matched to zero-padded columns and contribute
/// nothing.
pub fn partition_accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    let (_, matched) = max_weight_assignment(&table.counts);
    Ok(100.0 * matched as f64 / table.n_total as f64)
}

fn entropy(counts: &[u64], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information `2 I(U;V) / (H(U) + H(V))` with
/// natural-log entropies.
///
/// Defined as 1 when both partitions are single-cluster and 0 when either
/// entropy is zero otherwise.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    let n = table.n_total as f64;
    let h_pred = entropy(&table.row_sums(), n);
    let h_true = entropy(&table.col_sums(), n);
    if h_pred == 0.0 || h_true == 0.0 {
        return Ok(if table.k_pred() == 1 && table.k_true() == 1 { 1.0 } else { 0.0 });
    }
    let mut joint = 0.0;
    for row in &table.counts {
        for &c in row {
            if c > 0 {
                let p = c as f64 / n;
                joint -= p * p.ln();
            }
        }
    }
    let mutual = h_pred + h_true - joint;
    Ok(2.0 * mutual / (h_pred + h_true))
}
