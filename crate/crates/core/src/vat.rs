//! VAT matrix seriation, the iVAT minimax transform, MST-cut partitions,
//! and cluster-count estimation from the recorded connect magnitudes.
//!
//! VAT reorders a dissimilarity matrix with a modified Prim traversal so
//! that single-linkage clusters line up as dark diagonal blocks. The edge
//! weights recorded while each object joins the tree (the connect
//! magnitudes) are exactly the MST edge weights; cutting the largest
//! `k - 1` of them yields the single-linkage partition into `k` clusters,
//! and the gaps between sorted magnitudes suggest how many clusters exist.
//!
//! All tie-breaking is by smallest original index, so the same matrix
//! produces the same ordering everywhere.

use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};

/// The permutation produced by VAT together with the spanning-tree edges
/// recorded along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct VatOrdering {
    /// Position -> original object index; a bijection on `0..N`.
    order: Vec<usize>,
    /// Entry `t` is the dissimilarity of the edge that joined the object at
    /// position `t` to the already-selected set. Entry 0 is defined as 0.
    connect_magnitudes: Vec<f64>,
    /// Entry `t` is the position (`< t`) of the object it attached to.
    /// Entry 0 is defined as 0.
    connect_parent: Vec<usize>,
}

impl VatOrdering {
    pub fn new(order: Vec<usize>, connect_magnitudes: Vec<f64>, connect_parent: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if connect_magnitudes.len() != n || connect_parent.len() != n {
            return Err(Error::SizeMismatch { expected: n, actual: connect_magnitudes.len().min(connect_parent.len()) });
        }
        let mut seen = vec![false; n];
        for &o in &order {
            if o >= n || seen[o] {
                return Err(Error::InvalidMatrix("order is not a permutation".into()));
            }
            seen[o] = true;
        }
        for (t, &p) in connect_parent.iter().enumerate().skip(1) {
            if p >= t {
                return Err(Error::InvalidMatrix(format!("parent {p} at position {t} is not earlier")));
            }
        }
        Ok(VatOrdering { order, connect_magnitudes, connect_parent })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn connect_magnitudes(&self) -> &[f64] {
        &self.connect_magnitudes
    }

    pub fn connect_parent(&self) -> &[usize] {
        &self.connect_parent
    }
}

/// Whether a reordered matrix holds raw or minimax-transformed values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transformed {
    /// Raw dissimilarities in VAT order.
    Raw,
    /// Path-based minimax distances in VAT order.
    Minimax,
}

/// A dissimilarity matrix presented in VAT order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReorderedMatrix {
    values: Vec<f64>,
    ordering: VatOrdering,
    transformed: Transformed,
}

impl ReorderedMatrix {
    pub fn n_objects(&self) -> usize {
        self.ordering.len()
    }

    /// Value at display position `(r, c)`, i.e. between the objects at VAT
    /// positions `r` and `c`.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.ordering.len() + c]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ordering(&self) -> &VatOrdering {
        &self.ordering
    }

    pub fn transformed(&self) -> Transformed {
        self.transformed
    }

    /// Exports the reordered values in the binary matrix format.
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let n = self.n_objects();
        crate::data::write_dvm(path, n, n, &self.values)
    }
}

/// An estimated cluster count plus the partition induced by cutting the
/// largest MST edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterEstimate {
    /// Number of clusters (`>= 1`).
    pub k_p: usize,
    /// The `k_p - 1` positions whose connect magnitudes were cut, ascending.
    pub cut_positions: Vec<usize>,
    /// Partition labels in original index order; blocks are contiguous in
    /// VAT order.
    pub labels: Vec<usize>,
}

/// Reorders a dissimilarity matrix with the modified Prim traversal.
///
/// Starts from the row of the largest entry (smallest row index on ties,
/// then smallest column) and repeatedly appends the unselected object with
/// minimum dissimilarity to any selected object (smallest object index on
/// ties), recording that minimum and the position it attached to.
pub fn vat_reorder(d: &DissimilarityMatrix) -> VatOrdering {
    let n = d.n_objects();
    if n == 1 {
        return VatOrdering { order: vec![0], connect_magnitudes: vec![0.0], connect_parent: vec![0] };
    }

    // Seed object: row of the maximal entry. Row-major scan with strict >
    // keeps the smallest row, then smallest column, on ties.
    let mut start = 0;
    let mut dmax = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..n {
            if i != j && d.get(i, j) > dmax {
                dmax = d.get(i, j);
                start = i;
            }
        }
    }

    let mut order = Vec::with_capacity(n);
    let mut magnitudes = Vec::with_capacity(n);
    let mut parents = Vec::with_capacity(n);
    order.push(start);
    magnitudes.push(0.0);
    parents.push(0);

    let mut selected = vec![false; n];
    selected[start] = true;
    // For each unselected object: distance to the selected set and the
    // position of the selected endpoint realizing it. Strict comparisons
    // keep the earliest position on ties.
    let mut min_dist = vec![f64::INFINITY; n];
    let mut min_src = vec![0usize; n];
    for j in 0..n {
        if j != start {
            min_dist[j] = d.get(start, j);
        }
    }

    for _ in 1..n {
        let mut pick = usize::MAX;
        let mut best = f64::INFINITY;
        for j in 0..n {
            if !selected[j] && min_dist[j] < best {
                best = min_dist[j];
                pick = j;
            }
        }
        let position = order.len();
        order.push(pick);
        magnitudes.push(best);
        parents.push(min_src[pick]);
        selected[pick] = true;
        for j in 0..n {
            if !selected[j] && d.get(pick, j) < min_dist[j] {
                min_dist[j] = d.get(pick, j);
                min_src[j] = position;
            }
        }
    }

    VatOrdering { order, connect_magnitudes: magnitudes, connect_parent: parents }
}

/// Presents `d` in VAT order without transforming the values.
pub fn reorder_matrix(d: &DissimilarityMatrix, ordering: &VatOrdering) -> Result<ReorderedMatrix> {
    let n = d.n_objects();
    if ordering.len() != n {
        return Err(Error::SizeMismatch { expected: n, actual: ordering.len() });
    }
    let mut values = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            values[r * n + c] = d.get(ordering.order[r], ordering.order[c]);
        }
    }
    Ok(ReorderedMatrix { values, ordering: ordering.clone(), transformed: Transformed::Raw })
}

/// The iVAT transform: replaces each entry with the path-based minimax
/// distance (the minimum over all acyclic paths of the maximum edge along
/// the path), presented in VAT order.
///
/// Computed by the O(N^2) recursion over the VAT ordering: object `r`
/// joined the tree as a leaf hanging off `parent(r)`, so its minimax
/// distance to any earlier `c` is `max(connect(r), minimax(parent(r), c))`.
pub fn ivat_transform(d: &DissimilarityMatrix, ordering: &VatOrdering) -> Result<ReorderedMatrix> {
    let n = d.n_objects();
    if ordering.len() != n {
        return Err(Error::SizeMismatch { expected: n, actual: ordering.len() });
    }
    let mut values = vec![0.0; n * n];
    for r in 1..n {
        let parent = ordering.connect_parent[r];
        let edge = ordering.connect_magnitudes[r];
        for c in 0..r {
            let v = if c == parent { edge } else { edge.max(values[parent * n + c]) };
            values[r * n + c] = v;
            values[c * n + r] = v;
        }
    }
    Ok(ReorderedMatrix { values, ordering: ordering.clone(), transformed: Transformed::Minimax })
}

/// Cuts the `k_p - 1` largest connect magnitudes and labels the contiguous
/// VAT-order runs between cuts. Ties on magnitude are cut at the smallest
/// position first.
pub fn mst_cut_partition(ordering: &VatOrdering, k_p: usize) -> Result<ClusterEstimate> {
    let n = ordering.len();
    if k_p < 1 || k_p > n {
        return Err(Error::InvalidParameter(format!("k_p = {k_p} out of range 1..={n}")));
    }
    let mut positions: Vec<usize> = (1..n).collect();
    positions.sort_by(|&a, &b| {
        ordering.connect_magnitudes[b]
            .partial_cmp(&ordering.connect_magnitudes[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut cuts: Vec<usize> = positions[..k_p - 1].to_vec();
    cuts.sort_unstable();

    let mut labels = vec![0usize; n];
    let mut label = 0;
    let mut next_cut = 0;
    for t in 0..n {
        if next_cut < cuts.len() && cuts[next_cut] == t {
            label += 1;
            next_cut += 1;
        }
        labels[ordering.order[t]] = label;
    }
    Ok(ClusterEstimate { k_p, cut_positions: cuts, labels })
}

/// Estimates the number of clusters from the gaps between sorted connect
/// magnitudes.
///
/// Sorting the magnitudes descending as `e1 >= e2 >= ...`, the largest gap
/// `e_i - e_{i+1}` (considered for `i < min(k_max, N-1)`, smallest `i` on
/// ties) marks `i` inter-cluster edges, so the estimate is `i + 1`. If all
/// magnitudes are equal there is no gap structure and the estimate is 1.
pub fn estimate_k(ordering: &VatOrdering, k_max: usize) -> Result<usize> {
    let n = ordering.len();
    if n < 2 {
        return Err(Error::InvalidParameter("estimate_k requires N >= 2".into()));
    }
    if k_max < 2 || k_max > n {
        return Err(Error::InvalidParameter(format!("k_max = {k_max} out of range 2..={n}")));
    }
    let mut edges: Vec<f64> = ordering.connect_magnitudes[1..].to_vec();
    edges.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if edges.iter().all(|&e| e == edges[0]) {
        return Ok(1);
    }
    let limit = k_max.min(n - 1);
    let mut best_gap = f64::NEG_INFINITY;
    let mut best_i = 1;
    for i in 1..limit {
        let gap = edges[i - 1] - edges[i];
        if gap > best_gap {
            best_gap = gap;
            best_i = i;
        }
    }
    Ok(best_i + 1)
}
