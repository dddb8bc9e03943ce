//! Pairwise dissimilarity matrices and the RBF kernel transform.

use std::path::Path;

use crate::data::{self, EmbeddingSet};
use crate::error::{Error, Result};

/// Distance measure used for pairwise dissimilarities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    Cosine,
}

impl std::str::FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::Config(format!(
                "unknown metric {other:?} (expected euclidean or cosine)"
            ))),
        }
    }
}

/// Where a dissimilarity matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricTag {
    Euclidean,
    Cosine,
    Precomputed,
    KernelTransformed,
}

/// Symmetric N x N matrix of nonnegative dissimilarities with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    values: Vec<f64>,
    tag: MetricTag,
}

impl DissimilarityMatrix {
    /// Wraps precomputed values, validating the type invariants.
    pub fn from_values(n: usize, values: Vec<f64>, tag: MetricTag) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if values.len() != n * n {
            return Err(Error::SizeMismatch { expected: n * n, actual: values.len() });
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at index {i}")));
            }
            for j in (i + 1)..n {
                let a = values[i * n + j];
                let b = values[j * n + i];
                if a != b {
                    return Err(Error::InvalidMatrix(format!("asymmetric at ({i}, {j})")));
                }
                if !a.is_finite() || a < 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "invalid entry {a} at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(DissimilarityMatrix { n, values, tag })
    }

    pub fn n_objects(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn metric_tag(&self) -> MetricTag {
        self.tag
    }

    /// Exports in the binary matrix format.
    pub fn save(&self, path: &Path) -> Result<()> {
        data::write_dvm(path, self.n, self.n, &self.values)
    }

    /// Imports from the binary matrix format, enforcing squareness,
    /// symmetry, a zero diagonal, and nonnegative finite entries.
    pub fn load(path: &Path) -> Result<Self> {
        let (rows, cols, values) = data::read_dvm(path)?;
        if rows != cols {
            return Err(Error::InvalidMatrix(format!("not square: {rows} x {cols}")));
        }
        Self::from_values(rows, values, MetricTag::Precomputed)
    }
}

/// Distance between two feature vectors under `metric`.
///
/// Cosine dissimilarity is `1 - cos(a, b)`, clamped to `[0, 2]`; values
/// within 1e-12 below zero are snapped to 0. The caller must reject
/// zero-norm rows beforehand (see [`pairwise_dissimilarity`]).
pub fn metric_distance(a: &[f64], b: &[f64], metric: Metric) -> f64 {
    match metric {
        Metric::Euclidean => {
            let mut sum = 0.0;
            for (x, y) in a.iter().zip(b) {
                let d = x - y;
                sum += d * d;
            }
            sum.sqrt()
        }
        Metric::Cosine => {
            let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
            for (x, y) in a.iter().zip(b) {
                dot += x * y;
                na += x * x;
                nb += y * y;
            }
            clamp_cosine(1.0 - dot / (na.sqrt() * nb.sqrt()))
        }
    }
}

// Rounding can push identical rows a hair below zero; snap and clamp.
fn clamp_cosine(d: f64) -> f64 {
    d.clamp(0.0, 2.0)
}

/// Returns the indices of zero-norm rows, used to reject cosine input.
fn first_zero_norm_row(x: &EmbeddingSet) -> Option<usize> {
    (0..x.n_objects()).find(|&i| x.row(i).iter().all(|&v| v == 0.0))
}

/// Computes the full pairwise dissimilarity matrix. Each entry is computed
/// once and mirrored, so the output is exactly symmetric.
pub fn pairwise_dissimilarity(x: &EmbeddingSet, metric: Metric) -> Result<DissimilarityMatrix> {
    let n = x.n_objects();
    if metric == Metric::Cosine {
        if let Some(row) = first_zero_norm_row(x) {
            return Err(Error::ZeroNormRow { row });
        }
    }
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = metric_distance(x.row(i), x.row(j), metric);
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    let tag = match metric {
        Metric::Euclidean => MetricTag::Euclidean,
        Metric::Cosine => MetricTag::Cosine,
    };
    DissimilarityMatrix::from_values(n, values, tag)
}

/// Gaussian-kernel sharpening: `d' = 1 - exp(-gamma * d^2)`.
///
/// Strictly order-preserving, keeps the diagonal at zero, and maps the
/// output into `[0, 1)`.
pub fn rbf_kernel_transform(d: &DissimilarityMatrix, gamma: f64) -> Result<DissimilarityMatrix> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::InvalidParameter(format!("rbf gamma must be > 0, got {gamma}")));
    }
    let values = d.values().iter().map(|&v| 1.0 - (-gamma * v * v).exp()).collect();
    DissimilarityMatrix::from_values(d.n_objects(), values, MetricTag::KernelTransformed)
}
