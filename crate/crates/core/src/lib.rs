/*!
Cluster tendency assessment for embedding data.

This crate answers "how many clusters does this data have, and where are
they?" without running a clustering algorithm first. It reorders a pairwise
dissimilarity matrix (VAT) so that clusters appear as dark diagonal blocks,
optionally sharpens the picture with the minimax path-distance transform
(iVAT) or a Gaussian kernel, estimates the cluster count from the recorded
spanning-tree edge magnitudes, and extracts the matching partition by
cutting those edges.

Around that core sit the supporting stages of the full pipeline:

* [`data`] — CSV / binary matrix formats, label files, and a seeded
  Gaussian-mixture generator for synthetic experiments.
* [`dissimilarity`] — Euclidean and cosine pairwise matrices plus the RBF
  kernel transform.
* [`reduce`] — exact t-SNE, Gaussian random projection, and spectral
  graph-Laplacian embedding.
* [`sampling`] — maximin + random sampling for datasets too large for the
  O(N^2) matrix.
* [`vat`] — seriation, iVAT, MST-cut partitions, and cluster-count
  estimation.
* [`evaluate`] — partition accuracy (Kuhn-Munkres) and normalized mutual
  information against ground truth.
* [`render`] — P5 graymap output of the reordered matrix.
* [`pipeline`] — a config-driven driver composing all of the above with
  deterministic per-stage seeding.

Everything is deterministic for fixed seeds: randomness flows through one
documented generator ([`rng::SplitMix64`]), so artifacts reproduce bit for
bit across runs and platforms.

# Example

```
use vat_core::data::{generate_gaussian_mixture, MixtureSpec};
use vat_core::dissimilarity::{pairwise_dissimilarity, Metric};
use vat_core::vat::{estimate_k, ivat_transform, mst_cut_partition, vat_reorder};

let spec = MixtureSpec { k: 3, dims: 8, n_per: 25, separation: 15.0, seed: 1 };
let x = generate_gaussian_mixture(&spec).unwrap();
let d = pairwise_dissimilarity(&x, Metric::Euclidean).unwrap();
let ordering = vat_reorder(&d);
let k = estimate_k(&ordering, 15).unwrap();
assert_eq!(k, 3);
let partition = mst_cut_partition(&ordering, k).unwrap();
assert_eq!(partition.labels.len(), 75);
let rdi = ivat_transform(&d, &ordering).unwrap();
assert_eq!(rdi.n_objects(), 75);
```
*/

pub mod data;
pub mod dissimilarity;
mod error;
pub mod evaluate;
pub mod pipeline;
pub mod reduce;
pub mod render;
pub mod rng;
pub mod sampling;
pub mod vat;

pub use data::{EmbeddingSet, FileFormat, MixtureSpec};
pub use dissimilarity::{DissimilarityMatrix, Metric};
pub use error::{Error, Result};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineReport};
pub use vat::{ClusterEstimate, ReorderedMatrix, VatOrdering};
