//! Demo logic, independent of the JS boundary so it can be tested on any
//! target.

use vat_core::data::{generate_gaussian_mixture, parse_csv, EmbeddingSet, MixtureSpec};
use vat_core::dissimilarity::{pairwise_dissimilarity, rbf_kernel_transform, Metric};
use vat_core::reduce::{tsne, TsneConfig};
use vat_core::render::rasterize;
use vat_core::vat::{estimate_k, ivat_transform, mst_cut_partition, reorder_matrix, vat_reorder};
use vat_core::{Error, Result};

pub struct RdiData {
    pub size: usize,
    /// Row-major grayscale intensities, one byte per cell.
    pub pixels: Vec<u8>,
    pub k_p: usize,
    /// Partition accuracy / NMI against labels, when labels exist.
    pub pa: Option<f64>,
    pub nmi: Option<f64>,
    /// Cumulative cluster boundaries in display order (cut lines).
    pub boundaries: Vec<u32>,
}

pub struct ScatterData {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub labels: Vec<u32>,
}

fn assess(x: &EmbeddingSet, metric: Metric, use_ivat: bool, kernel_gamma: f64, k_max: usize) -> Result<RdiData> {
    let n = x.n_objects();
    let mut d = pairwise_dissimilarity(x, metric)?;
    if kernel_gamma > 0.0 {
        d = rbf_kernel_transform(&d, kernel_gamma)?;
    }
    let ordering = vat_reorder(&d);
    let matrix = if use_ivat { ivat_transform(&d, &ordering)? } else { reorder_matrix(&d, &ordering)? };
    let k_p = if n >= 2 { estimate_k(&ordering, k_max.clamp(2, n))? } else { 1 };
    let estimate = mst_cut_partition(&ordering, k_p)?;

    let (pa, nmi) = match x.labels() {
        Some(truth) => (
            Some(vat_core::evaluate::partition_accuracy(&estimate.labels, truth)?),
            Some(vat_core::evaluate::nmi(&estimate.labels, truth)?),
        ),
        None => (None, None),
    };

    let mut boundaries = Vec::with_capacity(k_p);
    let mut run = 0u32;
    let display_labels: Vec<usize> = ordering.order().iter().map(|&o| estimate.labels[o]).collect();
    for t in 1..=n {
        run += 1;
        if t == n || display_labels[t] != display_labels[t - 1] {
            let last = boundaries.last().copied().unwrap_or(0);
            boundaries.push(last + run);
            run = 0;
        }
    }

    let image = rasterize(&matrix);
    Ok(RdiData { size: n, pixels: image.intensities().to_vec(), k_p, pa, nmi, boundaries })
}

fn mixture(k: usize, dims: usize, n_per: usize, separation: f64, seed: u64) -> Result<EmbeddingSet> {
    if k * n_per > 1200 {
        return Err(Error::InvalidParameter(
            "demo caps the mixture at 1200 objects; lower k or n_per".into(),
        ));
    }
    generate_gaussian_mixture(&MixtureSpec { k, dims, n_per, separation, seed })
}

/// Mixture -> dissimilarity -> (kernel) -> VAT/iVAT -> RDI + estimate.
#[allow(clippy::too_many_arguments)]
pub fn mixture_rdi(
    k: usize,
    dims: usize,
    n_per: usize,
    separation: f64,
    seed: u64,
    use_ivat: bool,
    kernel_gamma: f64,
    k_max: usize,
) -> Result<RdiData> {
    let x = mixture(k, dims, n_per, separation, seed)?;
    assess(&x, Metric::Euclidean, use_ivat, kernel_gamma, k_max)
}

/// Pasted CSV -> RDI + estimate. Labels (one integer per line) optional.
pub fn csv_rdi(
    csv: &str,
    labels: &str,
    metric: &str,
    use_ivat: bool,
    kernel_gamma: f64,
    k_max: usize,
) -> Result<RdiData> {
    let (n, dims, values) = parse_csv(csv)?;
    if n > 1200 {
        return Err(Error::InvalidParameter("demo caps pasted data at 1200 rows".into()));
    }
    let mut x = EmbeddingSet::new(n, dims, values)?;
    if !labels.trim().is_empty() {
        let parsed: Vec<usize> = labels
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: i + 1,
                    detail: format!("non-integer label {:?}", l.trim()),
                })
            })
            .collect::<Result<_>>()?;
        x = x.with_labels(parsed)?;
    }
    assess(&x, metric.parse()?, use_ivat, kernel_gamma, k_max)
}

/// Mixture -> exact t-SNE -> 2-D scatter coordinates plus true components.
pub fn mixture_scatter(
    k: usize,
    dims: usize,
    n_per: usize,
    separation: f64,
    seed: u64,
    perplexity: f64,
    iterations: usize,
) -> Result<ScatterData> {
    if k * n_per > 500 {
        return Err(Error::InvalidParameter(
            "the in-browser t-SNE caps at 500 objects; lower k or n_per".into(),
        ));
    }
    let x = mixture(k, dims, n_per, separation, seed)?;
    let labels: Vec<u32> = x.labels().unwrap().iter().map(|&l| l as u32).collect();
    let config = TsneConfig { perplexity, iterations, seed, ..TsneConfig::default() };
    let y = tsne(&x, &config)?;
    let xs = (0..y.n_objects()).map(|i| y.row(i)[0]).collect();
    let ys = (0..y.n_objects()).map(|i| y.row(i)[1]).collect();
    Ok(ScatterData { xs, ys, labels })
}
