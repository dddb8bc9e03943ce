//! Heavier cross-module invariants that don't fit next to the code: full
//! spec-size reference equality for the pairwise kernels, embedding quality
//! on the separated-Gaussian benchmark, projection distortion, and the
//! block structure of rendered images.

use std::path::Path;

use vat_core::data::{self, generate_gaussian_mixture, EmbeddingSet, MixtureSpec};
use vat_core::dissimilarity::{pairwise_dissimilarity, Metric};
use vat_core::pipeline::{run_pipeline, PipelineConfig, TransformKind};
use vat_core::reduce::{random_project, tsne, TsneConfig};
use vat_core::render::read_pgm;
use vat_core::rng::SplitMix64;

fn random_embedding(rng: &mut SplitMix64, n: usize, p: usize) -> EmbeddingSet {
    let data: Vec<f64> = (0..n * p).map(|_| rng.next_normal() * 2.0 + 0.5).collect();
    EmbeddingSet::new(n, p, data).unwrap()
}

/// Independent double-loop reference with reversed accumulation order.
fn reference_distance(a: &[f64], b: &[f64], metric: Metric) -> f64 {
    match metric {
        Metric::Euclidean => {
            let mut sum = 0.0;
            for k in (0..a.len()).rev() {
                sum += (a[k] - b[k]) * (a[k] - b[k]);
            }
            sum.sqrt()
        }
        Metric::Cosine => {
            let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
            for k in (0..a.len()).rev() {
                dot += a[k] * b[k];
                na += a[k] * a[k];
                nb += b[k] * b[k];
            }
            (1.0 - dot / (na.sqrt() * nb.sqrt())).clamp(0.0, 2.0)
        }
    }
}

#[test]
fn pairwise_matches_naive_reference_at_spec_sizes() {
    let mut rng = SplitMix64::new(2024);
    for &(n, p, metric) in &[
        (500usize, 64usize, Metric::Euclidean),
        (128, 2048, Metric::Euclidean),
        (500, 64, Metric::Cosine),
        (128, 2048, Metric::Cosine),
    ] {
        let x = random_embedding(&mut rng, n, p);
        let d = pairwise_dissimilarity(&x, metric).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 0.0 } else { reference_distance(x.row(i), x.row(j), metric) };
                let got = d.get(i, j);
                let tolerance = 1e-12 * expected.abs().max(1e-12);
                assert!(
                    (got - expected).abs() <= tolerance,
                    "{metric:?} ({n} x {p}) at ({i}, {j}): {got} vs {expected}"
                );
            }
        }
    }
}

#[test]
fn tsne_separates_cs_gaussians() {
    // Full-scale benchmark: every object's 5 nearest neighbors in the 2-D
    // embedding should come from its own generating component for at least
    // 99% of objects.
    let spec = MixtureSpec { k: 3, dims: 100, n_per: 334, separation: 20.0, seed: 7 };
    let x = generate_gaussian_mixture(&spec).unwrap();
    let labels = x.labels().unwrap().to_vec();
    let config = TsneConfig { seed: 5, ..TsneConfig::default() };
    let y = tsne(&x, &config).unwrap();

    let n = y.n_objects();
    let mut pure = 0usize;
    for i in 0..n {
        let mut distances: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let dx = y.row(i)[0] - y.row(j)[0];
                let dy = y.row(i)[1] - y.row(j)[1];
                (dx * dx + dy * dy, j)
            })
            .collect();
        distances.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if distances[..5].iter().all(|&(_, j)| labels[j] == labels[i]) {
            pure += 1;
        }
    }
    let fraction = pure as f64 / n as f64;
    assert!(fraction >= 0.99, "5-NN purity {fraction}");
}

#[test]
fn random_projection_distortion_is_bounded() {
    // Johnson-Lindenstrauss concentration, measured with the fixed
    // generator: 2048 -> 100 keeps the median squared-distance ratio
    // within 35% of 1.
    let mut rng = SplitMix64::new(77);
    let n = 120;
    let x = random_embedding(&mut rng, n, 2048);
    let y = random_project(&x, 100, 7).unwrap();

    let mut ratios = Vec::with_capacity(1000);
    for _ in 0..1000 {
        let i = rng.next_below(n as u64) as usize;
        let j = loop {
            let j = rng.next_below(n as u64) as usize;
            if j != i {
                break j;
            }
        };
        let d_in: f64 = x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
        let d_out: f64 = y.row(i).iter().zip(y.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
        ratios.push((d_out / d_in - 1.0).abs());
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = ratios[ratios.len() / 2];
    assert!(median <= 0.35, "median distortion {median}");
}

fn block_mean(pixels: &[u8], side: usize, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for r in rows {
        for c in cols.clone() {
            sum += pixels[r * side + c] as f64;
            count += 1;
        }
    }
    sum / count as f64
}

#[test]
fn rendered_cs_image_shows_three_dark_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let spec = MixtureSpec { k: 3, dims: 100, n_per: 334, separation: 20.0, seed: 7 };
    let set = generate_gaussian_mixture(&spec).unwrap();
    let input = dir.path().join("cs.csv");
    data::write_csv(&input, &set).unwrap();

    let image = dir.path().join("cs.pgm");
    let config = PipelineConfig {
        input,
        metric: Metric::Euclidean,
        transform: TransformKind::Ivat,
        out_image: Some(image.clone()),
        ..PipelineConfig::default()
    };
    let report = run_pipeline(&config).unwrap();
    assert_eq!(report.k_p, 3);

    // Block boundaries are the cumulative cluster sizes in VAT order.
    let sizes = report.cluster_sizes.clone();
    assert_eq!(sizes.iter().sum::<usize>(), 1002);
    let mut boundaries = vec![0usize];
    for s in &sizes {
        boundaries.push(boundaries.last().unwrap() + s);
    }

    let (w, h, pixels) = read_pgm(Path::new(&image)).unwrap();
    assert_eq!((w, h), (1002, 1002));
    let mut diag_means = Vec::new();
    for b in 0..3 {
        diag_means.push(block_mean(&pixels, w, boundaries[b]..boundaries[b + 1], boundaries[b]..boundaries[b + 1]));
    }
    // Off-diagonal block (first vs second cluster).
    let off = block_mean(&pixels, w, boundaries[0]..boundaries[1], boundaries[1]..boundaries[2]);
    for (b, mean) in diag_means.iter().enumerate() {
        assert!(
            mean * 1.5 < off,
            "diagonal block {b} mean {mean} not visibly darker than off-block {off}"
        );
    }
}
