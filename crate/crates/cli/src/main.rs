//! `vat` — cluster tendency assessment from the command line.
//!
//! The `run` subcommand drives the whole pipeline from a config file and/or
//! flags; the remaining subcommands expose each stage separately so a run
//! can be decomposed, inspected, and recomposed byte-identically (stage
//! seeds are split from the master seed the same way in both paths).

mod ordfile;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use vat_core::data::{self, FileFormat, MixtureSpec};
use vat_core::dissimilarity::{pairwise_dissimilarity, rbf_kernel_transform, DissimilarityMatrix};
use vat_core::pipeline::{run_pipeline, PipelineConfig};
use vat_core::reduce::{random_project, spectral_embed, tsne, SpectralConfig, TsneConfig};
use vat_core::rng::{stage_seed, Stage};
use vat_core::sampling::mmrs_sample;
use vat_core::vat::{estimate_k, ivat_transform, mst_cut_partition, reorder_matrix, vat_reorder};
use vat_core::Metric;

#[derive(Parser)]
#[command(name = "vat", about = "Cluster tendency assessment: seriation, RDI images, MST-cut partitions", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run the full pipeline from a config file and/or flags (flags win).
    Run(RunArgs),
    /// Generate a synthetic Gaussian-mixture dataset.
    Generate(GenerateArgs),
    /// Compute a pairwise dissimilarity matrix.
    Dissim(DissimArgs),
    /// Reduce embedding dimensionality.
    Reduce(ReduceArgs),
    /// Draw a maximin + random sample.
    Sample(SampleArgs),
    /// Seriate a dissimilarity matrix (raw VAT view).
    Vat(VatArgs),
    /// Seriate and apply the minimax transform.
    Ivat(VatArgs),
    /// Estimate the cluster count from a stored ordering.
    Estimate(EstimateArgs),
    /// Extract the MST-cut partition from a stored ordering.
    Cluster(ClusterArgs),
    /// Score predicted labels against ground truth.
    Eval(EvalArgs),
    /// Render a matrix as a P5 graymap.
    Render(RenderArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value config file; flags below override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input format: csv or dvm.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// euclidean or cosine.
    #[arg(long)]
    metric: Option<String>,
    /// Reduction stage: tsne, random_projection, spectral, or none.
    #[arg(long)]
    reduce: Option<String>,
    #[arg(long)]
    perplexity: Option<f64>,
    #[arg(long)]
    tsne_iters: Option<usize>,
    #[arg(long)]
    target_dim: Option<usize>,
    #[arg(long)]
    spectral_r: Option<usize>,
    #[arg(long)]
    spectral_gamma: Option<f64>,
    /// Enables the RBF kernel transform with this gamma.
    #[arg(long)]
    kernel_gamma: Option<f64>,
    /// Enables MMRS sampling with this many distinguished objects.
    #[arg(long)]
    kprime: Option<usize>,
    #[arg(long)]
    sample_n: Option<usize>,
    /// reduce_first or sample_first.
    #[arg(long)]
    order: Option<String>,
    /// vat or ivat.
    #[arg(long)]
    transform: Option<String>,
    /// "auto" or a fixed cluster count.
    #[arg(long)]
    kp: Option<String>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_image: Option<PathBuf>,
    #[arg(long)]
    out_labels: Option<PathBuf>,
    #[arg(long)]
    out_report: Option<PathBuf>,
    #[arg(long)]
    image_scale: Option<usize>,
}

impl RunArgs {
    fn into_config(self) -> Result<PipelineConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                PipelineConfig::from_key_values(&text)?
            }
            None => PipelineConfig::default(),
        };
        let mut set = |key: &str, value: Option<String>| -> Result<()> {
            if let Some(v) = value {
                config.set(key, &v)?;
            }
            Ok(())
        };
        let path_string = |p: Option<PathBuf>| p.map(|p| p.display().to_string());
        set("input", path_string(self.input))?;
        set("format", self.format)?;
        set("labels", path_string(self.labels))?;
        set("metric", self.metric)?;
        set("reduce", self.reduce)?;
        set("perplexity", self.perplexity.map(|v| v.to_string()))?;
        set("tsne_iters", self.tsne_iters.map(|v| v.to_string()))?;
        set("target_dim", self.target_dim.map(|v| v.to_string()))?;
        set("spectral_r", self.spectral_r.map(|v| v.to_string()))?;
        set("spectral_gamma", self.spectral_gamma.map(|v| v.to_string()))?;
        set("kernel_gamma", self.kernel_gamma.map(|v| v.to_string()))?;
        set("kprime", self.kprime.map(|v| v.to_string()))?;
        set("sample_n", self.sample_n.map(|v| v.to_string()))?;
        set("order", self.order)?;
        set("transform", self.transform)?;
        set("kp", self.kp)?;
        set("kmax", self.kmax.map(|v| v.to_string()))?;
        set("seed", self.seed.map(|v| v.to_string()))?;
        set("out_image", path_string(self.out_image))?;
        set("out_labels", path_string(self.out_labels))?;
        set("out_report", path_string(self.out_report))?;
        set("image_scale", self.image_scale.map(|v| v.to_string()))?;
        Ok(config)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    dims: usize,
    #[arg(long)]
    n_per: usize,
    #[arg(long, default_value_t = 20.0)]
    separation: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output matrix path (.csv or .dvm decides the format).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    out_labels: Option<PathBuf>,
}

#[derive(Args)]
struct DissimArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    format: Option<String>,
    #[arg(long, default_value = "euclidean")]
    metric: String,
    /// Apply the RBF kernel transform with this gamma after the metric.
    #[arg(long)]
    kernel_gamma: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    format: Option<String>,
    /// tsne, random_projection, or spectral.
    #[arg(long)]
    reduce: String,
    #[arg(long, default_value_t = 30.0)]
    perplexity: f64,
    #[arg(long, default_value_t = 1000)]
    tsne_iters: usize,
    #[arg(long, default_value_t = 100)]
    target_dim: usize,
    #[arg(long, default_value_t = 2)]
    spectral_r: usize,
    #[arg(long)]
    spectral_gamma: Option<f64>,
    /// Metric used when the spectral stage builds its affinity graph.
    #[arg(long, default_value = "euclidean")]
    metric: String,
    /// Master seed; the stage seed is split from it as in `run`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    format: Option<String>,
    #[arg(long, default_value = "euclidean")]
    metric: String,
    #[arg(long, default_value_t = 15)]
    kprime: usize,
    #[arg(long, default_value_t = 4000)]
    sample_n: usize,
    /// Master seed; the stage seed is split from it as in `run`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth labels to subset alongside the data.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    out_labels: Option<PathBuf>,
    /// Write the selected original indices, one per line.
    #[arg(long)]
    out_indices: Option<PathBuf>,
}

#[derive(Args)]
struct VatArgs {
    /// Dissimilarity matrix in the binary format.
    #[arg(long)]
    input: PathBuf,
    /// Reordered matrix output (.dvm).
    #[arg(long)]
    out: PathBuf,
    /// Store the ordering for `estimate` / `cluster`.
    #[arg(long)]
    out_ordering: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    ordering: PathBuf,
    #[arg(long, default_value_t = 15)]
    kmax: usize,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    ordering: PathBuf,
    #[arg(long)]
    kp: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    /// Matrix to render, in the binary format.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    scale: usize,
}

fn input_format(path: &std::path::Path, flag: &Option<String>) -> Result<FileFormat> {
    Ok(match flag {
        Some(s) => s.parse()?,
        None => FileFormat::from_path(path),
    })
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => {
            let config = args.into_config()?;
            let report = run_pipeline(&config)?;
            print!("{}", report.to_key_values());
        }
        Command::Generate(args) => {
            let spec = MixtureSpec {
                k: args.k,
                dims: args.dims,
                n_per: args.n_per,
                separation: args.separation,
                seed: args.seed,
            };
            let set = data::generate_gaussian_mixture(&spec)?;
            data::save_embeddings(&args.out, &set, FileFormat::from_path(&args.out))?;
            if let Some(path) = args.out_labels {
                data::write_labels(&path, set.labels().expect("generator sets labels"))?;
            }
        }
        Command::Dissim(args) => {
            let format = input_format(&args.input, &args.format)?;
            let x = data::load_embeddings(&args.input, format)?;
            let metric: Metric = args.metric.parse()?;
            let mut d = pairwise_dissimilarity(&x, metric)?;
            if let Some(gamma) = args.kernel_gamma {
                d = rbf_kernel_transform(&d, gamma)?;
            }
            d.save(&args.out)?;
        }
        Command::Reduce(args) => {
            let format = input_format(&args.input, &args.format)?;
            let x = data::load_embeddings(&args.input, format)?;
            let seed = stage_seed(args.seed, Stage::Reduce);
            let reduced = match args.reduce.as_str() {
                "tsne" => tsne(
                    &x,
                    &TsneConfig {
                        perplexity: args.perplexity,
                        iterations: args.tsne_iters,
                        seed,
                        ..TsneConfig::default()
                    },
                )?,
                "random_projection" => random_project(&x, args.target_dim, seed)?,
                "spectral" => {
                    let metric: Metric = args.metric.parse()?;
                    let d = pairwise_dissimilarity(&x, metric)?;
                    spectral_embed(
                        &d,
                        &SpectralConfig { r: args.spectral_r, affinity_gamma: args.spectral_gamma },
                    )?
                }
                other => anyhow::bail!("unknown reduce stage {other:?}"),
            };
            data::save_embeddings(&args.out, &reduced, FileFormat::from_path(&args.out))?;
        }
        Command::Sample(args) => {
            let format = input_format(&args.input, &args.format)?;
            let mut x = data::load_embeddings(&args.input, format)?;
            if let Some(path) = &args.labels {
                x = x.with_labels(data::load_labels(path)?)?;
            }
            let metric: Metric = args.metric.parse()?;
            let seed = stage_seed(args.seed, Stage::Sample);
            let result = mmrs_sample(&x, metric, args.kprime, args.sample_n, seed)?;
            let sampled = x.subset(&result.sample)?;
            data::save_embeddings(&args.out, &sampled, FileFormat::from_path(&args.out))?;
            if let Some(path) = args.out_labels {
                let labels = sampled
                    .labels()
                    .ok_or_else(|| anyhow::anyhow!("--out-labels requires --labels"))?;
                data::write_labels(&path, labels)?;
            }
            if let Some(path) = args.out_indices {
                data::write_labels(&path, &result.sample)?;
            }
        }
        Command::Vat(args) => {
            let d = DissimilarityMatrix::load(&args.input)?;
            let ordering = vat_reorder(&d);
            let m = reorder_matrix(&d, &ordering)?;
            m.save(&args.out)?;
            if let Some(path) = args.out_ordering {
                ordfile::write_ordering(&path, &ordering)?;
            }
        }
        Command::Ivat(args) => {
            let d = DissimilarityMatrix::load(&args.input)?;
            let ordering = vat_reorder(&d);
            let m = ivat_transform(&d, &ordering)?;
            m.save(&args.out)?;
            if let Some(path) = args.out_ordering {
                ordfile::write_ordering(&path, &ordering)?;
            }
        }
        Command::Estimate(args) => {
            let ordering = ordfile::read_ordering(&args.ordering)?;
            let k_p = estimate_k(&ordering, args.kmax.min(ordering.len()))?;
            println!("kp={k_p}");
        }
        Command::Cluster(args) => {
            let ordering = ordfile::read_ordering(&args.ordering)?;
            let estimate = mst_cut_partition(&ordering, args.kp)?;
            data::write_labels(&args.out, &estimate.labels)?;
        }
        Command::Eval(args) => {
            let pred = data::load_labels(&args.pred)?;
            let truth = data::load_labels(&args.truth)?;
            let pa = vat_core::evaluate::partition_accuracy(&pred, &truth)?;
            let nmi = vat_core::evaluate::nmi(&pred, &truth)?;
            println!("pa={pa} nmi={nmi}");
        }
        Command::Render(args) => {
            let (rows, cols, values) = data::read_dvm(&args.input)?;
            anyhow::ensure!(rows == cols, "render input must be square, got {rows} x {cols}");
            let image = vat_core::render::rasterize_values(&values, rows);
            vat_core::render::write_pgm(&image, &args.out, args.scale)?;
        }
    }
    Ok(())
}
