//! End-to-end pipeline: load -> [reduce] -> [sample] -> dissimilarity ->
//! [kernel] -> vat -> [ivat] -> estimate/partition -> [evaluate] -> render.
//!
//! A pipeline is described by a [`PipelineConfig`], which round-trips
//! through a flat `key=value` text format so experiments are diffable.
//! Per-stage seeds are split deterministically from the master seed (see
//! [`crate::rng::stage_seed`]), so toggling one stage never changes the
//! randomness another stage sees.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::data::{self, EmbeddingSet, FileFormat};
use crate::dissimilarity::{pairwise_dissimilarity, rbf_kernel_transform, Metric};
use crate::error::{Error, Result};
use crate::reduce::{random_project, spectral_embed, tsne, SpectralConfig, TsneConfig};
use crate::render::render_rdi;
use crate::rng::{stage_seed, Stage};
use crate::sampling::mmrs_sample;
use crate::vat::{estimate_k, ivat_transform, mst_cut_partition, reorder_matrix, vat_reorder};
use crate::{evaluate, vat};

/// Dimensionality-reduction stage selection.
#[derive(Debug, Clone, PartialEq)]
pub enum ReduceStage {
    None,
    Tsne { perplexity: f64, output_dims: usize, iterations: usize },
    RandomProjection { target_dim: usize },
    Spectral { r: usize, gamma: Option<f64> },
}

/// Sampling stage selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleStage {
    None,
    Mmrs { k_prime: usize, n: usize },
}

/// Whether the rendered matrix is raw VAT or minimax iVAT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Vat,
    Ivat,
}

/// Cluster-count selection: estimated from MST gaps or fixed by the user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KpChoice {
    Auto { k_max: usize },
    Fixed(usize),
}

/// Order of the reduce and sample stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageOrder {
    ReduceFirst,
    SampleFirst,
}

/// Full description of one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub format: FileFormat,
    pub labels: Option<PathBuf>,
    pub metric: Metric,
    pub reduce: ReduceStage,
    pub sample: SampleStage,
    pub order: StageOrder,
    /// RBF kernel gamma; `None` disables the kernel transform.
    pub kernel_gamma: Option<f64>,
    pub transform: TransformKind,
    pub kp: KpChoice,
    pub seed: u64,
    pub out_image: Option<PathBuf>,
    pub out_labels: Option<PathBuf>,
    pub out_report: Option<PathBuf>,
    pub image_scale: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: PathBuf::new(),
            format: FileFormat::Csv,
            labels: None,
            metric: Metric::Euclidean,
            reduce: ReduceStage::None,
            sample: SampleStage::None,
            order: StageOrder::ReduceFirst,
            kernel_gamma: None,
            transform: TransformKind::Ivat,
            kp: KpChoice::Auto { k_max: 15 },
            seed: 0,
            out_image: None,
            out_labels: None,
            out_report: None,
            image_scale: 1,
        }
    }
}

impl PipelineConfig {
    /// Applies one `key=value` setting. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("bad value {value:?} for key {key}")))
        }
        match key {
            "input" => self.input = PathBuf::from(value),
            "format" => self.format = value.parse()?,
            "labels" => {
                self.labels = if value.is_empty() { None } else { Some(PathBuf::from(value)) }
            }
            "metric" => self.metric = value.parse()?,
            "reduce" => {
                self.reduce = match value {
                    "none" => ReduceStage::None,
                    "tsne" => ReduceStage::Tsne {
                        perplexity: 30.0,
                        output_dims: 2,
                        iterations: 1000,
                    },
                    "random_projection" => ReduceStage::RandomProjection { target_dim: 100 },
                    "spectral" => ReduceStage::Spectral { r: 2, gamma: None },
                    other => {
                        return Err(Error::Config(format!("unknown reduce stage {other:?}")))
                    }
                }
            }
            "perplexity" => {
                let p: f64 = parse(key, value)?;
                if let ReduceStage::Tsne { perplexity, .. } = &mut self.reduce {
                    *perplexity = p;
                } else {
                    self.reduce =
                        ReduceStage::Tsne { perplexity: p, output_dims: 2, iterations: 1000 };
                }
            }
            "tsne_iters" => {
                let iters: usize = parse(key, value)?;
                if let ReduceStage::Tsne { iterations, .. } = &mut self.reduce {
                    *iterations = iters;
                } else {
                    self.reduce = ReduceStage::Tsne {
                        perplexity: 30.0,
                        output_dims: 2,
                        iterations: iters,
                    };
                }
            }
            "target_dim" => {
                self.reduce = ReduceStage::RandomProjection { target_dim: parse(key, value)? }
            }
            "spectral_r" => {
                let r: usize = parse(key, value)?;
                if let ReduceStage::Spectral { r: slot, .. } = &mut self.reduce {
                    *slot = r;
                } else {
                    self.reduce = ReduceStage::Spectral { r, gamma: None };
                }
            }
            "spectral_gamma" => {
                let g: f64 = parse(key, value)?;
                if let ReduceStage::Spectral { gamma, .. } = &mut self.reduce {
                    *gamma = Some(g);
                } else {
                    self.reduce = ReduceStage::Spectral { r: 2, gamma: Some(g) };
                }
            }
            "sample" => {
                self.sample = match value {
                    "none" => SampleStage::None,
                    "mmrs" => match self.sample {
                        SampleStage::Mmrs { .. } => self.sample,
                        SampleStage::None => SampleStage::Mmrs { k_prime: 15, n: 4000 },
                    },
                    other => {
                        return Err(Error::Config(format!("unknown sample stage {other:?}")))
                    }
                }
            }
            "kprime" => {
                let k: usize = parse(key, value)?;
                self.sample = match self.sample {
                    SampleStage::Mmrs { n, .. } => SampleStage::Mmrs { k_prime: k, n },
                    SampleStage::None => SampleStage::Mmrs { k_prime: k, n: 4000 },
                }
            }
            "sample_n" => {
                let n: usize = parse(key, value)?;
                self.sample = match self.sample {
                    SampleStage::Mmrs { k_prime, .. } => SampleStage::Mmrs { k_prime, n },
                    SampleStage::None => SampleStage::Mmrs { k_prime: 15, n },
                }
            }
            "order" => {
                self.order = match value {
                    "reduce_first" => StageOrder::ReduceFirst,
                    "sample_first" => StageOrder::SampleFirst,
                    other => return Err(Error::Config(format!("unknown order {other:?}"))),
                }
            }
            "kernel" => {
                self.kernel_gamma = match value {
                    "none" => None,
                    "rbf" => Some(self.kernel_gamma.unwrap_or(0.05)),
                    other => {
                        return Err(Error::Config(format!("unknown kernel {other:?}")))
                    }
                }
            }
            "kernel_gamma" => self.kernel_gamma = Some(parse(key, value)?),
            "transform" => {
                self.transform = match value {
                    "vat" => TransformKind::Vat,
                    "ivat" => TransformKind::Ivat,
                    other => {
                        return Err(Error::Config(format!("unknown transform {other:?}")))
                    }
                }
            }
            "kp" => {
                self.kp = if value == "auto" {
                    match self.kp {
                        KpChoice::Auto { .. } => self.kp,
                        KpChoice::Fixed(_) => KpChoice::Auto { k_max: 15 },
                    }
                } else {
                    KpChoice::Fixed(parse(key, value)?)
                }
            }
            "kmax" => self.kp = KpChoice::Auto { k_max: parse(key, value)? },
            "seed" => self.seed = parse(key, value)?,
            "out_image" => self.out_image = Some(PathBuf::from(value)),
            "out_labels" => self.out_labels = Some(PathBuf::from(value)),
            "out_report" => self.out_report = Some(PathBuf::from(value)),
            "image_scale" => self.image_scale = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Parses a flat `key=value` config file body. `#` starts a comment.
    pub fn from_key_values(text: &str) -> Result<PipelineConfig> {
        let mut config = PipelineConfig::default();
        config.apply_key_values(text)?;
        Ok(config)
    }

    /// Applies `key=value` lines on top of the current configuration.
    pub fn apply_key_values(&mut self, text: &str) -> Result<()> {
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                detail: format!("expected key=value, found {line:?}"),
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", idx + 1)))?;
        }
        Ok(())
    }
}

/// Everything a run reports. Timings are wall-clock and excluded from
/// determinism guarantees.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub k_p: usize,
    pub pa: Option<f64>,
    pub nmi: Option<f64>,
    pub seed: u64,
    /// `(stage name, elapsed milliseconds)` in execution order.
    pub stage_ms: Vec<(String, u128)>,
    /// Cluster sizes in VAT order (cumulative sums give block boundaries).
    pub cluster_sizes: Vec<usize>,
    /// Number of objects that reached the VAT stage.
    pub n_analyzed: usize,
}

impl PipelineReport {
    /// One `key=value` per line: `kp`, `pa`/`nmi` (when labels were given),
    /// `seed`, then `stage_ms_<name>` in execution order.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kp={}", self.k_p);
        if let Some(pa) = self.pa {
            let _ = writeln!(out, "pa={pa}");
        }
        if let Some(nmi) = self.nmi {
            let _ = writeln!(out, "nmi={nmi}");
        }
        let _ = writeln!(out, "seed={}", self.seed);
        for (stage, ms) in &self.stage_ms {
            let _ = writeln!(out, "stage_ms_{stage}={ms}");
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_key_values()).map_err(|e| Error::io(path, e))
    }
}

struct StageClock {
    timings: Vec<(String, u128)>,
}

impl StageClock {
    fn new() -> Self {
        StageClock { timings: Vec::new() }
    }

    fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let result = f().map_err(|e| e.in_stage(stage));
        self.timings.push((stage.to_string(), start.elapsed().as_millis()));
        result
    }
}

fn reduce_embeddings(
    x: EmbeddingSet,
    stage: &ReduceStage,
    metric: Metric,
    seed: u64,
) -> Result<EmbeddingSet> {
    match stage {
        ReduceStage::None => Ok(x),
        ReduceStage::Tsne { perplexity, output_dims, iterations } => {
            let config = TsneConfig {
                perplexity: *perplexity,
                output_dims: *output_dims,
                iterations: *iterations,
                seed,
                ..TsneConfig::default()
            };
            let labels = x.labels().map(<[usize]>::to_vec);
            let mut reduced = tsne(&x, &config)?;
            if let Some(l) = labels {
                reduced = reduced.with_labels(l)?;
            }
            Ok(reduced)
        }
        ReduceStage::RandomProjection { target_dim } => {
            let labels = x.labels().map(<[usize]>::to_vec);
            let mut reduced = random_project(&x, *target_dim, seed)?;
            if let Some(l) = labels {
                reduced = reduced.with_labels(l)?;
            }
            Ok(reduced)
        }
        ReduceStage::Spectral { r, gamma } => {
            let d = pairwise_dissimilarity(&x, metric)?;
            let config = SpectralConfig { r: *r, affinity_gamma: *gamma };
            let labels = x.labels().map(<[usize]>::to_vec);
            let mut reduced = spectral_embed(&d, &config)?;
            if let Some(l) = labels {
                reduced = reduced.with_labels(l)?;
            }
            Ok(reduced)
        }
    }
}

/// Runs the full pipeline described by `config`, writing whichever outputs
/// are configured and returning the report. Deterministic for a fixed
/// config (timing values aside).
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineReport> {
    let mut clock = StageClock::new();

    // Load.
    let mut x = clock.time("load", || {
        let mut set = data::load_embeddings(&config.input, config.format)?;
        if let Some(label_path) = &config.labels {
            let labels = data::load_labels(label_path)?;
            set = set.with_labels(labels)?;
        }
        Ok(set)
    })?;

    let reduce_seed = stage_seed(config.seed, Stage::Reduce);
    let sample_seed = stage_seed(config.seed, Stage::Sample);

    let do_reduce = |x: EmbeddingSet, clock: &mut StageClock| match &config.reduce {
        ReduceStage::None => Ok(x),
        stage => clock.time("reduce", || reduce_embeddings(x, stage, config.metric, reduce_seed)),
    };
    let do_sample = |x: EmbeddingSet, clock: &mut StageClock| match config.sample {
        SampleStage::None => Ok(x),
        SampleStage::Mmrs { k_prime, n } => clock.time("sample", || {
            let result = mmrs_sample(&x, config.metric, k_prime, n, sample_seed)?;
            x.subset(&result.sample)
        }),
    };

    x = match config.order {
        StageOrder::ReduceFirst => {
            let reduced = do_reduce(x, &mut clock)?;
            do_sample(reduced, &mut clock)?
        }
        StageOrder::SampleFirst => {
            let sampled = do_sample(x, &mut clock)?;
            do_reduce(sampled, &mut clock)?
        }
    };

    // Dissimilarity and optional kernel sharpening.
    let mut d = clock.time("dissim", || pairwise_dissimilarity(&x, config.metric))?;
    if let Some(gamma) = config.kernel_gamma {
        d = clock.time("kernel", || rbf_kernel_transform(&d, gamma))?;
    }

    // Seriation and transform.
    let ordering = clock.time("vat", || Ok(vat_reorder(&d)))?;
    let reordered = match config.transform {
        TransformKind::Vat => reorder_matrix(&d, &ordering).map_err(|e| e.in_stage("vat"))?,
        TransformKind::Ivat => clock.time("ivat", || ivat_transform(&d, &ordering))?,
    };

    // Cluster-count estimate and partition.
    let n = x.n_objects();
    let k_p = clock.time("estimate", || match config.kp {
        KpChoice::Auto { k_max } => {
            if n < 2 {
                Ok(1)
            } else {
                estimate_k(&ordering, k_max.clamp(2, n))
            }
        }
        KpChoice::Fixed(k) => Ok(k),
    })?;
    let estimate = clock.time("cluster", || mst_cut_partition(&ordering, k_p))?;

    // Score against ground truth when available.
    let (pa, nmi) = if let Some(truth) = x.labels() {
        clock.time("evaluate", || {
            Ok((
                Some(evaluate::partition_accuracy(&estimate.labels, truth)?),
                Some(evaluate::nmi(&estimate.labels, truth)?),
            ))
        })?
    } else {
        (None, None)
    };

    // Outputs.
    if let Some(path) = &config.out_image {
        clock.time("render", || render_rdi(&reordered, path, config.image_scale))?;
    }
    if let Some(path) = &config.out_labels {
        data::write_labels(path, &estimate.labels)?;
    }

    let cluster_sizes = cluster_sizes_in_vat_order(&ordering, &estimate);
    let report = PipelineReport {
        k_p,
        pa,
        nmi,
        seed: config.seed,
        stage_ms: clock.timings,
        cluster_sizes,
        n_analyzed: n,
    };
    if let Some(path) = &config.out_report {
        report.save(path)?;
    }
    Ok(report)
}

fn cluster_sizes_in_vat_order(
    ordering: &vat::VatOrdering,
    estimate: &vat::ClusterEstimate,
) -> Vec<usize> {
    let mut sizes = vec![0usize; estimate.k_p];
    for &obj in ordering.order() {
        sizes[estimate.labels[obj]] += 1;
    }
    sizes
}
