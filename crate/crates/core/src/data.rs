//! Embedding sets, file formats, and synthetic mixture generation.
//!
//! Two interchange formats are supported:
//!
//! * **CSV** — comma-separated decimal floats, one object per line, UTF-8,
//!   LF or CRLF. A header row is auto-detected: if the first line contains
//!   any token that does not parse as a float it is skipped.
//! * **DVM** — a little-endian binary matrix: the 8-byte magic `DVMATRIX`,
//!   two `u64` fields (rows, columns), then row-major `f64` values.
//!   Bit-exact by construction; extension `.dvm`.
//!
//! Label files hold one integer per line; labels are remapped on load to
//! contiguous ids `0..k-1` in order of first appearance.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

pub const DVM_MAGIC: &[u8; 8] = b"DVMATRIX";

/// N objects described by p-dimensional feature vectors, with optional
/// ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    n: usize,
    dims: usize,
    data: Vec<f64>,
    labels: Option<Vec<usize>>,
}

impl EmbeddingSet {
    /// Wraps a row-major buffer. All entries must be finite.
    pub fn new(n: usize, dims: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || dims == 0 {
            return Err(Error::EmptyInput);
        }
        if data.len() != n * dims {
            return Err(Error::SizeMismatch { expected: n * dims, actual: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite value at row {}, column {}",
                pos / dims + 1,
                pos % dims + 1
            )));
        }
        Ok(EmbeddingSet { n, dims, data, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, actual: labels.len() });
        }
        self.labels = Some(relabel_contiguous(&labels));
        Ok(self)
    }

    pub fn n_objects(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dims..(i + 1) * self.dims]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn drop_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    /// Keeps only the rows in `indices`, in the order given. Labels follow.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.dims);
        for &i in indices {
            if i >= self.n {
                return Err(Error::InvalidParameter(format!(
                    "subset index {i} out of range for {} objects",
                    self.n
                )));
            }
            data.extend_from_slice(self.row(i));
        }
        let mut out = EmbeddingSet::new(indices.len(), self.dims, data)?;
        if let Some(labels) = &self.labels {
            out.labels = Some(indices.iter().map(|&i| labels[i]).collect());
        }
        Ok(out)
    }
}

/// Remaps arbitrary label ids to contiguous `0..k-1`, first appearance first.
pub fn relabel_contiguous(labels: &[usize]) -> Vec<usize> {
    let mut map: Vec<(usize, usize)> = Vec::new();
    labels
        .iter()
        .map(|&raw| {
            if let Some(&(_, id)) = map.iter().find(|&&(r, _)| r == raw) {
                id
            } else {
                let id = map.len();
                map.push((raw, id));
                id
            }
        })
        .collect()
}

/// Supported on-disk matrix encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Csv,
    Dvm,
}

impl FileFormat {
    /// Picks the format from a file extension; defaults to CSV.
    pub fn from_path(path: &Path) -> FileFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("dvm") => FileFormat::Dvm,
            _ => FileFormat::Csv,
        }
    }
}

impl std::str::FromStr for FileFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(FileFormat::Csv),
            "dvm" => Ok(FileFormat::Dvm),
            other => Err(Error::Config(format!("unknown format {other:?} (expected csv or dvm)"))),
        }
    }
}

/// Loads an embedding matrix from `path` in the given format.
pub fn load_embeddings(path: &Path, format: FileFormat) -> Result<EmbeddingSet> {
    let (n, dims, data) = match format {
        FileFormat::Csv => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_csv(&text)?
        }
        FileFormat::Dvm => {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            parse_dvm(&bytes)?
        }
    };
    EmbeddingSet::new(n, dims, data)
}

/// Parses CSV text into (rows, cols, row-major values).
pub fn parse_csv(text: &str) -> Result<(usize, usize, Vec<f64>)> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    let mut header_checked = false;
    for (line_idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split(',').map(str::trim).collect();
        if !header_checked {
            header_checked = true;
            // Header auto-detection: any token on the first non-blank line
            // that is not a float makes the whole line a header.
            if tokens.iter().any(|t| t.parse::<f64>().is_err()) {
                continue;
            }
        }
        let mut row = Vec::with_capacity(tokens.len());
        for (col, token) in tokens.iter().enumerate() {
            let value: f64 = token.parse().map_err(|_| Error::Parse {
                line: line_idx + 1,
                detail: format!("column {}: non-numeric token {token:?}", col + 1),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: line_idx + 1,
                    detail: format!("column {}: non-finite value {token:?}", col + 1),
                });
            }
            row.push(value);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if row.len() != w => {
                return Err(Error::Parse {
                    line: line_idx + 1,
                    detail: format!("ragged row: expected {w} columns, found {}", row.len()),
                });
            }
            Some(_) => {}
        }
        rows.push(row);
    }
    let width = width.ok_or(Error::EmptyInput)?;
    let n = rows.len();
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    Ok((n, width, data))
}

fn parse_dvm(bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    if bytes.len() < 24 {
        return Err(Error::Parse { line: 1, detail: "truncated DVM header".into() });
    }
    if &bytes[0..8] != DVM_MAGIC {
        return Err(Error::Parse { line: 1, detail: "bad magic: not a DVM file".into() });
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    let expected = 24 + rows.checked_mul(cols).and_then(|c| c.checked_mul(8)).ok_or_else(|| {
        Error::Parse { line: 1, detail: "DVM dimensions overflow".into() }
    })?;
    if bytes.len() != expected {
        return Err(Error::Parse {
            line: 1,
            detail: format!("DVM payload is {} bytes, expected {}", bytes.len(), expected),
        });
    }
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyInput);
    }
    let mut data = Vec::with_capacity(rows * cols);
    for chunk in bytes[24..].chunks_exact(8) {
        let value = f64::from_le_bytes(chunk.try_into().unwrap());
        if !value.is_finite() {
            let pos = data.len();
            return Err(Error::Parse {
                line: pos / cols + 1,
                detail: format!("column {}: non-finite value in DVM payload", pos % cols + 1),
            });
        }
        data.push(value);
    }
    Ok((rows, cols, data))
}

/// Writes a raw matrix in the binary DVM format.
pub fn write_dvm(path: &Path, rows: usize, cols: usize, values: &[f64]) -> Result<()> {
    assert_eq!(values.len(), rows * cols);
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut emit = |buf: &[u8]| w.write_all(buf).map_err(|e| Error::io(path, e));
    emit(DVM_MAGIC)?;
    emit(&(rows as u64).to_le_bytes())?;
    emit(&(cols as u64).to_le_bytes())?;
    for v in values {
        emit(&v.to_le_bytes())?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a raw matrix in the binary DVM format.
pub fn read_dvm(path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_dvm(&bytes)
}

/// Writes an embedding matrix as CSV. Rust's shortest round-trip float
/// formatting makes the text re-load bit-exact.
pub fn write_csv(path: &Path, set: &EmbeddingSet) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for i in 0..set.n_objects() {
        let line = set.row(i).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Saves an embedding matrix in the given format.
pub fn save_embeddings(path: &Path, set: &EmbeddingSet, format: FileFormat) -> Result<()> {
    match format {
        FileFormat::Csv => write_csv(path, set),
        FileFormat::Dvm => write_dvm(path, set.n_objects(), set.dims(), set.values()),
    }
}

/// Loads a label file (one integer per line) and remaps the values to
/// contiguous ids starting at 0, preserving the equality structure.
pub fn load_labels(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut raw = Vec::new();
    for (line_idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        let value: i64 = line.parse().map_err(|_| Error::Parse {
            line: line_idx + 1,
            detail: format!("non-integer label {line:?}"),
        })?;
        if value < 0 {
            return Err(Error::Parse {
                line: line_idx + 1,
                detail: format!("negative label {value}"),
            });
        }
        raw.push(value as usize);
    }
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(relabel_contiguous(&raw))
}

/// Writes labels as one integer per line.
pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for l in labels {
        writeln!(w, "{l}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Parameters for a compact-and-separated Gaussian mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureSpec {
    /// Number of components.
    pub k: usize,
    /// Ambient dimension.
    pub dims: usize,
    /// Objects drawn per component.
    pub n_per: usize,
    /// Center spacing as a multiple of the (unit) component standard
    /// deviation.
    pub separation: f64,
    pub seed: u64,
}

impl MixtureSpec {
    fn validate(&self) -> Result<()> {
        if self.k < 1 || self.dims < 1 || self.n_per < 1 {
            return Err(Error::InvalidParameter(
                "mixture requires k >= 1, dims >= 1, n_per >= 1".into(),
            ));
        }
        if !self.separation.is_finite() || self.separation <= 0.0 {
            return Err(Error::InvalidParameter("mixture separation must be > 0".into()));
        }
        Ok(())
    }

    /// Center of component `c`: `separation * (1 + floor(c / dims))` along
    /// axis `c mod dims`. Centers are pairwise at least `separation` apart.
    pub fn center(&self, c: usize) -> Vec<f64> {
        let mut center = vec![0.0; self.dims];
        center[c % self.dims] = self.separation * (1 + c / self.dims) as f64;
        center
    }
}

/// Draws `k * n_per` objects from unit-variance isotropic Gaussians at the
/// deterministic centers of [`MixtureSpec::center`]. Labels are the
/// component indices. Identical seeds give identical matrices.
pub fn generate_gaussian_mixture(spec: &MixtureSpec) -> Result<EmbeddingSet> {
    spec.validate()?;
    let n = spec.k * spec.n_per;
    let mut rng = SplitMix64::new(spec.seed);
    let mut data = Vec::with_capacity(n * spec.dims);
    let mut labels = Vec::with_capacity(n);
    for c in 0..spec.k {
        let center = spec.center(c);
        for _ in 0..spec.n_per {
            for &coord in &center {
                data.push(coord + rng.next_normal());
            }
            labels.push(c);
        }
    }
    EmbeddingSet::new(n, spec.dims, data)?.with_labels(labels)
}
