//! Grayscale rendering of reordered dissimilarity matrices.
//!
//! Output is a binary portable graymap (P5): the header `P5\n{w} {h}\n255\n`
//! followed by one byte per pixel, row-major. Dark pixels mean low
//! dissimilarity, so clusters show up as dark diagonal blocks.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::vat::ReorderedMatrix;

/// An N x N grid of intensities: 0 = black = low dissimilarity,
/// 255 = white = high.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RdiImage {
    n: usize,
    intensities: Vec<u8>,
}

impl RdiImage {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.intensities[r * self.n + c]
    }

    pub fn intensities(&self) -> &[u8] {
        &self.intensities
    }
}

/// Min-max normalizes a reordered matrix to byte intensities:
/// `round(255 (v - min) / (max - min))`. A constant matrix renders
/// all-black (uniformly minimal dissimilarity).
pub fn rasterize(m: &ReorderedMatrix) -> RdiImage {
    rasterize_values(m.values(), m.n_objects())
}

/// [`rasterize`] for a bare row-major N x N value buffer.
pub fn rasterize_values(values: &[f64], n: usize) -> RdiImage {
    assert_eq!(values.len(), n * n);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let intensities = if hi > lo {
        let scale = 255.0 / (hi - lo);
        values.iter().map(|&v| ((v - lo) * scale).round() as u8).collect()
    } else {
        vec![0u8; n * n]
    };
    RdiImage { n, intensities }
}

/// Renders a reordered matrix to a P5 graymap at `path`, replicating each
/// cell into a `scale_factor` x `scale_factor` pixel block.
pub fn render_rdi(m: &ReorderedMatrix, path: &Path, scale_factor: usize) -> Result<()> {
    if scale_factor < 1 {
        return Err(Error::InvalidParameter("scale_factor must be >= 1".into()));
    }
    write_pgm(&rasterize(m), path, scale_factor)
}

/// Writes an [`RdiImage`] as a P5 graymap with pixel replication.
pub fn write_pgm(img: &RdiImage, path: &Path, scale_factor: usize) -> Result<()> {
    let n = img.n;
    let side = n * scale_factor;
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write!(w, "P5\n{side} {side}\n255\n").map_err(|e| Error::io(path, e))?;
    let mut scanline = Vec::with_capacity(side);
    for r in 0..n {
        scanline.clear();
        for c in 0..n {
            let v = img.get(r, c);
            scanline.extend(std::iter::repeat_n(v, scale_factor));
        }
        for _ in 0..scale_factor {
            w.write_all(&scanline).map_err(|e| Error::io(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Parses a binary P5 graymap: returns `(width, height, pixels)`.
pub fn read_pgm(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut pos = 0usize;
    let mut token = |bytes: &[u8]| -> Result<String> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse { line: 1, detail: "truncated PGM header".into() });
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token(&bytes)? != "P5" {
        return Err(Error::Parse { line: 1, detail: "not a P5 graymap".into() });
    }
    let parse_dim = |s: String| -> Result<usize> {
        s.parse().map_err(|_| Error::Parse { line: 1, detail: format!("bad PGM field {s:?}") })
    };
    let width = parse_dim(token(&bytes)?)?;
    let height = parse_dim(token(&bytes)?)?;
    let maxval = parse_dim(token(&bytes)?)?;
    if maxval != 255 {
        return Err(Error::Parse { line: 1, detail: format!("unsupported maxval {maxval}") });
    }
    pos += 1; // single whitespace byte after maxval
    if bytes.len() - pos != width * height {
        return Err(Error::Parse {
            line: 1,
            detail: format!("raster is {} bytes, expected {}", bytes.len() - pos, width * height),
        });
    }
    Ok((width, height, bytes[pos..].to_vec()))
}
