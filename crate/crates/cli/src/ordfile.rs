//! Text format for VAT orderings so seriation, estimation, and clustering
//! can run as separate processes.
//!
//! One line per VAT position: `<original index> <parent position>
//! <connect magnitude>`. Magnitudes use Rust's shortest round-trip float
//! formatting, so re-reading reproduces the exact bits.

use std::path::Path;

use anyhow::{bail, Context, Result};
use vat_core::VatOrdering;

pub fn write_ordering(path: &Path, ordering: &VatOrdering) -> Result<()> {
    let mut out = String::new();
    for t in 0..ordering.len() {
        out.push_str(&format!(
            "{} {} {}\n",
            ordering.order()[t],
            ordering.connect_parent()[t],
            ordering.connect_magnitudes()[t]
        ));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_ordering(path: &Path) -> Result<VatOrdering> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut order = Vec::new();
    let mut parents = Vec::new();
    let mut magnitudes = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            bail!("{}:{}: expected 3 fields, found {}", path.display(), idx + 1, fields.len());
        }
        order.push(fields[0].parse().with_context(|| format!("line {}", idx + 1))?);
        parents.push(fields[1].parse().with_context(|| format!("line {}", idx + 1))?);
        magnitudes.push(fields[2].parse().with_context(|| format!("line {}", idx + 1))?);
    }
    Ok(VatOrdering::new(order, magnitudes, parents)?)
}
