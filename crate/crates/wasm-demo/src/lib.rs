//! wasm-bindgen exports for the browser demo. The page in `www/` calls
//! three operations: [`mixture_rdi`], [`csv_rdi`], and [`mixture_scatter`].
//!
//! Build with `wasm-pack build --target web --out-dir www/pkg`, then serve
//! `www/` statically.

mod app;

use wasm_bindgen::prelude::*;

/// A rendered RDI plus the cluster estimate derived from it.
#[wasm_bindgen]
pub struct RdiFrame {
    inner: app::RdiData,
}

#[wasm_bindgen]
impl RdiFrame {
    /// Side length of the square image in cells.
    #[wasm_bindgen(getter)]
    pub fn size(&self) -> usize {
        self.inner.size
    }

    /// Row-major grayscale bytes (`size * size`).
    pub fn pixels(&self) -> Vec<u8> {
        self.inner.pixels.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn kp(&self) -> usize {
        self.inner.k_p
    }

    /// Partition accuracy in percent, or NaN when no labels were given.
    #[wasm_bindgen(getter)]
    pub fn pa(&self) -> f64 {
        self.inner.pa.unwrap_or(f64::NAN)
    }

    /// NMI in [0, 1], or NaN when no labels were given.
    #[wasm_bindgen(getter)]
    pub fn nmi(&self) -> f64 {
        self.inner.nmi.unwrap_or(f64::NAN)
    }

    /// Cumulative cluster boundaries along the diagonal, for cut lines.
    pub fn boundaries(&self) -> Vec<u32> {
        self.inner.boundaries.clone()
    }
}

/// 2-D scatter of an embedded mixture with its true component labels.
#[wasm_bindgen]
pub struct ScatterFrame {
    inner: app::ScatterData,
}

#[wasm_bindgen]
impl ScatterFrame {
    pub fn xs(&self) -> Vec<f64> {
        self.inner.xs.clone()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.inner.ys.clone()
    }

    pub fn labels(&self) -> Vec<u32> {
        self.inner.labels.clone()
    }
}

fn err_to_js(e: vat_core::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Generates a seeded Gaussian mixture, runs VAT or iVAT (optionally RBF
/// kernel sharpened with `kernel_gamma > 0`), and returns the RDI with the
/// estimated cluster count and scores.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn mixture_rdi(
    k: usize,
    dims: usize,
    n_per: usize,
    separation: f64,
    seed: u32,
    use_ivat: bool,
    kernel_gamma: f64,
    k_max: usize,
) -> Result<RdiFrame, JsValue> {
    app::mixture_rdi(k, dims, n_per, separation, seed as u64, use_ivat, kernel_gamma, k_max)
        .map(|inner| RdiFrame { inner })
        .map_err(err_to_js)
}

/// Runs the same assessment on pasted CSV (one object per line), with an
/// optional label column pasted separately (one integer per line).
#[wasm_bindgen]
pub fn csv_rdi(
    csv: &str,
    labels: &str,
    metric: &str,
    use_ivat: bool,
    kernel_gamma: f64,
    k_max: usize,
) -> Result<RdiFrame, JsValue> {
    app::csv_rdi(csv, labels, metric, use_ivat, kernel_gamma, k_max)
        .map(|inner| RdiFrame { inner })
        .map_err(err_to_js)
}

/// Embeds a seeded mixture to 2-D with exact t-SNE and returns the scatter
/// coordinates plus true component labels for coloring.
#[wasm_bindgen]
pub fn mixture_scatter(
    k: usize,
    dims: usize,
    n_per: usize,
    separation: f64,
    seed: u32,
    perplexity: f64,
    iterations: usize,
) -> Result<ScatterFrame, JsValue> {
    app::mixture_scatter(k, dims, n_per, separation, seed as u64, perplexity, iterations)
        .map(|inner| ScatterFrame { inner })
        .map_err(err_to_js)
}
