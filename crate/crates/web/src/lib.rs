//! WebAssembly bindings for the interactive demo page.
//!
//! Every export takes a graph spec such as `complete:8` or
//! `erdos_renyi:120:0.04:1` and returns a JSON string, or throws a string
//! error that the page shows as is.

use gtnet_core::analysis::{convergence_trace, smoothing_curves, spectral_check, MAX_DENSE_NODES};
use gtnet_core::graph::{normalize, synthesize, NormalizedAdjacency, Scheme, SynthKind};
use gtnet_core::tensor::Tensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Larger graphs make the dense eigensolver too slow for a page.
pub const MAX_NODES: usize = 400;
pub const MAX_DEPTH: usize = 500;
const FEATURE_DIM: usize = 4;

fn graph(spec: &str) -> Result<NormalizedAdjacency<f64>, String> {
    let kind: SynthKind = spec.trim().parse().map_err(|e: gtnet_core::Error| e.to_string())?;
    if kind.num_nodes() > MAX_NODES.min(MAX_DENSE_NODES) {
        return Err(format!("at most {MAX_NODES} nodes in the demo"));
    }
    let g = synthesize(&kind).map_err(|e| e.to_string())?;
    Ok(normalize(&g, Scheme::Symmetric))
}

fn depths(max_depth: usize) -> Result<Vec<usize>, String> {
    if max_depth == 0 || max_depth > MAX_DEPTH {
        return Err(format!("depth must be between 1 and {MAX_DEPTH}"));
    }
    Ok((1..=max_depth).collect())
}

fn gaussian(n: usize, seed: u64) -> Tensor<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Tensor::from_fn(n, FEATURE_DIM, |_, _| rng.sample(StandardNormal))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Convergence {
    depths: Vec<usize>,
    distances: Vec<f64>,
    fitted_rate: Option<f64>,
    spectral_radius: f64,
}

pub fn convergence_json(spec: &str, max_depth: usize, seed: u64) -> Result<String, String> {
    let norm = graph(spec)?;
    let z = gaussian(norm.num_nodes(), seed);
    let t = convergence_trace(&norm, &z, &depths(max_depth)?).map_err(|e| e.to_string())?;
    let s = spectral_check(&norm).map_err(|e| e.to_string())?;
    to_json(&Convergence {
        depths: t.depths,
        distances: t.distances,
        fitted_rate: t.fitted_rate,
        spectral_radius: s.spectral_radius,
    })
}

pub fn smoothing_json(spec: &str, max_depth: usize, seed: u64) -> Result<String, String> {
    let norm = graph(spec)?;
    let z = gaussian(norm.num_nodes(), seed);
    let c = smoothing_curves(&norm, &z, &depths(max_depth)?).map_err(|e| e.to_string())?;
    to_json(&c)
}

#[derive(Serialize)]
struct Spectrum {
    num_nodes: usize,
    a1_eigenvalues: Vec<f64>,
    spectral_radius: f64,
    bounds_hold: bool,
}

pub fn spectrum_json(spec: &str) -> Result<String, String> {
    let s = spectral_check(&graph(spec)?).map_err(|e| e.to_string())?;
    to_json(&Spectrum {
        num_nodes: s.num_nodes,
        bounds_hold: s.bounds_hold(),
        spectral_radius: s.spectral_radius,
        a1_eigenvalues: s.a1_eigenvalues,
    })
}

/// Distance to the closed-form limit at depths `1..=max_depth`.
#[wasm_bindgen]
pub fn convergence(spec: &str, max_depth: usize, seed: u32) -> Result<String, JsValue> {
    convergence_json(spec, max_depth, seed.into()).map_err(JsValue::from)
}

/// Largest and smallest pairwise row distances for GCN and tree propagation.
#[wasm_bindgen]
pub fn smoothing(spec: &str, max_depth: usize, seed: u32) -> Result<String, JsValue> {
    smoothing_json(spec, max_depth, seed.into()).map_err(JsValue::from)
}

/// Eigenvalues of the propagation matrix.
#[wasm_bindgen]
pub fn spectrum(spec: &str) -> Result<String, JsValue> {
    spectrum_json(spec).map_err(JsValue::from)
}
