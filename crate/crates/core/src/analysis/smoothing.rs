use serde::{Deserialize, Serialize};

use super::limit::propagate;
use crate::error::{Error, Result};
use crate::graph::{normalize, synthesize, NormalizedAdjacency, Scheme, SynthKind};
use crate::tensor::kernels::spmm;
use crate::tensor::Tensor;

fn row_distance(h: &Tensor<f64>, a: usize, b: usize) -> f64 {
    h.row(a)
        .iter()
        .zip(h.row(b))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn pairwise(h: &Tensor<f64>) -> impl Iterator<Item = f64> + '_ {
    let n = h.rows();
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| row_distance(h, a, b)))
}

/// Largest L∞ distance between two rows (0 for fewer than two rows).
pub fn max_pairwise_distance(h: &Tensor<f64>) -> f64 {
    pairwise(h).fold(0.0, f64::max)
}

/// Smallest L∞ distance between two distinct rows (∞ for fewer than two rows).
pub fn min_pairwise_distance(h: &Tensor<f64>) -> f64 {
    pairwise(h).fold(f64::INFINITY, f64::min)
}

/// Row spread after `L` plain `Â` layers and after `L` tree steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingCurves {
    pub depths: Vec<usize>,
    pub gcn_max_distance: Vec<f64>,
    pub gcn_min_distance: Vec<f64>,
    pub gtcn_max_distance: Vec<f64>,
    pub gtcn_min_distance: Vec<f64>,
}

pub fn smoothing_curves(norm: &NormalizedAdjacency<f64>, z: &Tensor<f64>, depths: &[usize]) -> Result<SmoothingCurves> {
    if z.rows() != norm.num_nodes() {
        return Err(Error::shape(
            "smoothing_curves",
            format!("Z has {} rows, graph has {} nodes", z.rows(), norm.num_nodes()),
        ));
    }
    if depths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Param("depths must be strictly increasing".into()));
    }
    let mut out = SmoothingCurves {
        depths: depths.to_vec(),
        gcn_max_distance: Vec::new(),
        gcn_min_distance: Vec::new(),
        gtcn_max_distance: Vec::new(),
        gtcn_min_distance: Vec::new(),
    };
    let mut gcn = z.clone();
    let mut done = 0;
    for &d in depths {
        while done < d {
            gcn = spmm(&norm.a_hat, &gcn)?;
            done += 1;
        }
        let tree = propagate(norm, z, d)?;
        out.gcn_max_distance.push(max_pairwise_distance(&gcn));
        out.gcn_min_distance.push(min_pairwise_distance(&gcn));
        out.gtcn_max_distance.push(max_pairwise_distance(&tree));
        out.gtcn_min_distance.push(min_pairwise_distance(&tree));
    }
    Ok(out)
}

/// Complete-graph comparison at a single depth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub num_nodes: usize,
    pub depth: usize,
    /// Input row separation, for reference.
    pub input_min_distance: f64,
    pub gcn_max_distance: f64,
    pub gtcn_min_distance: f64,
}

impl SmoothingReport {
    pub fn gcn_collapsed(&self, tol: f64) -> bool {
        self.gcn_max_distance < tol
    }

    pub fn gtcn_distinct(&self, tol: f64) -> bool {
        self.gtcn_min_distance > tol
    }
}

/// Propagates `z` over the complete graph on `n` nodes with both rules.
pub fn smoothing_probe(n: usize, z: &Tensor<f64>, depth: usize) -> Result<SmoothingReport> {
    if n < 2 {
        return Err(Error::Param(format!("smoothing probe needs at least 2 nodes, got {n}")));
    }
    if z.rows() != n {
        return Err(Error::shape("smoothing_probe", format!("Z has {} rows, expected {n}", z.rows())));
    }
    let input_min_distance = min_pairwise_distance(z);
    if input_min_distance == 0.0 {
        return Err(Error::Param("Z has duplicate rows; distinctness cannot be tested".into()));
    }
    let norm = normalize(&synthesize(&SynthKind::Complete { n })?, Scheme::Symmetric);
    let c = smoothing_curves(&norm, z, &[depth])?;
    Ok(SmoothingReport {
        num_nodes: n,
        depth,
        input_min_distance,
        gcn_max_distance: c.gcn_max_distance[0],
        gtcn_min_distance: c.gtcn_min_distance[0],
    })
}
