use nalgebra::DMatrix;
use serde::Serialize;

use super::spectral::dense;
use crate::error::{Error, Result};
use crate::graph::NormalizedAdjacency;
use crate::tensor::kernels::spmm;
use crate::tensor::Tensor;

/// Largest graph handled with dense factorizations.
pub const MAX_DENSE_NODES: usize = 2000;

/// Reciprocal condition estimates below this are treated as singular.
const MIN_RCOND: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct LimitSolution {
    pub h: Tensor<f64>,
    /// `‖(I − A₁)H − A₂Z‖∞`, evaluated with the sparse kernels.
    pub residual: f64,
    /// `min|uᵢᵢ| / max|uᵢᵢ|` of the LU factor; a cheap lower-quality estimate.
    pub rcond_estimate: f64,
}

fn a2z(norm: &NormalizedAdjacency<f64>, z: &Tensor<f64>) -> Tensor<f64> {
    Tensor::from_fn(z.rows(), z.cols(), |r, c| norm.a2_diag[r] * z.get(r, c))
}

fn check_rows(norm: &NormalizedAdjacency<f64>, z: &Tensor<f64>) -> Result<()> {
    if z.rows() != norm.num_nodes() {
        return Err(Error::shape(
            "propagation",
            format!("Z has {} rows, graph has {} nodes", z.rows(), norm.num_nodes()),
        ));
    }
    Ok(())
}

/// Solves `(I − A₁)H = A₂Z` by dense LU.
pub fn closed_form_limit(norm: &NormalizedAdjacency<f64>, z: &Tensor<f64>) -> Result<LimitSolution> {
    check_rows(norm, z)?;
    let n = norm.num_nodes();
    if n > MAX_DENSE_NODES {
        return Err(Error::Param(format!(
            "closed-form limit needs a dense solve; {n} nodes exceeds {MAX_DENSE_NODES}"
        )));
    }
    let m = DMatrix::identity(n, n) - dense(&norm.a1);
    let lu = m.lu();
    let diag: Vec<f64> = lu.u().diagonal().iter().map(|d| d.abs()).collect();
    let (lo, hi) = diag
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    let rcond = if n == 0 { 1.0 } else { lo / hi };
    if !(rcond > MIN_RCOND) {
        return Err(Error::Numeric(format!("I − A₁ is singular or ill-conditioned (rcond ≈ {rcond:.3e})")));
    }
    let rhs = a2z(norm, z);
    let b = DMatrix::from_row_slice(n, z.cols(), rhs.data());
    let x = lu
        .solve(&b)
        .ok_or_else(|| Error::Numeric("LU solve failed".into()))?;
    let h = Tensor::from_fn(n, z.cols(), |r, c| x[(r, c)]);
    let ah = spmm(&norm.a1, &h)?;
    let residual = (0..n)
        .flat_map(|r| (0..z.cols()).map(move |c| (r, c)))
        .map(|(r, c)| (h.get(r, c) - ah.get(r, c) - rhs.get(r, c)).abs())
        .fold(0.0, f64::max);
    Ok(LimitSolution { h, residual, rcond_estimate: rcond })
}

/// `L` steps of `H ← A₁H + A₂Z` starting from `H = Z`.
pub fn propagate(norm: &NormalizedAdjacency<f64>, z: &Tensor<f64>, depth: usize) -> Result<Tensor<f64>> {
    check_rows(norm, z)?;
    let base = a2z(norm, z);
    let mut h = z.clone();
    for _ in 0..depth {
        h = spmm(&norm.a1, &h)?;
        h.add_assign(&base)?;
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    pub depths: Vec<usize>,
    /// `‖H^(L) − H*‖∞` for each requested depth.
    pub distances: Vec<f64>,
    /// Fitted per-step contraction factor, if enough points stay above the
    /// rounding floor.
    pub fitted_rate: Option<f64>,
    /// Distances never grow across the second half of the trace beyond the
    /// rounding floor.
    pub monotone_tail: bool,
    pub limit_residual: f64,
    /// Closed-form limit `H*`; left out of the JSON form.
    #[serde(skip)]
    pub limit: Tensor<f64>,
    /// `max(1, ‖H*‖∞)`; distances are compared against tolerances scaled by it.
    pub scale: f64,
}

impl ConvergenceTrace {
    pub fn final_distance(&self) -> f64 {
        self.distances.last().copied().unwrap_or(0.0)
    }

    pub fn converged(&self, tol: f64) -> bool {
        self.final_distance() < tol * self.scale
    }
}

/// Distances from finite-depth propagation to the closed-form limit.
pub fn convergence_trace(norm: &NormalizedAdjacency<f64>, z: &Tensor<f64>, depths: &[usize]) -> Result<ConvergenceTrace> {
    if depths.is_empty() {
        return Err(Error::Param("convergence trace needs at least one depth".into()));
    }
    if depths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Param("depths must be strictly increasing".into()));
    }
    let limit = closed_form_limit(norm, z)?;
    let scale = limit.h.max_abs().max(1.0);
    let base = a2z(norm, z);
    let mut h = z.clone();
    let mut step = 0;
    let mut distances = Vec::with_capacity(depths.len());
    for &d in depths {
        while step < d {
            h = spmm(&norm.a1, &h)?;
            h.add_assign(&base)?;
            step += 1;
        }
        distances.push(h.max_abs_diff(&limit.h));
    }
    let floor = 1e-11 * scale;
    let tail = &distances[distances.len() / 2..];
    let monotone_tail = tail.windows(2).all(|w| w[1] <= w[0] + floor);
    Ok(ConvergenceTrace {
        fitted_rate: fit_rate(depths, &distances, floor),
        depths: depths.to_vec(),
        distances,
        monotone_tail,
        limit_residual: limit.residual,
        limit: limit.h,
        scale,
    })
}

/// Least-squares slope of `ln d` against depth over the later half of the
/// points still above `floor`.
fn fit_rate(depths: &[usize], distances: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = depths
        .iter()
        .zip(distances)
        .filter(|(_, &d)| d > floor)
        .map(|(&l, &d)| (l as f64, d.ln()))
        .collect();
    let pts = &pts[pts.len() / 2..];
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| (sxy / sxx).exp())
}
