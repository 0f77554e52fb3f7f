use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::limit::MAX_DENSE_NODES;
use crate::error::{Error, Result};
use crate::graph::NormalizedAdjacency;
use crate::tensor::{SparseMatrix, Tensor};

/// Eigenvalues of `A₁` and of `I − A₁`, ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub num_nodes: usize,
    /// `"dense"` or `"power_iteration"` (extremes only, estimates).
    pub method: String,
    pub a1_eigenvalues: Vec<f64>,
    pub i_minus_a1_eigenvalues: Vec<f64>,
    pub a1_min: f64,
    pub a1_max: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub spectral_radius: f64,
    /// Largest `|aᵢ|` strictly below the spectral radius (0 if none).
    pub second_radius: f64,
    /// `min(1 − a_max, 1 + a_min)`: distance of the spectrum from ±1.
    pub margin: f64,
    /// Eigenvalues of `A₁` outside `(−1, 1)`.
    pub violations: Vec<f64>,
}

impl SpectralReport {
    pub fn bounds_hold(&self) -> bool {
        self.violations.is_empty() && self.lambda_min > 0.0 && self.lambda_max < 2.0
    }

    /// `ρ − ρ₂`, the separation of the dominant magnitude.
    pub fn dominance_gap(&self) -> f64 {
        self.spectral_radius - self.second_radius
    }
}

pub(crate) fn dense(s: &SparseMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(s.n_rows(), s.n_cols());
    for r in 0..s.n_rows() {
        let (cols, vals) = s.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            m[(r, c)] = v;
        }
    }
    m
}

/// Dominant eigenvalue of `shift·I + sign·A` by power iteration; all
/// eigenvalues of that operator are positive here, so the iteration
/// converges to the largest one.
fn power_extreme(a: &SparseMatrix<f64>, shift: f64, sign: f64) -> f64 {
    let n = a.n_rows();
    let mut x = DVector::from_fn(n, |i, _| 1.0 + (i % 7) as f64 * 0.1);
    x /= x.norm();
    let mut estimate = 0.0;
    for _ in 0..5000 {
        let mut y = DVector::zeros(n);
        for r in 0..n {
            let (cols, vals) = a.row(r);
            let ax: f64 = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
            y[r] = shift * x[r] + sign * ax;
        }
        let next = x.dot(&y);
        let norm = y.norm();
        if norm == 0.0 {
            return 0.0;
        }
        x = y / norm;
        if (next - estimate).abs() < 1e-13 {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Largest `|aᵢ|` among eigenvectors of `A₁` on which `e` has a
/// non-negligible projection. Iterating `A₁` on `e` contracts at this rate,
/// which is below the spectral radius when the dominant mode is absent
/// (e.g. on regular graphs, where it is the constant direction).
pub fn excited_radius(a1: &SparseMatrix<f64>, e: &Tensor<f64>) -> Result<f64> {
    if !a1.is_symmetric() || e.rows() != a1.n_rows() {
        return Err(Error::Param("excited_radius needs a symmetric A₁ and a matching error matrix".into()));
    }
    let eig = SymmetricEigen::new(dense(a1));
    let em = DMatrix::from_row_slice(e.rows(), e.cols(), e.data());
    let proj = eig.eigenvectors.transpose() * em;
    let weights: Vec<f64> = (0..proj.nrows()).map(|i| proj.row(i).norm()).collect();
    let total = weights.iter().copied().fold(0.0, f64::max);
    Ok(weights
        .iter()
        .zip(eig.eigenvalues.iter())
        .filter(|(&w, _)| w > 1e-9 * total)
        .map(|(_, a)| a.abs())
        .fold(0.0, f64::max))
}

pub fn spectral_check(norm: &NormalizedAdjacency<f64>) -> Result<SpectralReport> {
    let a1 = &norm.a1;
    if !a1.is_symmetric() {
        return Err(Error::Param(
            "A₁ is not symmetric; spectral checks need an undirected graph and the symmetric scheme".into(),
        ));
    }
    let n = a1.n_rows();
    let (method, eig) = if n <= MAX_DENSE_NODES {
        let mut e: Vec<f64> = SymmetricEigen::new(dense(a1)).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        ("dense", e)
    } else {
        // Eigenvalues of I ± A₁ lie in (0, 2), so both iterations are positive definite.
        let top = power_extreme(a1, 1.0, 1.0) - 1.0;
        let bottom = 1.0 - power_extreme(a1, 1.0, -1.0);
        ("power_iteration", vec![bottom, top])
    };
    let (a1_min, a1_max) = match (eig.first(), eig.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0.0, 0.0),
    };
    let radius = a1_max.abs().max(a1_min.abs());
    let second_radius = eig
        .iter()
        .map(|x| x.abs())
        .filter(|&m| m < radius - 1e-9)
        .fold(0.0, f64::max);
    let mut lambdas: Vec<f64> = eig.iter().map(|a| 1.0 - a).collect();
    lambdas.sort_by(f64::total_cmp);
    Ok(SpectralReport {
        num_nodes: n,
        method: method.to_string(),
        violations: eig.iter().copied().filter(|a| a.abs() >= 1.0).collect(),
        lambda_min: 1.0 - a1_max,
        lambda_max: 1.0 - a1_min,
        margin: (1.0 - a1_max).min(1.0 + a1_min),
        a1_eigenvalues: if method == "dense" { eig } else { Vec::new() },
        i_minus_a1_eigenvalues: if method == "dense" { lambdas } else { Vec::new() },
        a1_min,
        a1_max,
        spectral_radius: radius,
        second_radius: if method == "dense" { second_radius } else { f64::NAN },
    })
}
