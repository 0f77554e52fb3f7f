use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::SparseMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `D̃^{-1/2} Ã D̃^{-1/2}`
    #[default]
    Symmetric,
    /// `D̃^{-1} Ã`
    Row,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Symmetric => "sym",
            Scheme::Row => "row",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sym" | "symmetric" => Ok(Scheme::Symmetric),
            "row" => Ok(Scheme::Row),
            _ => Err(Error::Param(format!("unknown normalization scheme '{s}'"))),
        }
    }
}

/// Self-loop-augmented normalized adjacency `Â` and its split into the
/// off-diagonal part `A₁` and the diagonal `A₂`.
#[derive(Clone, Debug)]
pub struct NormalizedAdjacency<T> {
    pub a_hat: Arc<SparseMatrix<T>>,
    pub a1: Arc<SparseMatrix<T>>,
    pub a2_diag: Arc<[T]>,
    pub scheme: Scheme,
}

impl<T: Real> NormalizedAdjacency<T> {
    pub fn num_nodes(&self) -> usize {
        self.a2_diag.len()
    }

    pub fn cast<U: Real>(&self) -> NormalizedAdjacency<U> {
        NormalizedAdjacency {
            a_hat: Arc::new(self.a_hat.cast()),
            a1: Arc::new(self.a1.cast()),
            a2_diag: self.a2_diag.iter().map(|&x| U::of(x.as_f64())).collect(),
            scheme: self.scheme,
        }
    }
}

/// Degrees are out-degrees plus one for the added self-loop.
pub fn normalize(g: &Graph, scheme: Scheme) -> NormalizedAdjacency<f64> {
    let n = g.num_nodes();
    let dt: Vec<f64> = (0..n).map(|u| (g.degree(u) + 1) as f64).collect();

    let mut hat_ptr = Vec::with_capacity(n + 1);
    let mut hat_cols = Vec::with_capacity(g.num_arcs() + n);
    let mut hat_vals = Vec::with_capacity(g.num_arcs() + n);
    let mut a1_ptr = Vec::with_capacity(n + 1);
    let mut a1_cols = Vec::with_capacity(g.num_arcs());
    let mut a1_vals = Vec::with_capacity(g.num_arcs());
    hat_ptr.push(0);
    a1_ptr.push(0);

    let mut diag = Vec::with_capacity(n);
    for u in 0..n {
        let self_weight = 1.0 / dt[u];
        diag.push(self_weight);
        let mut self_done = false;
        for &v in g.neighbors(u) {
            if !self_done && v > u {
                hat_cols.push(u);
                hat_vals.push(self_weight);
                self_done = true;
            }
            let w = match scheme {
                Scheme::Symmetric => 1.0 / (dt[u] * dt[v]).sqrt(),
                Scheme::Row => 1.0 / dt[u],
            };
            hat_cols.push(v);
            hat_vals.push(w);
            a1_cols.push(v);
            a1_vals.push(w);
        }
        if !self_done {
            hat_cols.push(u);
            hat_vals.push(self_weight);
        }
        hat_ptr.push(hat_cols.len());
        a1_ptr.push(a1_cols.len());
    }

    let a_hat = SparseMatrix::from_csr(n, n, hat_ptr, hat_cols, hat_vals).expect("sorted by construction");
    let a1 = SparseMatrix::from_csr(n, n, a1_ptr, a1_cols, a1_vals).expect("sorted by construction");
    NormalizedAdjacency {
        a_hat: Arc::new(a_hat),
        a1: Arc::new(a1),
        a2_diag: diag.into(),
        scheme,
    }
}
