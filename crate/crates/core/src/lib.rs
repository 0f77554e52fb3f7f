//! Graph tree networks (GTCN, GTAN) and GCN/GAT baselines on a small
//! reverse-mode tensor engine, with the numerical checks that back the
//! depth-convergence claims.

pub mod analysis;
pub mod data;
pub mod error;
pub mod graph;
pub mod models;
pub mod scalar;
pub mod tensor;
pub mod training;

pub use error::{Error, Result};
pub use scalar::Real;
