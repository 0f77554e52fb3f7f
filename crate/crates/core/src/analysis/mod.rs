//! Numerical checks of the tree-propagation theory in double precision:
//! eigenvalue bounds of `A₁` and `I − A₁`, the closed-form infinite-depth
//! limit `(I − A₁)⁻¹A₂Z`, convergence of finite-depth propagation toward it,
//! and row collapse of GCN-style propagation on complete graphs.
//!
//! Dense linear algebra (nalgebra) is the oracle; finite-depth propagation
//! runs through the crate's own sparse kernels.

mod limit;
mod report;
mod smoothing;
mod spectral;

pub use limit::{closed_form_limit, convergence_trace, propagate, ConvergenceTrace, LimitSolution, MAX_DENSE_NODES};
pub use report::{verify_graph, CHECKS, CheckResult, CheckStatus, VerificationReport, VerifyOptions};
pub use smoothing::{max_pairwise_distance, min_pairwise_distance, smoothing_curves, smoothing_probe, SmoothingCurves, SmoothingReport};
pub use spectral::{excited_radius, spectral_check, SpectralReport};
