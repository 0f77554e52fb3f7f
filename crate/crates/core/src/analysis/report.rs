use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::limit::{closed_form_limit, convergence_trace, MAX_DENSE_NODES};
use super::smoothing::smoothing_probe;
use super::spectral::{excited_radius, spectral_check};
use crate::error::Result;
use crate::graph::{normalize, Graph, Scheme};
use crate::tensor::Tensor;

/// Names of the checks, in report order.
pub const CHECKS: [&str; 6] = [
    "eigenvalue_bounds",
    "closed_form_limit",
    "convergence",
    "contraction_rate",
    "row_scheme_identity",
    "complete_graph_smoothing",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl CheckStatus {
    fn from_bool(ok: bool) -> Self {
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub summary: String,
    pub evidence: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub depths: Vec<usize>,
    /// Convergence tolerance, relative to `max(1, ‖H*‖∞)`.
    pub tolerance: f64,
    /// Allowed relative gap between the fitted contraction rate and the
    /// spectral radius.
    pub rate_tolerance: f64,
    /// The rate comparison only runs when `ρ − ρ₂` exceeds this.
    pub min_dominance_gap: f64,
    pub smoothing_depth: usize,
    /// Largest complete graph used by the smoothing probe.
    pub smoothing_nodes: usize,
    pub feature_dim: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            depths: vec![1, 2, 5, 10, 20, 50, 100, 150, 200],
            tolerance: 1e-8,
            rate_tolerance: 0.1,
            min_dominance_gap: 0.05,
            smoothing_depth: 10,
            smoothing_nodes: 64,
            feature_dim: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub num_nodes: usize,
    pub undirected_edges: usize,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    /// True when nothing failed; skipped checks do not count against it.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("graph: {} nodes, {} edges\n", self.num_nodes, self.undirected_edges);
        for c in &self.checks {
            let _ = writeln!(s, "{} {}: {}", c.status.label(), c.name, c.summary);
        }
        s
    }
}

fn skipped(name: &str, why: impl Into<String>) -> CheckResult {
    let why = why.into();
    CheckResult { name: name.into(), status: CheckStatus::Skipped, evidence: json!({ "reason": why }), summary: why }
}

fn gaussian(n: usize, d: usize, seed: u64) -> Tensor<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Tensor::from_fn(n, d, |_, _| rng.sample(StandardNormal))
}

/// Runs the theory checks on `graph` with the symmetric scheme.
pub fn verify_graph(graph: &Graph, opts: &VerifyOptions) -> Result<VerificationReport> {
    let n = graph.num_nodes();
    let norm = normalize(graph, Scheme::Symmetric);
    let mut checks = Vec::new();
    if n < 2 {
        for name in CHECKS {
            checks.push(skipped(name, format!("{n} node(s): vacuous")));
        }
        return Ok(VerificationReport { num_nodes: n, undirected_edges: graph.num_undirected_edges(), checks });
    }

    let spectrum = if graph.is_directed() {
        checks.push(skipped("eigenvalue_bounds", "directed graph: A₁ is not symmetric"));
        None
    } else {
        let s = spectral_check(&norm)?;
        let ok = s.bounds_hold();
        checks.push(CheckResult {
            name: "eigenvalue_bounds".into(),
            status: CheckStatus::from_bool(ok),
            summary: format!(
                "A₁ in [{:.6}, {:.6}], I − A₁ in [{:.6}, {:.6}], {} violations ({})",
                s.a1_min,
                s.a1_max,
                s.lambda_min,
                s.lambda_max,
                s.violations.len(),
                s.method
            ),
            evidence: json!({
                "method": s.method,
                "a1_min": s.a1_min,
                "a1_max": s.a1_max,
                "lambda_min": s.lambda_min,
                "lambda_max": s.lambda_max,
                "spectral_radius": s.spectral_radius,
                "second_radius": s.second_radius,
                "dominance_gap": s.dominance_gap(),
                "margin": s.margin,
                "violations": s.violations,
            }),
        });
        Some(s)
    };

    if n > MAX_DENSE_NODES {
        let why = format!("{n} nodes exceeds the dense limit of {MAX_DENSE_NODES}");
        checks.push(skipped("closed_form_limit", why.clone()));
        checks.push(skipped("convergence", why.clone()));
        checks.push(skipped("contraction_rate", why.clone()));
        checks.push(skipped("row_scheme_identity", why));
    } else {
        let z = gaussian(n, opts.feature_dim, opts.seed);
        let t = convergence_trace(&norm, &z, &opts.depths)?;
        let residual_ok = t.limit_residual < 1e-10 * t.scale;
        checks.push(CheckResult {
            name: "closed_form_limit".into(),
            status: CheckStatus::from_bool(residual_ok),
            summary: format!("fixed-point residual {:.3e}", t.limit_residual),
            evidence: json!({ "residual": t.limit_residual, "scale": t.scale }),
        });
        let converged = t.converged(opts.tolerance);
        let deepest = t.depths.last().copied().unwrap_or(0);
        checks.push(CheckResult {
            name: "convergence".into(),
            status: CheckStatus::from_bool(converged && t.monotone_tail),
            summary: format!(
                "distance {:.3e} at depth {deepest} (tolerance {:.1e}), monotone tail {}",
                t.final_distance(),
                opts.tolerance * t.scale,
                t.monotone_tail
            ),
            evidence: json!({ "depths": t.depths, "distances": t.distances, "monotone_tail": t.monotone_tail }),
        });
        match (t.fitted_rate, spectrum.as_ref()) {
            (_, Some(s)) if s.spectral_radius == 0.0 => {
                checks.push(skipped("contraction_rate", "A₁ = 0: the limit is reached in one step"))
            }
            (_, Some(s)) if s.dominance_gap() <= opts.min_dominance_gap => checks.push(skipped(
                "contraction_rate",
                format!("dominance gap {:.4} too small to isolate the leading mode", s.dominance_gap()),
            )),
            (Some(rate), Some(s)) => {
                let e0 = Tensor::from_fn(n, z.cols(), |r, c| z.get(r, c) - t.limit.get(r, c));
                let excited = excited_radius(&norm.a1, &e0)?;
                let target = if excited < s.spectral_radius - 1e-9 { excited } else { s.spectral_radius };
                let gap = (rate - target).abs() / target;
                let summary = if target < s.spectral_radius {
                    format!(
                        "fitted rate {rate:.4} vs {target:.4}, the largest mode present in Z − H* (spectral radius {:.4} not excited)",
                        s.spectral_radius
                    )
                } else {
                    format!("fitted rate {rate:.4} vs spectral radius {:.4}", s.spectral_radius)
                };
                checks.push(CheckResult {
                    name: "contraction_rate".into(),
                    status: CheckStatus::from_bool(gap <= opts.rate_tolerance),
                    summary,
                    evidence: json!({
                        "fitted_rate": rate,
                        "spectral_radius": s.spectral_radius,
                        "excited_radius": excited,
                        "relative_difference": gap,
                        "dominance_gap": s.dominance_gap(),
                    }),
                });
            }
            (None, _) => checks.push(skipped("contraction_rate", "distances reach rounding level too quickly to fit")),
            (_, None) => checks.push(skipped("contraction_rate", "no spectral radius for a directed graph")),
        }
        let row = closed_form_limit(&normalize(graph, Scheme::Row), &Tensor::ones(n, 1))?;
        let off = row.h.data().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        checks.push(CheckResult {
            name: "row_scheme_identity".into(),
            status: CheckStatus::from_bool(off < 1e-12 && row.residual < 1e-12),
            summary: format!("row-scheme limit of ones deviates by {off:.3e}, residual {:.3e}", row.residual),
            evidence: json!({ "max_deviation": off, "residual": row.residual }),
        });
    }

    let m = n.min(opts.smoothing_nodes);
    if m < 2 {
        checks.push(skipped("complete_graph_smoothing", "fewer than 2 nodes"));
    } else {
        let r = smoothing_probe(m, &Tensor::identity(m), opts.smoothing_depth)?;
        let ok = r.gcn_collapsed(1e-9) && r.gtcn_distinct(1e-6);
        checks.push(CheckResult {
            name: "complete_graph_smoothing".into(),
            status: CheckStatus::from_bool(ok),
            summary: format!(
                "K_{m} at depth {}: GCN max row distance {:.3e}, tree min row distance {:.3e}",
                r.depth, r.gcn_max_distance, r.gtcn_min_distance
            ),
            evidence: serde_json::to_value(&r).unwrap_or(Value::Null),
        });
    }

    Ok(VerificationReport { num_nodes: n, undirected_edges: graph.num_undirected_edges(), checks })
}
