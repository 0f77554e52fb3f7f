use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{DatasetBundle, Splits};
use crate::error::{Error, Result};
use crate::graph::{synthesize, Graph, SynthKind};
use crate::tensor::Tensor;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    /// A named topology; node `u` gets label `u mod C`.
    Synth { graph: SynthKind },
    /// Planted partition: node `u` is in block `u mod C`; pairs inside a
    /// block connect with `p_in`, across blocks with `p_out`.
    Communities { n: usize, p_in: f64, p_out: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    /// Class mean drawn from N(0, 1) per dimension plus N(0, noise²) per node.
    Gaussian { noise: f64 },
    /// One-hot node identity; needs `features == n`.
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub topology: Topology,
    pub features: usize,
    pub classes: usize,
    pub feature_kind: FeatureKind,
    pub seed: u64,
}

/// Seeded bundle with a per-class split of roughly 20% train, 20% val and
/// the rest test (at least one of each, so every class needs 3 members).
pub fn synthetic_bundle(spec: &SyntheticSpec) -> Result<DatasetBundle> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let c = spec.classes;
    if c == 0 {
        return Err(Error::Param("synthetic data needs at least one class".into()));
    }
    let graph = match &spec.topology {
        Topology::Synth { graph } => synthesize(graph)?,
        &Topology::Communities { n, p_in, p_out } => {
            for p in [p_in, p_out] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Param(format!("edge probability {p} outside [0,1]")));
                }
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    let p = if u % c == v % c { p_in } else { p_out };
                    if rng.random_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            Graph::build(n, &edges, false)?
        }
    };
    let n = graph.num_nodes();
    if n < c {
        return Err(Error::Param(format!("{n} nodes cannot hold {c} classes")));
    }
    let labels: Vec<usize> = (0..n).map(|u| u % c).collect();
    let d = spec.features;
    let features = match spec.feature_kind {
        FeatureKind::Identity => {
            if d != n {
                return Err(Error::Param(format!("identity features need {n} dimensions, got {d}")));
            }
            Tensor::<f32>::identity(n)
        }
        FeatureKind::Gaussian { noise } => {
            let means: Vec<f64> = (0..c * d).map(|_| rng.sample(StandardNormal)).collect();
            let mut data = Vec::with_capacity(n * d);
            for &l in &labels {
                for j in 0..d {
                    let eps: f64 = rng.sample(StandardNormal);
                    data.push((means[l * d + j] + noise * eps) as f32);
                }
            }
            Tensor::new(n, d, data)?
        }
    };

    let mut splits = Splits::default();
    for class in 0..c {
        let mut members: Vec<usize> = (class..n).step_by(c).collect();
        if members.len() < 3 {
            return Err(Error::Param(format!(
                "class {class} has {} nodes; synthetic splits need at least 3 per class",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        let k = (members.len() / 5).max(1);
        splits.train.extend_from_slice(&members[..k]);
        splits.val.extend_from_slice(&members[k..2 * k]);
        splits.test.extend_from_slice(&members[2 * k..]);
    }
    DatasetBundle::new(graph, features, labels, c, Some(splits))
}
