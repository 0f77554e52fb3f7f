//! Node-classification datasets: the on-disk directory format, random
//! per-class splits, and seeded synthetic bundles.
//!
//! A dataset directory holds:
//!
//! | file | contents |
//! |---|---|
//! | `meta.json` | `{"num_nodes", "num_features", "num_classes", "directed"}` |
//! | `edges.tsv` | `src<TAB>dst` per line, 0-based; undirected edges once |
//! | `features.bin` | `num_nodes × num_features` f32 LE, row-major, no header |
//! | `labels.tsv` | `node<TAB>class` per line, every node exactly once |
//! | `splits.json` | optional `{"train": [..], "val": [..], "test": [..]}` |

mod io;
mod synthetic;

pub use io::{load_dataset, save_dataset, Meta};
pub use synthetic::{synthetic_bundle, FeatureKind, SyntheticSpec, Topology};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::tensor::Tensor;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl Splits {
    /// Checks disjointness, bounds and non-emptiness; sorts each set.
    pub fn validated(mut self, num_nodes: usize) -> Result<Self> {
        let mut owner = vec![None; num_nodes];
        for (name, set) in [("train", &mut self.train), ("val", &mut self.val), ("test", &mut self.test)] {
            if set.is_empty() {
                return Err(Error::Param(format!("{name} split is empty")));
            }
            set.sort_unstable();
            for &i in set.iter() {
                if i >= num_nodes {
                    return Err(Error::Index { what: "split node", index: i, len: num_nodes });
                }
                if let Some(prev) = owner[i] {
                    return Err(Error::Param(format!("node {i} appears in both {prev} and {name}")));
                }
                owner[i] = Some(name);
            }
        }
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetBundle {
    pub graph: Graph,
    pub features: Tensor<f32>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
    pub splits: Option<Splits>,
}

/// Size summary; `arcs` counts both directions of undirected edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub num_nodes: usize,
    pub arcs: usize,
    pub undirected_edges: usize,
    pub num_features: usize,
    pub num_classes: usize,
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl DatasetBundle {
    pub fn new(
        graph: Graph,
        features: Tensor<f32>,
        labels: Vec<usize>,
        num_classes: usize,
        splits: Option<Splits>,
    ) -> Result<Self> {
        let n = graph.num_nodes();
        if features.rows() != n {
            return Err(Error::Param(format!("{} feature rows for {n} nodes", features.rows())));
        }
        if labels.len() != n {
            return Err(Error::Param(format!("{} labels for {n} nodes", labels.len())));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::Index { what: "class label", index: bad, len: num_classes });
        }
        features.check_finite("features")?;
        let splits = splits.map(|s| s.validated(n)).transpose()?;
        Ok(Self { graph, features, labels, num_classes, splits })
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn num_features(&self) -> usize {
        self.features.cols()
    }

    pub fn splits(&self) -> Result<&Splits> {
        self.splits
            .as_ref()
            .ok_or_else(|| Error::Param("dataset has no splits; generate one with random_split".into()))
    }

    pub fn stats(&self) -> DatasetStats {
        let s = self.splits.clone().unwrap_or_default();
        DatasetStats {
            num_nodes: self.num_nodes(),
            arcs: self.graph.num_arcs(),
            undirected_edges: self.graph.num_undirected_edges(),
            num_features: self.num_features(),
            num_classes: self.num_classes,
            train: s.train.len(),
            val: s.val.len(),
            test: s.test.len(),
        }
    }

    /// Scales every feature row to sum to one (rows summing to zero are kept).
    pub fn row_normalize_features(&mut self) {
        let cols = self.features.cols();
        for r in 0..self.features.rows() {
            let row = self.features.row_mut(r);
            let s: f32 = row.iter().sum();
            if s != 0.0 && cols > 0 {
                row.iter_mut().for_each(|x| *x /= s);
            }
        }
    }
}

/// Per class: `per_class_train` training and `per_class_val` validation
/// nodes drawn at random; everything else is test.
pub fn random_split(
    labels: &[usize],
    num_classes: usize,
    per_class_train: usize,
    per_class_val: usize,
    seed: u64,
) -> Result<Splits> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut splits = Splits::default();
    for c in 0..num_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&u| labels[u] == c).collect();
        if members.len() < per_class_train + per_class_val {
            return Err(Error::Param(format!(
                "class {c} has {} nodes, fewer than {per_class_train} train + {per_class_val} val",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        splits.train.extend_from_slice(&members[..per_class_train]);
        splits.val.extend_from_slice(&members[per_class_train..per_class_train + per_class_val]);
        splits.test.extend_from_slice(&members[per_class_train + per_class_val..]);
    }
    if splits.test.is_empty() {
        return Err(Error::Param("random split leaves no test nodes".into()));
    }
    splits.validated(labels.len())
}

#[cfg(test)]
mod tests;
