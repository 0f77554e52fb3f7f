//! Graph tree networks, the GCN/GAT baselines, and their ablation variants.

mod checkpoint;
mod context;
mod forward;
mod params;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, Checkpoint, CHECKPOINT_VERSION};
pub use context::GraphContext;
pub use forward::{
    classify, forward, gat_forward, gcn_forward, gtan_forward, gtcn_forward, infer, initial_transform,
    variant_forward, Pass,
};
pub use params::{Bound, ParameterSet};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Scheme;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arch {
    Gtcn,
    Gtan,
    Gcn,
    Gat,
    SimpleGcn,
    SimpleGat,
    Gtcn2,
    Gtan2,
}

impl Arch {
    pub const ALL: [Arch; 8] = [
        Arch::Gtcn,
        Arch::Gtan,
        Arch::Gcn,
        Arch::Gat,
        Arch::SimpleGcn,
        Arch::SimpleGat,
        Arch::Gtcn2,
        Arch::Gtan2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Arch::Gtcn => "gtcn",
            Arch::Gtan => "gtan",
            Arch::Gcn => "gcn",
            Arch::Gat => "gat",
            Arch::SimpleGcn => "simple_gcn",
            Arch::SimpleGat => "simple_gat",
            Arch::Gtcn2 => "gtcn2",
            Arch::Gtan2 => "gtan2",
        }
    }

    /// Stable numeric tag used in checkpoints.
    pub fn tag(self) -> u32 {
        Arch::ALL.iter().position(|&a| a == self).unwrap() as u32
    }

    pub fn from_tag(tag: u32) -> Result<Arch> {
        Arch::ALL
            .get(tag as usize)
            .copied()
            .ok_or_else(|| Error::Checkpoint(format!("unknown architecture tag {tag}")))
    }

    /// Models that start from an MLP transform `Z` and classify with `W₀`.
    pub fn has_initial_transform(self) -> bool {
        !matches!(self, Arch::Gcn | Arch::Gat)
    }

    pub fn uses_attention(self) -> bool {
        matches!(self, Arch::Gtan | Arch::Gat | Arch::SimpleGat | Arch::Gtan2)
    }

    pub fn is_variant(self) -> bool {
        matches!(self, Arch::SimpleGcn | Arch::SimpleGat | Arch::Gtcn2 | Arch::Gtan2)
    }

    /// Baseline a variant is derived from (identity for the main models).
    pub fn parent(self) -> Arch {
        match self {
            Arch::SimpleGcn => Arch::Gcn,
            Arch::SimpleGat => Arch::Gat,
            Arch::Gtcn2 => Arch::Gtcn,
            Arch::Gtan2 => Arch::Gtan,
            a => a,
        }
    }
}

impl fmt::Display for Arch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Arch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        let key = match key.as_str() {
            "simplegcn" => "simple_gcn",
            "simplegat" => "simple_gat",
            k => k,
        };
        Arch::ALL.iter().copied().find(|a| a.name() == key).ok_or_else(|| {
            let valid: Vec<&str> = Arch::ALL.iter().map(|a| a.name()).collect();
            Error::Param(format!("unknown model '{s}' (valid: {})", valid.join(", ")))
        })
    }
}

/// Architecture and dimensions of one model.
///
/// For GCN and GAT `dropout_input` is the feature dropout in front of every
/// layer and `dropout_prop` is the attention dropout. For models with an
/// initial transform, `dropout_input` applies to `X` and `dropout_prop`
/// inside propagation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub arch: Arch,
    pub hops: usize,
    pub in_dim: usize,
    pub hidden: usize,
    pub classes: usize,
    pub dropout_input: f64,
    pub dropout_prop: f64,
    pub scheme: Scheme,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.hops == 0 {
            return Err(Error::Param("hops must be at least 1".into()));
        }
        for (name, v) in [("in_dim", self.in_dim), ("hidden", self.hidden), ("classes", self.classes)] {
            if v == 0 {
                return Err(Error::Param(format!("{name} must be at least 1")));
            }
        }
        for (name, p) in [("dropout_input", self.dropout_input), ("dropout_prop", self.dropout_prop)] {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::Param(format!("{name} = {p} outside [0, 1)")));
            }
        }
        Ok(())
    }
}
