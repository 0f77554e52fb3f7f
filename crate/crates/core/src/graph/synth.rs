use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// Deterministic synthetic topologies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SynthKind {
    Complete { n: usize },
    Path { n: usize },
    Star { n: usize },
    ErdosRenyi { n: usize, p: f64, seed: u64 },
}

impl SynthKind {
    pub fn num_nodes(&self) -> usize {
        match *self {
            SynthKind::Complete { n }
            | SynthKind::Path { n }
            | SynthKind::Star { n }
            | SynthKind::ErdosRenyi { n, .. } => n,
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthKind::Complete { n } => write!(f, "complete:{n}"),
            SynthKind::Path { n } => write!(f, "path:{n}"),
            SynthKind::Star { n } => write!(f, "star:{n}"),
            SynthKind::ErdosRenyi { n, p, seed } => write!(f, "erdos_renyi:{n}:{p}:{seed}"),
        }
    }
}

/// Parses `complete:N`, `path:N`, `star:N` and `erdos_renyi:N:P:SEED`.
impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Param(format!("unrecognized graph spec '{s}'"));
        let num = |i: usize| -> Result<usize> { parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        match parts[0] {
            "complete" if parts.len() == 2 => Ok(SynthKind::Complete { n: num(1)? }),
            "path" if parts.len() == 2 => Ok(SynthKind::Path { n: num(1)? }),
            "star" if parts.len() == 2 => Ok(SynthKind::Star { n: num(1)? }),
            "erdos_renyi" | "er" if parts.len() == 4 => Ok(SynthKind::ErdosRenyi {
                n: num(1)?,
                p: parts[2].parse().map_err(|_| bad())?,
                seed: parts[3].parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

pub fn synthesize(kind: &SynthKind) -> Result<Graph> {
    let n = kind.num_nodes();
    if n == 0 {
        return Err(Error::Param("synthetic graphs need at least one node".into()));
    }
    let edges: Vec<(usize, usize)> = match *kind {
        SynthKind::Complete { n } => (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect(),
        SynthKind::Path { n } => (1..n).map(|v| (v - 1, v)).collect(),
        SynthKind::Star { n } => (1..n).map(|v| (0, v)).collect(),
        SynthKind::ErdosRenyi { n, p, seed } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Param(format!("edge probability {p} outside [0,1]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            edges
        }
    };
    Graph::build(n, &edges, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_and_degenerate_path() {
        let g = synthesize(&SynthKind::Complete { n: 3 }).unwrap();
        assert_eq!(g.num_arcs(), 6);
        let g = synthesize(&SynthKind::Path { n: 1 }).unwrap();
        assert_eq!(g.num_arcs(), 0);
        let g = synthesize(&SynthKind::Star { n: 5 }).unwrap();
        assert_eq!(g.degree(0), 4);
    }

    #[test]
    fn erdos_renyi_is_deterministic() {
        let k = SynthKind::ErdosRenyi { n: 100, p: 0.05, seed: 7 };
        let a = synthesize(&k).unwrap();
        let b = synthesize(&k).unwrap();
        assert_eq!(a.num_arcs(), b.num_arcs());
        assert_eq!(a, b);
        let c = synthesize(&SynthKind::ErdosRenyi { n: 100, p: 0.05, seed: 8 }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_probability_rejected() {
        let k = SynthKind::ErdosRenyi { n: 4, p: 1.5, seed: 0 };
        assert!(matches!(synthesize(&k), Err(Error::Param(_))));
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["complete:3", "path:1", "star:9", "erdos_renyi:200:0.05:3"] {
            let k: SynthKind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert!("complete".parse::<SynthKind>().is_err());
        assert!("torus:4".parse::<SynthKind>().is_err());
    }
}
