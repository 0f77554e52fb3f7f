//! Graph topology, synthetic generators, and adjacency normalization.

mod normalize;
mod synth;

pub use normalize::{normalize, NormalizedAdjacency, Scheme};
pub use synth::{synthesize, SynthKind};

use crate::error::{Error, Result};

/// Simple graph stored as sorted out-adjacency lists. Self-loops and
/// duplicate edges never survive construction; undirected graphs store both
/// arcs of every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    directed: bool,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    self_loops_removed: usize,
}

impl Graph {
    pub fn build(num_nodes: usize, edges: &[(usize, usize)], directed: bool) -> Result<Self> {
        let mut arcs: Vec<(usize, usize)> = Vec::with_capacity(edges.len() * if directed { 1 } else { 2 });
        let mut self_loops = 0;
        for &(u, v) in edges {
            for endpoint in [u, v] {
                if endpoint >= num_nodes {
                    return Err(Error::Graph(format!(
                        "edge ({u}, {v}) has endpoint outside [0, {num_nodes})"
                    )));
                }
            }
            if u == v {
                self_loops += 1;
                continue;
            }
            arcs.push((u, v));
            if !directed {
                arcs.push((v, u));
            }
        }
        arcs.sort_unstable();
        arcs.dedup();

        let mut offsets = vec![0usize; num_nodes + 1];
        for &(u, _) in &arcs {
            offsets[u + 1] += 1;
        }
        for i in 0..num_nodes {
            offsets[i + 1] += offsets[i];
        }
        Ok(Self {
            num_nodes,
            directed,
            offsets,
            targets: arcs.into_iter().map(|(_, v)| v).collect(),
            self_loops_removed: self_loops,
        })
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    #[inline]
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of stored arcs (both directions of undirected edges count).
    #[inline]
    pub fn num_arcs(&self) -> usize {
        self.targets.len()
    }

    /// Unordered node pairs joined by at least one arc.
    pub fn num_undirected_edges(&self) -> usize {
        if self.directed {
            self.symmetrized().num_arcs() / 2
        } else {
            self.num_arcs() / 2
        }
    }

    /// Self-loops dropped from the input edge list.
    pub fn self_loops_removed(&self) -> usize {
        self.self_loops_removed
    }

    /// Out-neighbors of `u`, ascending.
    #[inline]
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Out-degree (self-loops excluded).
    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.num_nodes).map(|u| self.degree(u)).collect()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes).flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// Canonical edge list: each undirected edge once as `(u, v)` with
    /// `u < v`; every arc for directed graphs. Sorted.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        if self.directed {
            self.arcs().collect()
        } else {
            self.arcs().filter(|&(u, v)| u < v).collect()
        }
    }

    pub fn is_isolated(&self, u: usize) -> bool {
        self.degree(u) == 0
    }

    /// Undirected copy of a (possibly directed) graph.
    pub fn symmetrized(&self) -> Graph {
        let arcs: Vec<(usize, usize)> = self.arcs().collect();
        Graph::build(self.num_nodes, &arcs, false).expect("arcs of a valid graph are valid")
    }
}
