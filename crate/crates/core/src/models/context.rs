use std::sync::Arc;

use crate::graph::{normalize, Graph, NormalizedAdjacency, Scheme};
use crate::scalar::Real;
use crate::tensor::EdgeIndex;

/// Everything a forward pass needs from the graph, precomputed once and
/// shared read-only between runs.
#[derive(Clone, Debug)]
pub struct GraphContext<T> {
    pub norm: NormalizedAdjacency<T>,
    /// Messages `v → u` for every arc plus a self message `u → u`; sources
    /// index the hidden map.
    pub attention: Arc<EdgeIndex>,
    /// Same destinations, but the self message reads row `N + u` of the
    /// stacked `[H; Z]`, so node `u` attends to its own initial feature.
    pub tree: Arc<EdgeIndex>,
}

impl<T: Real> GraphContext<T> {
    pub fn new(g: &Graph, scheme: Scheme) -> Self {
        let n = g.num_nodes();
        let cap = g.num_arcs() + n;
        let (mut dst, mut att_src, mut tree_src) = (Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::with_capacity(cap));
        for u in 0..n {
            let mut self_done = false;
            for &v in g.neighbors(u) {
                if !self_done && v > u {
                    dst.push(u);
                    att_src.push(u);
                    self_done = true;
                }
                dst.push(u);
                att_src.push(v);
            }
            if !self_done {
                dst.push(u);
                att_src.push(u);
            }
            for &v in g.neighbors(u) {
                tree_src.push(v);
            }
            tree_src.push(n + u);
        }
        // The tree index lists neighbors first, then self, per destination.
        let tree = EdgeIndex::new(dst.clone(), tree_src, n, 2 * n).expect("valid by construction");
        let attention = EdgeIndex::new(dst, att_src, n, n).expect("valid by construction");
        Self {
            norm: normalize(g, scheme).cast(),
            attention: Arc::new(attention),
            tree: Arc::new(tree),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.norm.num_nodes()
    }
}
