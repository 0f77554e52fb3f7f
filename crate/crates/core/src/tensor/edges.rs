use std::sync::Arc;

use crate::error::{Error, Result};

/// Group assignment for [`Tape::segment_softmax`](crate::tensor::Tape::segment_softmax).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segments {
    ids: Arc<[usize]>,
    count: usize,
}

impl Segments {
    /// `ids[e]` is the group of entry `e`; every id must be below `count`.
    pub fn new(ids: Vec<usize>, count: usize) -> Result<Self> {
        if let Some(&bad) = ids.iter().find(|&&g| g >= count) {
            return Err(Error::Index {
                what: "segment id",
                index: bad,
                len: count,
            });
        }
        Ok(Self {
            ids: ids.into(),
            count,
        })
    }

    #[inline]
    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Message list for attention layers: entry `e` carries a message from
/// source row `src[e]` into destination row `dst[e]`. Entries are grouped by
/// destination (non-decreasing `dst`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeIndex {
    dst: Vec<usize>,
    src: Vec<usize>,
    offsets: Vec<usize>,
    num_src: usize,
    segments: Segments,
}

impl EdgeIndex {
    pub fn new(dst: Vec<usize>, src: Vec<usize>, num_dst: usize, num_src: usize) -> Result<Self> {
        if dst.len() != src.len() {
            return Err(Error::shape("edge_index", "dst and src lengths differ"));
        }
        if dst.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Param("edge_index entries must be grouped by destination".into()));
        }
        if let Some(&bad) = src.iter().find(|&&s| s >= num_src) {
            return Err(Error::Index {
                what: "edge source",
                index: bad,
                len: num_src,
            });
        }
        let segments = Segments::new(dst.clone(), num_dst)?;
        let mut offsets = vec![0usize; num_dst + 1];
        for &d in &dst {
            offsets[d + 1] += 1;
        }
        for i in 0..num_dst {
            offsets[i + 1] += offsets[i];
        }
        Ok(Self {
            dst,
            src,
            offsets,
            num_src,
            segments,
        })
    }

    #[inline]
    pub fn dst(&self) -> &[usize] {
        &self.dst
    }

    #[inline]
    pub fn src(&self) -> &[usize] {
        &self.src
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.dst.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.dst.is_empty()
    }

    #[inline]
    pub fn num_dst(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn num_src(&self) -> usize {
        self.num_src
    }

    /// Entry range of destination `d`.
    #[inline]
    pub fn range(&self, d: usize) -> std::ops::Range<usize> {
        self.offsets[d]..self.offsets[d + 1]
    }

    pub fn segments(&self) -> &Segments {
        &self.segments
    }
}
