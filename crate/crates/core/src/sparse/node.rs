use crate::{Error, Result};

/// One stored entry: an index along the innermost stored axis and its value.
///
/// `index == -1` marks the sentinel that terminates a segment; its value is
/// unused and kept at `0.0`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[repr(C)]
pub struct Node {
    pub index: i32,
    pub value: f32,
}

impl Node {
    pub const SENTINEL: Node = Node {
        index: -1,
        value: 0.0,
    };

    #[inline]
    pub fn new(index: i32, value: f32) -> Self {
        Node { index, value }
    }

    #[inline]
    pub fn is_sentinel(&self) -> bool {
        self.index == -1
    }
}

/// Data nodes of the segment starting at `nodes[0]`, without the sentinel.
#[inline]
pub(crate) fn segment_data(nodes: &[Node]) -> &[Node] {
    let end = nodes
        .iter()
        .position(Node::is_sentinel)
        .unwrap_or(nodes.len());
    &nodes[..end]
}

/// Checks one segment starting at `nodes[0]`: strictly increasing indices
/// below `bound`, no stored zeros, and a terminating sentinel. Returns the
/// number of nodes including the sentinel.
pub(crate) fn check_segment(nodes: &[Node], bound: usize) -> Result<usize> {
    let mut prev: i64 = -1;
    for (n, node) in nodes.iter().enumerate() {
        if node.is_sentinel() {
            return Ok(n + 1);
        }
        let idx = node.index as i64;
        if idx < 0 || idx as usize >= bound {
            return Err(Error::format(format!(
                "node index {idx} out of range 0..{bound}"
            )));
        }
        if idx <= prev {
            return Err(Error::format(format!(
                "node indices not strictly increasing ({prev} then {idx})"
            )));
        }
        if node.value == 0.0 {
            return Err(Error::format(format!("explicit zero stored at index {idx}")));
        }
        prev = idx;
    }
    Err(Error::format("segment is missing its sentinel"))
}

/// A sentinel-terminated run of nodes with a logical length.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector {
    nodes: Vec<Node>,
    len: usize,
}

impl SparseVector {
    /// Empty vector of logical length `len` (sentinel only).
    pub fn zeros(len: usize) -> Self {
        SparseVector {
            nodes: vec![Node::SENTINEL],
            len,
        }
    }

    pub fn from_dense(values: &[f32]) -> Self {
        let mut nodes: Vec<Node> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| Node::new(i as i32, *v))
            .collect();
        nodes.push(Node::SENTINEL);
        SparseVector {
            nodes,
            len: values.len(),
        }
    }

    /// Builds from `(index, value)` pairs; zeros are dropped, everything else
    /// must be sorted and in range.
    pub fn from_pairs(len: usize, pairs: &[(usize, f32)]) -> Result<Self> {
        let mut nodes = Vec::with_capacity(pairs.len() + 1);
        for &(i, v) in pairs {
            if v != 0.0 {
                nodes.push(Node::new(i as i32, v));
            }
        }
        nodes.push(Node::SENTINEL);
        let v = SparseVector { nodes, len };
        v.validate()?;
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// All nodes including the trailing sentinel.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn nnz(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn to_dense(&self) -> Vec<f32> {
        let mut out = vec![0.0; self.len];
        for node in segment_data(&self.nodes) {
            out[node.index as usize] = node.value;
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let used = check_segment(&self.nodes, self.len)?;
        if used != self.nodes.len() {
            return Err(Error::format("nodes after the sentinel"));
        }
        Ok(())
    }
}
