use super::dense::DenseMatrix;
use super::node::{check_segment, segment_data, Node};
use super::order::AxisOrder2;
use crate::{Error, Result};

/// Sparse matrix as a list of sentinel-terminated segments in one buffer.
///
/// With [`AxisOrder2::Wh`] there is one segment per row (`rows` segments,
/// node indices are columns); with [`AxisOrder2::Hw`] one per column.
/// `segment_offsets[s]` is the position of the first node of segment `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    order: AxisOrder2,
    rows: usize,
    cols: usize,
    nodes: Vec<Node>,
    segment_offsets: Vec<usize>,
}

impl SparseMatrix {
    /// Matrix with no data nodes.
    pub fn zeros(order: AxisOrder2, rows: usize, cols: usize) -> Self {
        let segments = match order {
            AxisOrder2::Wh => rows,
            AxisOrder2::Hw => cols,
        };
        SparseMatrix {
            order,
            rows,
            cols,
            nodes: vec![Node::SENTINEL; segments],
            segment_offsets: (0..segments).collect(),
        }
    }

    /// Assembles a matrix from raw parts and validates it.
    pub fn from_parts(
        order: AxisOrder2,
        rows: usize,
        cols: usize,
        nodes: Vec<Node>,
        segment_offsets: Vec<usize>,
    ) -> Result<Self> {
        let m = SparseMatrix {
            order,
            rows,
            cols,
            nodes,
            segment_offsets,
        };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn from_parts_unchecked(
        order: AxisOrder2,
        rows: usize,
        cols: usize,
        nodes: Vec<Node>,
        segment_offsets: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(
            segment_offsets.len(),
            match order {
                AxisOrder2::Wh => rows,
                AxisOrder2::Hw => cols,
            }
        );
        SparseMatrix {
            order,
            rows,
            cols,
            nodes,
            segment_offsets,
        }
    }

    pub fn from_dense(m: &DenseMatrix, order: AxisOrder2) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        let mut nodes = Vec::new();
        let mut segment_offsets = Vec::new();
        match order {
            AxisOrder2::Wh => {
                for r in 0..rows {
                    segment_offsets.push(nodes.len());
                    for c in 0..cols {
                        let v = m.get(r, c);
                        if v != 0.0 {
                            nodes.push(Node::new(c as i32, v));
                        }
                    }
                    nodes.push(Node::SENTINEL);
                }
            }
            AxisOrder2::Hw => {
                for c in 0..cols {
                    segment_offsets.push(nodes.len());
                    for r in 0..rows {
                        let v = m.get(r, c);
                        if v != 0.0 {
                            nodes.push(Node::new(r as i32, v));
                        }
                    }
                    nodes.push(Node::SENTINEL);
                }
            }
        }
        SparseMatrix {
            order,
            rows,
            cols,
            nodes,
            segment_offsets,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for s in 0..self.segment_count() {
            for node in self.segment(s) {
                let i = node.index as usize;
                match self.order {
                    AxisOrder2::Wh => out.set(s, i, node.value),
                    AxisOrder2::Hw => out.set(i, s, node.value),
                }
            }
        }
        out
    }

    pub fn order(&self) -> AxisOrder2 {
        self.order
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Whole node buffer, sentinels included.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn segment_offsets(&self) -> &[usize] {
        &self.segment_offsets
    }

    pub fn segment_count(&self) -> usize {
        self.segment_offsets.len()
    }

    /// Extent of the axis stored in node indices.
    pub fn index_bound(&self) -> usize {
        match self.order {
            AxisOrder2::Wh => self.cols,
            AxisOrder2::Hw => self.rows,
        }
    }

    /// Data nodes of segment `s` (sentinel excluded).
    pub fn segment(&self, s: usize) -> &[Node] {
        segment_data(&self.nodes[self.segment_offsets[s]..])
    }

    pub fn nnz(&self) -> usize {
        self.nodes.len() - self.segment_count()
    }

    pub(crate) fn into_parts(self) -> (Vec<Node>, Vec<usize>) {
        (self.nodes, self.segment_offsets)
    }

    pub fn validate(&self) -> Result<()> {
        let expected = match self.order {
            AxisOrder2::Wh => self.rows,
            AxisOrder2::Hw => self.cols,
        };
        validate_segments(
            &self.nodes,
            &self.segment_offsets,
            expected,
            self.index_bound(),
        )
    }
}

/// Shared check for a buffer that must be exactly a sequence of `expected`
/// segments starting at the given offsets.
pub(crate) fn validate_segments(
    nodes: &[Node],
    offsets: &[usize],
    expected: usize,
    bound: usize,
) -> Result<()> {
    if offsets.len() != expected {
        return Err(Error::format(format!(
            "expected {expected} segments, offset table has {}",
            offsets.len()
        )));
    }
    let mut cursor = 0usize;
    for (s, &off) in offsets.iter().enumerate() {
        if off != cursor {
            return Err(Error::format(format!(
                "segment {s} starts at {off}, expected {cursor}"
            )));
        }
        if off >= nodes.len() {
            return Err(Error::format(format!("segment {s} offset {off} past buffer end")));
        }
        cursor += check_segment(&nodes[off..], bound)
            .map_err(|e| Error::format(format!("segment {s}: {e}")))?;
    }
    if cursor != nodes.len() {
        return Err(Error::format(format!(
            "{} trailing nodes after last segment",
            nodes.len() - cursor
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DenseMatrix {
        DenseMatrix::from_vec(
            3,
            4,
            vec![
                1.0, 0.0, 0.0, 2.0, //
                0.0, 0.0, 0.0, 0.0, //
                0.0, 3.0, 4.0, 0.0,
            ],
        )
        .unwrap()
    }

    #[test]
    fn wh_segments_are_rows() {
        let m = SparseMatrix::from_dense(&sample(), AxisOrder2::Wh);
        m.validate().unwrap();
        assert_eq!(m.segment_count(), 3);
        assert_eq!(m.nnz(), 4);
        assert_eq!(m.segment_offsets(), &[0, 3, 4]);
        assert_eq!(m.segment(0), &[Node::new(0, 1.0), Node::new(3, 2.0)]);
        assert!(m.segment(1).is_empty());
        assert_eq!(m.to_dense(), sample());
    }

    #[test]
    fn hw_segments_are_columns() {
        let m = SparseMatrix::from_dense(&sample(), AxisOrder2::Hw);
        m.validate().unwrap();
        assert_eq!(m.segment_count(), 4);
        assert_eq!(m.segment(3), &[Node::new(0, 2.0)]);
        assert_eq!(m.to_dense(), sample());
    }

    #[test]
    fn validate_rejects_bad_buffers() {
        let unsorted = vec![Node::new(2, 1.0), Node::new(1, 1.0), Node::SENTINEL];
        assert!(SparseMatrix::from_parts(AxisOrder2::Wh, 1, 3, unsorted, vec![0]).is_err());
        let zero = vec![Node::new(0, 0.0), Node::SENTINEL];
        assert!(SparseMatrix::from_parts(AxisOrder2::Wh, 1, 3, zero, vec![0]).is_err());
        let no_sentinel = vec![Node::new(0, 1.0)];
        assert!(SparseMatrix::from_parts(AxisOrder2::Wh, 1, 3, no_sentinel, vec![0]).is_err());
        let out_of_range = vec![Node::new(3, 1.0), Node::SENTINEL];
        assert!(SparseMatrix::from_parts(AxisOrder2::Wh, 1, 3, out_of_range, vec![0]).is_err());
        let bad_offsets = vec![Node::SENTINEL, Node::SENTINEL];
        assert!(
            SparseMatrix::from_parts(AxisOrder2::Wh, 2, 3, bad_offsets, vec![0, 0]).is_err()
        );
    }
}
