use crate::sparse::{AxisOrder3, Dims3, Node, SparseMatrix, SparseTensor3};
use crate::{Error, Result};

/// Switches a sparse matrix between `Wh` and `Hw` storage.
///
/// A counting pass sizes every output segment (data nodes plus sentinel)
/// and turns the counts into start cursors; a scatter pass walks the input
/// segments in order and drops each node at its column's cursor, advancing
/// it; a final pass writes the sentinels where the cursors stop. Because the
/// input segments are visited in ascending order, every output segment comes
/// out sorted.
pub fn transpose_matrix(m: &SparseMatrix) -> SparseMatrix {
    let out_segments = m.index_bound();
    let in_segments = m.segment_count();

    let mut cursor = vec![0usize; out_segments + 1];
    for s in 0..in_segments {
        for node in m.segment(s) {
            cursor[node.index as usize + 1] += 1;
        }
    }
    // +1 per segment for its sentinel, then exclusive prefix sum
    let mut running = 0usize;
    for c in cursor.iter_mut().take(out_segments + 1).skip(1) {
        running += *c + 1;
        *c = running;
    }
    let starts: Vec<usize> = cursor[..out_segments].to_vec();
    let total = m.nnz() + out_segments;

    let mut nodes = vec![Node::SENTINEL; total];
    for s in 0..in_segments {
        for node in m.segment(s) {
            let slot = &mut cursor[node.index as usize];
            nodes[*slot] = Node::new(s as i32, node.value);
            *slot += 1;
        }
    }
    for &end in &cursor[..out_segments] {
        nodes[end] = Node::SENTINEL;
    }

    SparseMatrix::from_parts_unchecked(
        m.order().transposed(),
        m.rows(),
        m.cols(),
        nodes,
        starts,
    )
}

/// Converts a `Whc` tensor (per-channel `Wh` matrices) to `Chw` (channel
/// fibers).
///
/// Each channel matrix is first transposed to `Hw`, so that column `w` of
/// every channel lists its heights in ascending order. Walking `w`, then
/// `h`, then `c` with one cursor per channel emits each channel fiber in
/// index order.
pub fn transpose_tensor3(t: &SparseTensor3) -> Result<SparseTensor3> {
    if t.order() != AxisOrder3::Whc {
        return Err(Error::format(format!(
            "transpose_tensor3 expects whc input, found {}",
            t.order().name()
        )));
    }
    let Dims3 { c: chans, h: height, w: width } = t.dims();
    let columns: Vec<SparseMatrix> = (0..chans)
        .map(|c| t.matrix(c).map(|m| transpose_matrix(&m)))
        .collect::<Result<_>>()?;

    let mut nodes = Vec::with_capacity(t.nnz() + height * width);
    let mut segment_offsets = Vec::with_capacity(height * width);
    let mut cursors = vec![0usize; chans];
    for w in 0..width {
        for (cur, m) in cursors.iter_mut().zip(&columns) {
            *cur = m.segment_offsets()[w];
        }
        for h in 0..height {
            segment_offsets.push(nodes.len());
            for (c, m) in columns.iter().enumerate() {
                let node = m.nodes()[cursors[c]];
                if node.index == h as i32 {
                    nodes.push(Node::new(c as i32, node.value));
                    cursors[c] += 1;
                }
            }
            nodes.push(Node::SENTINEL);
        }
    }
    Ok(SparseTensor3::from_segments_unchecked(
        AxisOrder3::Chw,
        t.dims(),
        nodes,
        segment_offsets,
    ))
}
