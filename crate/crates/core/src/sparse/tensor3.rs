use super::dense::{DenseTensor3, Dims3};
use super::matrix::{validate_segments, SparseMatrix};
use super::node::{segment_data, Node};
use super::order::{Axis, AxisOrder2, AxisOrder3};
use crate::{Error, Result};

/// Sparse 3-D tensor: a list of sparse matrices (one per outer-axis slice)
/// whose segments share one contiguous node buffer.
///
/// For [`AxisOrder3::Chw`] the segments are channel fibers, one per spatial
/// position, stored at segment index `w * H + h`. For [`AxisOrder3::Whc`]
/// the constituent matrices are per-channel `Wh` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseTensor3 {
    order: AxisOrder3,
    dims: Dims3,
    nodes: Vec<Node>,
    matrix_offsets: Vec<usize>,
    segment_offsets: Vec<usize>,
}

/// Borrowed view of one sparse 3-D tensor, either standalone or a
/// constituent of a [`SparseTensor4`](super::SparseTensor4). Offsets are
/// absolute positions in `nodes`.
#[derive(Clone, Copy, Debug)]
pub struct Tensor3Ref<'a> {
    pub(crate) order: AxisOrder3,
    pub(crate) dims: Dims3,
    pub(crate) nodes: &'a [Node],
    pub(crate) matrix_offsets: &'a [usize],
    pub(crate) segment_offsets: &'a [usize],
}

impl<'a> Tensor3Ref<'a> {
    pub fn order(&self) -> AxisOrder3 {
        self.order
    }

    pub fn dims(&self) -> Dims3 {
        self.dims
    }

    pub fn segment_count(&self) -> usize {
        self.segment_offsets.len()
    }

    /// Nodes from the start of segment `s` onwards; iteration stops at the
    /// first sentinel.
    #[inline]
    pub fn segment_from(&self, s: usize) -> &'a [Node] {
        &self.nodes[self.segment_offsets[s]..]
    }

    /// Data nodes of segment `s` (sentinel excluded).
    pub fn segment(&self, s: usize) -> &'a [Node] {
        segment_data(self.segment_from(s))
    }

    /// Channel fiber at spatial `(h, w)`; only meaningful for `Chw`.
    #[inline]
    pub fn fiber_from(&self, h: usize, w: usize) -> &'a [Node] {
        debug_assert_eq!(self.order, AxisOrder3::Chw);
        self.segment_from(w * self.dims.h + h)
    }

    pub fn nnz(&self) -> usize {
        (0..self.segment_count()).map(|s| self.segment(s).len()).sum()
    }

    pub fn to_dense(&self) -> DenseTensor3 {
        let [inner, middle, outer] = self.order.axes();
        let mid_ext = self.dims.extent(middle);
        let mut out = DenseTensor3::zeros(self.dims);
        for s in 0..self.segment_count() {
            let (o, m) = (s / mid_ext, s % mid_ext);
            for node in self.segment(s) {
                let mut coord = [0usize; 3];
                coord[axis_slot(inner)] = node.index as usize;
                coord[axis_slot(middle)] = m;
                coord[axis_slot(outer)] = o;
                out.set(coord[0], coord[1], coord[2], node.value);
            }
        }
        out
    }

    pub fn to_owned(&self) -> SparseTensor3 {
        let start = self.segment_offsets.first().copied().unwrap_or(0);
        let end = match self.segment_offsets.last() {
            Some(&last) => last + segment_data(&self.nodes[last..]).len() + 1,
            None => start,
        };
        SparseTensor3 {
            order: self.order,
            dims: self.dims,
            nodes: self.nodes[start..end].to_vec(),
            matrix_offsets: self.matrix_offsets.iter().map(|o| o - start).collect(),
            segment_offsets: self.segment_offsets.iter().map(|o| o - start).collect(),
        }
    }
}

#[inline]
fn axis_slot(axis: Axis) -> usize {
    match axis {
        Axis::C => 0,
        Axis::H => 1,
        Axis::W => 2,
    }
}

/// Appends the nodes of `t` in `order` to `nodes`, recording offsets.
pub(crate) fn append_sparsified(
    t: &DenseTensor3,
    order: AxisOrder3,
    nodes: &mut Vec<Node>,
    matrix_offsets: &mut Vec<usize>,
    segment_offsets: &mut Vec<usize>,
) {
    let dims = t.dims();
    let [inner, middle, outer] = order.axes();
    let (in_ext, mid_ext, out_ext) = (
        dims.extent(inner),
        dims.extent(middle),
        dims.extent(outer),
    );
    let mut coord = [0usize; 3];
    for o in 0..out_ext {
        matrix_offsets.push(nodes.len());
        coord[axis_slot(outer)] = o;
        for m in 0..mid_ext {
            segment_offsets.push(nodes.len());
            coord[axis_slot(middle)] = m;
            for i in 0..in_ext {
                coord[axis_slot(inner)] = i;
                let v = t.get(coord[0], coord[1], coord[2]);
                if v != 0.0 {
                    nodes.push(Node::new(i as i32, v));
                }
            }
            nodes.push(Node::SENTINEL);
        }
    }
}

impl SparseTensor3 {
    /// Keeps exactly the nonzero entries of `t`, stored in `order`.
    /// Negative zero counts as zero.
    pub fn from_dense(t: &DenseTensor3, order: AxisOrder3) -> Result<Self> {
        t.dims().check_index_range()?;
        let mut nodes = Vec::new();
        let mut matrix_offsets = Vec::new();
        let mut segment_offsets = Vec::new();
        append_sparsified(
            t,
            order,
            &mut nodes,
            &mut matrix_offsets,
            &mut segment_offsets,
        );
        Ok(SparseTensor3 {
            order,
            dims: t.dims(),
            nodes,
            matrix_offsets,
            segment_offsets,
        })
    }

    /// Tensor with no data nodes.
    pub fn zeros(dims: Dims3, order: AxisOrder3) -> Self {
        let [_, middle, outer] = order.axes();
        let (mid_ext, out_ext) = (dims.extent(middle), dims.extent(outer));
        let segments = mid_ext * out_ext;
        SparseTensor3 {
            order,
            dims,
            nodes: vec![Node::SENTINEL; segments],
            matrix_offsets: (0..out_ext).map(|o| o * mid_ext).collect(),
            segment_offsets: (0..segments).collect(),
        }
    }

    /// Assembles a tensor from raw parts and validates it.
    pub fn from_parts(
        order: AxisOrder3,
        dims: Dims3,
        nodes: Vec<Node>,
        matrix_offsets: Vec<usize>,
        segment_offsets: Vec<usize>,
    ) -> Result<Self> {
        let t = SparseTensor3 {
            order,
            dims,
            nodes,
            matrix_offsets,
            segment_offsets,
        };
        t.validate()?;
        Ok(t)
    }

    /// Assembles a tensor whose segment table is known to be well formed;
    /// the matrix table is derived from it.
    pub(crate) fn from_segments_unchecked(
        order: AxisOrder3,
        dims: Dims3,
        nodes: Vec<Node>,
        segment_offsets: Vec<usize>,
    ) -> Self {
        let mid_ext = dims.extent(order.axes()[1]);
        let matrix_offsets = segment_offsets.iter().step_by(mid_ext.max(1)).copied().collect();
        let t = SparseTensor3 {
            order,
            dims,
            nodes,
            matrix_offsets,
            segment_offsets,
        };
        debug_assert!(t.validate().is_ok(), "{:?}", t.validate());
        t
    }

    /// Stacks per-channel `Wh` matrices (all `H x W`) into a `Whc` tensor
    /// with one channel per matrix.
    pub fn stack_wh_matrices(matrices: Vec<SparseMatrix>) -> Result<Self> {
        let (rows, cols) = match matrices.first() {
            Some(m) => (m.rows(), m.cols()),
            None => return Err(Error::shape("cannot stack an empty matrix list")),
        };
        let total: usize = matrices.iter().map(|m| m.nodes().len()).sum();
        let mut nodes = Vec::with_capacity(total);
        let mut matrix_offsets = Vec::with_capacity(matrices.len());
        let mut segment_offsets = Vec::with_capacity(matrices.len() * rows);
        let channels = matrices.len();
        for (i, m) in matrices.into_iter().enumerate() {
            if m.order() != AxisOrder2::Wh || m.rows() != rows || m.cols() != cols {
                return Err(Error::shape(format!(
                    "matrix {i} is {:?} {}x{}, expected Wh {rows}x{cols}",
                    m.order(),
                    m.rows(),
                    m.cols()
                )));
            }
            let base = nodes.len();
            matrix_offsets.push(base);
            let (mn, mo) = m.into_parts();
            segment_offsets.extend(mo.into_iter().map(|o| o + base));
            nodes.extend(mn);
        }
        Ok(SparseTensor3 {
            order: AxisOrder3::Whc,
            dims: Dims3::new(channels, rows, cols),
            nodes,
            matrix_offsets,
            segment_offsets,
        })
    }

    pub fn as_ref(&self) -> Tensor3Ref<'_> {
        Tensor3Ref {
            order: self.order,
            dims: self.dims,
            nodes: &self.nodes,
            matrix_offsets: &self.matrix_offsets,
            segment_offsets: &self.segment_offsets,
        }
    }

    pub fn to_dense(&self) -> DenseTensor3 {
        self.as_ref().to_dense()
    }

    pub fn order(&self) -> AxisOrder3 {
        self.order
    }

    pub fn dims(&self) -> Dims3 {
        self.dims
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn matrix_offsets(&self) -> &[usize] {
        &self.matrix_offsets
    }

    pub fn segment_offsets(&self) -> &[usize] {
        &self.segment_offsets
    }

    pub fn segment_count(&self) -> usize {
        self.segment_offsets.len()
    }

    pub fn segment(&self, s: usize) -> &[Node] {
        self.as_ref().segment(s)
    }

    /// Number of data nodes.
    pub fn nnz(&self) -> usize {
        self.nodes.len() - self.segment_offsets.len()
    }

    /// Constituent matrix `m` as a standalone sparse matrix. Only the two
    /// orders whose matrices are height/width planes are supported.
    pub fn matrix(&self, m: usize) -> Result<SparseMatrix> {
        let (order2, rows, cols) = match self.order {
            AxisOrder3::Whc => (AxisOrder2::Wh, self.dims.h, self.dims.w),
            AxisOrder3::Hwc => (AxisOrder2::Hw, self.dims.h, self.dims.w),
            o => {
                return Err(Error::format(format!(
                    "order {} has no height/width matrices",
                    o.name()
                )))
            }
        };
        let mid_ext = self.dims.extent(self.order.axes()[1]);
        let segs = &self.segment_offsets[m * mid_ext..(m + 1) * mid_ext];
        let start = segs[0];
        let end = self
            .matrix_offsets
            .get(m + 1)
            .copied()
            .unwrap_or(self.nodes.len());
        Ok(SparseMatrix::from_parts_unchecked(
            order2,
            rows,
            cols,
            self.nodes[start..end].to_vec(),
            segs.iter().map(|o| o - start).collect(),
        ))
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        self.dims.check_index_range()?;
        let [inner, middle, outer] = self.order.axes();
        let (mid_ext, out_ext) = (self.dims.extent(middle), self.dims.extent(outer));
        validate_segments(
            &self.nodes,
            &self.segment_offsets,
            mid_ext * out_ext,
            self.dims.extent(inner),
        )?;
        if self.matrix_offsets.len() != out_ext {
            return Err(Error::format(format!(
                "expected {out_ext} matrix offsets, found {}",
                self.matrix_offsets.len()
            )));
        }
        for (m, &off) in self.matrix_offsets.iter().enumerate() {
            if off != self.segment_offsets[m * mid_ext] {
                return Err(Error::format(format!(
                    "matrix {m} offset {off} does not match its first segment"
                )));
            }
        }
        Ok(())
    }
}
