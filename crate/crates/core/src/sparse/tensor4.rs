use super::dense::{DenseTensor3, Dims3};
use super::matrix::validate_segments;
use super::node::Node;
use super::order::AxisOrder3;
use super::tensor3::{append_sparsified, Tensor3Ref};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims4 {
    pub n: usize,
    pub c: usize,
    pub h: usize,
    pub w: usize,
}

impl Dims4 {
    pub fn inner(&self) -> Dims3 {
        Dims3::new(self.c, self.h, self.w)
    }

    pub fn len(&self) -> usize {
        self.n * self.inner().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A batch of inputs or a bank of filters: `n` sparse 3-D tensors sharing an
/// order tag and one node buffer. All offset tables are absolute positions
/// in that buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseTensor4 {
    order: AxisOrder3,
    dims: Dims4,
    nodes: Vec<Node>,
    tensor_offsets: Vec<usize>,
    matrix_offsets: Vec<usize>,
    segment_offsets: Vec<usize>,
}

impl SparseTensor4 {
    /// Sparsifies a list of equally shaped dense tensors.
    pub fn from_dense(tensors: &[DenseTensor3], order: AxisOrder3) -> Result<Self> {
        let inner = match tensors.first() {
            Some(t) => t.dims(),
            None => return Err(Error::shape("a 4-D tensor needs at least one 3-D tensor")),
        };
        inner.check_index_range()?;
        let mut nodes = Vec::new();
        let mut tensor_offsets = Vec::with_capacity(tensors.len());
        let mut matrix_offsets = Vec::new();
        let mut segment_offsets = Vec::new();
        for (i, t) in tensors.iter().enumerate() {
            if t.dims() != inner {
                return Err(Error::shape(format!(
                    "tensor {i} has dims {}, expected {inner}",
                    t.dims()
                )));
            }
            tensor_offsets.push(nodes.len());
            append_sparsified(
                t,
                order,
                &mut nodes,
                &mut matrix_offsets,
                &mut segment_offsets,
            );
        }
        Ok(SparseTensor4 {
            order,
            dims: Dims4 {
                n: tensors.len(),
                c: inner.c,
                h: inner.h,
                w: inner.w,
            },
            nodes,
            tensor_offsets,
            matrix_offsets,
            segment_offsets,
        })
    }

    pub fn order(&self) -> AxisOrder3 {
        self.order
    }

    pub fn dims(&self) -> Dims4 {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.n
    }

    pub fn is_empty(&self) -> bool {
        self.dims.n == 0
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn tensor_offsets(&self) -> &[usize] {
        &self.tensor_offsets
    }

    fn per_tensor(&self) -> (usize, usize) {
        let [_, middle, outer] = self.order.axes();
        let inner = self.dims.inner();
        let out_ext = inner.extent(outer);
        (out_ext, out_ext * inner.extent(middle))
    }

    /// View of constituent tensor `i`.
    pub fn tensor(&self, i: usize) -> Tensor3Ref<'_> {
        let (mats, segs) = self.per_tensor();
        Tensor3Ref {
            order: self.order,
            dims: self.dims.inner(),
            nodes: &self.nodes,
            matrix_offsets: &self.matrix_offsets[i * mats..(i + 1) * mats],
            segment_offsets: &self.segment_offsets[i * segs..(i + 1) * segs],
        }
    }

    pub fn nnz(&self) -> usize {
        self.nodes.len() - self.segment_offsets.len()
    }

    pub fn to_dense(&self) -> Vec<DenseTensor3> {
        (0..self.dims.n).map(|i| self.tensor(i).to_dense()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let inner = self.dims.inner();
        inner.check_index_range()?;
        let [idx_axis, _, _] = self.order.axes();
        let (mats, segs) = self.per_tensor();
        if self.tensor_offsets.len() != self.dims.n {
            return Err(Error::format(format!(
                "expected {} tensor offsets, found {}",
                self.dims.n,
                self.tensor_offsets.len()
            )));
        }
        validate_segments(
            &self.nodes,
            &self.segment_offsets,
            segs * self.dims.n,
            inner.extent(idx_axis),
        )?;
        if self.matrix_offsets.len() != mats * self.dims.n {
            return Err(Error::format("matrix offset table has the wrong length"));
        }
        let mid_ext = if mats == 0 { 0 } else { segs / mats };
        for (m, &off) in self.matrix_offsets.iter().enumerate() {
            if off != self.segment_offsets[m * mid_ext] {
                return Err(Error::format(format!("matrix {m} offset mismatch")));
            }
        }
        for (i, &off) in self.tensor_offsets.iter().enumerate() {
            if segs > 0 && off != self.segment_offsets[i * segs] {
                return Err(Error::format(format!("tensor {i} offset mismatch")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constituents_round_trip() {
        let filters: Vec<DenseTensor3> = (0..3)
            .map(|f| {
                DenseTensor3::from_fn(Dims3::new(2, 3, 3), |c, h, w| {
                    if (c + h + w + f) % 3 == 0 {
                        (f * 100 + c * 10 + h * 3 + w) as f32
                    } else {
                        0.0
                    }
                })
            })
            .collect();
        let t4 = SparseTensor4::from_dense(&filters, AxisOrder3::Chw).unwrap();
        t4.validate().unwrap();
        assert_eq!(t4.tensor_offsets().len(), 3);
        assert!(t4.tensor_offsets().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(t4.to_dense(), filters);
        let owned = t4.tensor(2).to_owned();
        owned.validate().unwrap();
        assert_eq!(owned.to_dense(), filters[2]);
        assert_eq!(
            t4.nnz(),
            filters.iter().map(DenseTensor3::nnz).sum::<usize>()
        );
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let a = DenseTensor3::zeros(Dims3::new(1, 2, 2));
        let b = DenseTensor3::zeros(Dims3::new(2, 2, 2));
        assert!(SparseTensor4::from_dense(&[a, b], AxisOrder3::Chw).is_err());
        assert!(SparseTensor4::from_dense(&[], AxisOrder3::Chw).is_err());
    }
}
