use super::dot::{dot_counted, MulCounter};
use super::geometry::ConvGeometry;
use crate::sparse::{AxisOrder2, AxisOrder3, DenseMatrix, DenseTensor3, Node, SparseMatrix, Tensor3Ref};
use crate::{Error, Result};

fn check_sparse_operand(t: &Tensor3Ref<'_>, expected: crate::sparse::Dims3, what: &str) -> Result<()> {
    if t.order() != AxisOrder3::Chw {
        return Err(Error::format(format!(
            "{what} must be stored in chw order, found {}",
            t.order().name()
        )));
    }
    if t.dims() != expected {
        return Err(Error::shape(format!(
            "{what} has dims {}, geometry expects {expected}",
            t.dims()
        )));
    }
    Ok(())
}

fn check_dense_operand(t: &DenseTensor3, expected: crate::sparse::Dims3, what: &str) -> Result<()> {
    if t.dims() != expected {
        return Err(Error::shape(format!(
            "{what} has dims {}, geometry expects {expected}",
            t.dims()
        )));
    }
    Ok(())
}

/// Output element `(i, j)` of a dense-input/sparse-filter convolution.
///
/// Accumulation order is fixed: filter width offset `l` outer, height
/// offset `k` inner, stored channel nodes innermost; each fiber's partial
/// sum is added to the running total.
#[inline(always)]
pub(crate) fn sparse_filter_element<C: MulCounter>(
    input: &DenseTensor3,
    filter: &Tensor3Ref<'_>,
    geom: &ConvGeometry,
    i: usize,
    j: usize,
    counter: &mut C,
) -> f32 {
    let (fd, id) = (geom.filter(), geom.input());
    let mut x = 0.0f32;
    for l in 0..fd.w {
        let Some(w) = geom.source(l, j, id.w) else {
            continue;
        };
        for k in 0..fd.h {
            let Some(h) = geom.source(k, i, id.h) else {
                continue;
            };
            x += dot_counted(input.fiber(h, w), filter.fiber_from(k, l), counter);
        }
    }
    x
}

/// Output element `(i, j)` of a sparse-input/dense-filter convolution, in
/// the same loop order as [`sparse_filter_element`].
#[inline(always)]
pub(crate) fn sparse_input_element(
    input: &Tensor3Ref<'_>,
    filter: &DenseTensor3,
    geom: &ConvGeometry,
    i: usize,
    j: usize,
) -> f32 {
    let (fd, id) = (geom.filter(), geom.input());
    let mut x = 0.0f32;
    for l in 0..fd.w {
        let Some(w) = geom.source(l, j, id.w) else {
            continue;
        };
        for k in 0..fd.h {
            let Some(h) = geom.source(k, i, id.h) else {
                continue;
            };
            x += dot_counted(filter.fiber(k, l), input.fiber_from(h, w), &mut ());
        }
    }
    x
}

fn sparse_filter_impl<C: MulCounter>(
    input: &DenseTensor3,
    filter: &Tensor3Ref<'_>,
    geom: &ConvGeometry,
    counter: &mut C,
) -> Result<DenseMatrix> {
    check_dense_operand(input, geom.input(), "input")?;
    check_sparse_operand(filter, geom.filter(), "filter")?;
    let (n_h, n_w) = (geom.out_h(), geom.out_w());
    let mut out = DenseMatrix::zeros(n_h, n_w);
    let data = out.data_mut();
    for i in 0..n_h {
        for j in 0..n_w {
            data[i * n_w + j] = sparse_filter_element(input, filter, geom, i, j, counter);
        }
    }
    Ok(out)
}

/// Convolves a dense input with one sparse `Chw` filter. The result is a
/// dense `n_h x n_w` matrix (row-major, i.e. `Wh`).
pub fn conv_dense_input_sparse_filter(
    input: &DenseTensor3,
    filter: &Tensor3Ref<'_>,
    geom: &ConvGeometry,
) -> Result<DenseMatrix> {
    sparse_filter_impl(input, filter, geom, &mut ())
}

/// [`conv_dense_input_sparse_filter`] that also returns the number of
/// multiplications performed.
pub fn conv_dense_input_sparse_filter_counted(
    input: &DenseTensor3,
    filter: &Tensor3Ref<'_>,
    geom: &ConvGeometry,
) -> Result<(DenseMatrix, u64)> {
    let mut muls = 0u64;
    let m = sparse_filter_impl(input, filter, geom, &mut muls)?;
    Ok((m, muls))
}

/// Convolves a sparse `Chw` input with one dense filter. The result is a
/// sparse `Wh` matrix: one segment per output row, exact zeros dropped.
pub fn conv_sparse_input_dense_filter(
    input: &Tensor3Ref<'_>,
    filter: &DenseTensor3,
    geom: &ConvGeometry,
) -> Result<SparseMatrix> {
    check_sparse_operand(input, geom.input(), "input")?;
    check_dense_operand(filter, geom.filter(), "filter")?;
    let (n_h, n_w) = (geom.out_h(), geom.out_w());
    let mut nodes = Vec::new();
    let mut offsets = Vec::with_capacity(n_h);
    for i in 0..n_h {
        offsets.push(nodes.len());
        for j in 0..n_w {
            let x = sparse_input_element(input, filter, geom, i, j);
            if x != 0.0 {
                nodes.push(Node::new(j as i32, x));
            }
        }
        nodes.push(Node::SENTINEL);
    }
    Ok(SparseMatrix::from_parts_unchecked(
        AxisOrder2::Wh,
        n_h,
        n_w,
        nodes,
        offsets,
    ))
}
