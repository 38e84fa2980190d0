use super::exec::Executor;
use super::feature::FeatureMap;
use super::pool::{merged_conv_pool, PoolMode, PoolWindow};
use crate::kernels::{
    conv_dense_input_sparse_filter, conv_sparse_input_dense_filter, dense_conv_reference,
    sparse_filter_element, transpose_tensor3, ConvGeometry,
};
use crate::sparse::{AxisOrder3, DenseMatrix, DenseTensor3, Dims3, SparseTensor3, SparseTensor4};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConvParams {
    pub stride: usize,
    pub padding: usize,
}

impl ConvParams {
    pub fn new(stride: usize, padding: usize) -> Self {
        ConvParams { stride, padding }
    }
}

/// Value counts of a convolution output before any pooling or bias.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConvStats {
    pub elements: usize,
    pub nonzero: usize,
    pub positive: usize,
}

impl ConvStats {
    #[inline(always)]
    pub(crate) fn record(&mut self, x: f32) {
        self.elements += 1;
        self.nonzero += (x != 0.0) as usize;
        self.positive += (x > 0.0) as usize;
    }

    pub fn merge(&mut self, other: ConvStats) {
        self.elements += other.elements;
        self.nonzero += other.nonzero;
        self.positive += other.positive;
    }
}

#[derive(Clone, Debug)]
pub struct SparseConvOutput {
    /// Sparse `Chw` when every bias is zero, dense otherwise.
    pub output: FeatureMap,
    pub stats: ConvStats,
}

fn check_bias(bias: &[f32], filters: usize) -> Result<()> {
    if bias.len() != filters {
        return Err(Error::shape(format!(
            "{} biases for {filters} filters",
            bias.len()
        )));
    }
    Ok(())
}

fn sparse_bank_geometry(input: Dims3, filters: &SparseTensor4, params: ConvParams) -> Result<ConvGeometry> {
    if filters.order() != AxisOrder3::Chw {
        return Err(Error::format(format!(
            "filters must be stored in chw order, found {}",
            filters.order().name()
        )));
    }
    if filters.is_empty() {
        return Err(Error::shape("convolution needs at least one filter"));
    }
    ConvGeometry::new(input, filters.dims().inner(), params.stride, params.padding)
}

fn dense_bank_geometry(input: Dims3, filters: &[DenseTensor3], params: ConvParams) -> Result<ConvGeometry> {
    let first = filters
        .first()
        .ok_or_else(|| Error::shape("convolution needs at least one filter"))?
        .dims();
    if let Some((f, t)) = filters.iter().enumerate().find(|(_, t)| t.dims() != first) {
        return Err(Error::shape(format!(
            "filter {f} has dims {}, filter 0 has {first}",
            t.dims()
        )));
    }
    ConvGeometry::new(input, first, params.stride, params.padding)
}

/// Stacks per-filter output matrices as channels and adds the bias.
fn assemble(matrices: &[DenseMatrix], bias: &[f32], geom: &ConvGeometry) -> DenseTensor3 {
    let (n_h, n_w, n_f) = (geom.out_h(), geom.out_w(), matrices.len());
    let mut out = DenseTensor3::zeros(geom.output(n_f));
    let data = out.data_mut();
    for j in 0..n_w {
        for i in 0..n_h {
            let base = (j * n_h + i) * n_f;
            for (f, m) in matrices.iter().enumerate() {
                data[base + f] = m.data()[i * n_w + j] + bias[f];
            }
        }
    }
    out
}

/// Dense-input, sparse-filter convolution parallelized over filters: each
/// filter yields one output matrix, and the matrices are stacked and
/// transposed into the channel-innermost output.
pub fn conv_forward_strategy_i(
    input: &DenseTensor3,
    filters: &SparseTensor4,
    bias: &[f32],
    params: ConvParams,
    exec: &Executor,
) -> Result<DenseTensor3> {
    let geom = sparse_bank_geometry(input.dims(), filters, params)?;
    check_bias(bias, filters.len())?;
    let matrices = exec.try_map(filters.len(), |f| {
        conv_dense_input_sparse_filter(input, &filters.tensor(f), &geom)
    })?;
    Ok(assemble(&matrices, bias, &geom))
}

/// Dense-input, sparse-filter convolution writing the output tensor
/// directly, filters innermost. Runs on the calling thread; batches are
/// parallelized across instances instead. Produces exactly the same values
/// as [`conv_forward_strategy_i`].
pub fn conv_forward_strategy_ii(
    input: &DenseTensor3,
    filters: &SparseTensor4,
    bias: &[f32],
    params: ConvParams,
) -> Result<DenseTensor3> {
    let geom = sparse_bank_geometry(input.dims(), filters, params)?;
    check_bias(bias, filters.len())?;
    if input.dims() != geom.input() {
        return Err(Error::shape("input does not match geometry"));
    }
    let bank: Vec<_> = (0..filters.len()).map(|f| filters.tensor(f)).collect();
    let (n_h, n_w, n_f) = (geom.out_h(), geom.out_w(), bank.len());
    let mut out = DenseTensor3::zeros(geom.output(n_f));
    let data = out.data_mut();
    for j in 0..n_w {
        for i in 0..n_h {
            let base = (j * n_h + i) * n_f;
            for (f, filter) in bank.iter().enumerate() {
                data[base + f] = sparse_filter_element(input, filter, &geom, i, j, &mut ()) + bias[f];
            }
        }
    }
    Ok(out)
}

/// All-dense convolution, parallel over filters.
pub fn conv_forward_dense(
    input: &DenseTensor3,
    filters: &[DenseTensor3],
    bias: &[f32],
    params: ConvParams,
    exec: &Executor,
) -> Result<DenseTensor3> {
    let geom = dense_bank_geometry(input.dims(), filters, params)?;
    check_bias(bias, filters.len())?;
    let matrices = exec.try_map(filters.len(), |f| dense_conv_reference(input, &filters[f], &geom))?;
    Ok(assemble(&matrices, bias, &geom))
}

/// Sparse-input, dense-filter convolution, parallel over filters and
/// optionally fused with the following pooling layer.
///
/// Each filter produces a sparse `Wh` matrix; the matrices are stacked into
/// a `Whc` tensor and transposed to `Chw`. A nonzero bias fills in the
/// zeros, so the output is then returned dense. Fusion requires a zero bias.
pub fn conv_forward_sparse_input(
    input: &SparseTensor3,
    filters: &[DenseTensor3],
    bias: &[f32],
    params: ConvParams,
    pool: Option<(PoolWindow, PoolMode)>,
    exec: &Executor,
) -> Result<SparseConvOutput> {
    let geom = dense_bank_geometry(input.dims(), filters, params)?;
    check_bias(bias, filters.len())?;
    let has_bias = bias.iter().any(|&b| b != 0.0);
    if has_bias && pool.is_some() {
        return Err(Error::invalid("pooling can only be fused into a convolution without bias"));
    }
    let view = input.as_ref();
    let results = exec.try_map(filters.len(), |f| match pool {
        Some((window, mode)) => merged_conv_pool(&view, &filters[f], &geom, window, mode),
        None => {
            let m = conv_sparse_input_dense_filter(&view, &filters[f], &geom)?;
            let mut stats = ConvStats {
                elements: m.rows() * m.cols(),
                nonzero: m.nnz(),
                positive: 0,
            };
            stats.positive = m
                .nodes()
                .iter()
                .filter(|n| !n.is_sentinel() && n.value > 0.0)
                .count();
            Ok((m, stats))
        }
    })?;
    let mut stats = ConvStats::default();
    let mut matrices = Vec::with_capacity(results.len());
    for (m, s) in results {
        stats.merge(s);
        matrices.push(m);
    }
    let output = if has_bias {
        let dense: Vec<DenseMatrix> = matrices.iter().map(|m| m.to_dense()).collect();
        FeatureMap::Dense(assemble(&dense, bias, &geom))
    } else {
        FeatureMap::Sparse(transpose_tensor3(&SparseTensor3::stack_wh_matrices(matrices)?)?)
    };
    Ok(SparseConvOutput { output, stats })
}
