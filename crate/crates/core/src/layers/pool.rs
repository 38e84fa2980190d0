use super::conv::ConvStats;
use crate::kernels::{sparse_input_element, ConvGeometry};
use crate::sparse::{AxisOrder2, AxisOrder3, DenseTensor3, Dims3, Node, SparseMatrix, Tensor3Ref};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PoolMode {
    Max,
    Avg,
}

/// Non-overlapping pooling window; the stride equals the window size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoolWindow {
    pub h: usize,
    pub w: usize,
}

impl PoolWindow {
    pub fn square(k: usize) -> Self {
        PoolWindow { h: k, w: k }
    }

    /// Output dims; the window must tile the spatial extents exactly.
    pub fn output_dims(&self, input: Dims3) -> Result<Dims3> {
        self.check(input.h, input.w)?;
        Ok(Dims3::new(input.c, input.h / self.h, input.w / self.w))
    }

    fn check(&self, h: usize, w: usize) -> Result<()> {
        if self.h == 0 || self.w == 0 {
            return Err(Error::shape("pooling window must be non-empty"));
        }
        if h % self.h != 0 || w % self.w != 0 {
            return Err(Error::shape(format!(
                "pooling window {}x{} does not tile {h}x{w}",
                self.h, self.w
            )));
        }
        Ok(())
    }
}

impl PoolMode {
    #[inline(always)]
    fn init(self) -> f32 {
        match self {
            PoolMode::Max => f32::NEG_INFINITY,
            PoolMode::Avg => 0.0,
        }
    }

    #[inline(always)]
    fn fold(self, acc: &mut f32, x: f32) {
        match self {
            PoolMode::Max => {
                if x > *acc {
                    *acc = x;
                }
            }
            PoolMode::Avg => *acc += x,
        }
    }

    #[inline(always)]
    fn finish(self, acc: f32, window: PoolWindow) -> f32 {
        match self {
            PoolMode::Max => acc,
            PoolMode::Avg => acc / (window.h * window.w) as f32,
        }
    }
}

/// Pools every channel of a dense tensor. Window elements are visited row
/// by row, so averages sum in the same order as [`merged_conv_pool`].
pub fn pool_standalone(t: &DenseTensor3, window: PoolWindow, mode: PoolMode) -> Result<DenseTensor3> {
    let d = t.dims();
    let out_dims = window.output_dims(d)?;
    let mut out = DenseTensor3::zeros(out_dims);
    for ow in 0..out_dims.w {
        for oh in 0..out_dims.h {
            for c in 0..d.c {
                let mut acc = mode.init();
                for dh in 0..window.h {
                    for dw in 0..window.w {
                        mode.fold(&mut acc, t.get(c, oh * window.h + dh, ow * window.w + dw));
                    }
                }
                out.set(c, oh, ow, mode.finish(acc, window));
            }
        }
    }
    Ok(out)
}

/// Convolves a sparse `Chw` input with one dense filter and pools the
/// result without materializing the convolution output.
///
/// A single row of running pool values is kept; it is flushed into a
/// segment of the output `Wh` matrix after every `window.h` convolution
/// rows. The returned stats describe the convolution values before pooling.
pub fn merged_conv_pool(
    input: &Tensor3Ref<'_>,
    filter: &DenseTensor3,
    geom: &ConvGeometry,
    window: PoolWindow,
    mode: PoolMode,
) -> Result<(SparseMatrix, ConvStats)> {
    if input.order() != AxisOrder3::Chw {
        return Err(Error::format(format!(
            "input must be stored in chw order, found {}",
            input.order().name()
        )));
    }
    if input.dims() != geom.input() || filter.dims() != geom.filter() {
        return Err(Error::shape(format!(
            "operands {} / {} do not match geometry {} / {}",
            input.dims(),
            filter.dims(),
            geom.input(),
            geom.filter()
        )));
    }
    let (n_h, n_w) = (geom.out_h(), geom.out_w());
    window.check(n_h, n_w)?;
    let pooled_w = n_w / window.w;
    let mut track = vec![mode.init(); pooled_w];
    let mut stats = ConvStats::default();
    let mut nodes = Vec::new();
    let mut offsets = Vec::with_capacity(n_h / window.h);
    for i in 0..n_h {
        for j in 0..n_w {
            let x = sparse_input_element(input, filter, geom, i, j);
            stats.record(x);
            mode.fold(&mut track[j / window.w], x);
        }
        if (i + 1) % window.h == 0 {
            offsets.push(nodes.len());
            for (jp, acc) in track.iter_mut().enumerate() {
                let v = mode.finish(*acc, window);
                if v != 0.0 {
                    nodes.push(Node::new(jp as i32, v));
                }
                *acc = mode.init();
            }
            nodes.push(Node::SENTINEL);
        }
    }
    Ok((
        SparseMatrix::from_parts_unchecked(AxisOrder2::Wh, n_h / window.h, pooled_w, nodes, offsets),
        stats,
    ))
}
