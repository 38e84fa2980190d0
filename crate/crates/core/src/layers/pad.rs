use super::feature::FeatureMap;
use crate::sparse::{AxisOrder3, DenseTensor3, Dims3, Node, SparseTensor3};
use crate::{Error, Result};

fn pad_dense(t: &DenseTensor3, p: usize) -> DenseTensor3 {
    let d = t.dims();
    let mut out = DenseTensor3::zeros(Dims3::new(d.c, d.h + 2 * p, d.w + 2 * p));
    for w in 0..d.w {
        for h in 0..d.h {
            let src = t.fiber(h, w);
            let dst = out.offset(0, h + p, w + p);
            out.data_mut()[dst..dst + d.c].copy_from_slice(src);
        }
    }
    out
}

fn pad_sparse(t: &SparseTensor3, p: usize) -> Result<SparseTensor3> {
    if t.order() != AxisOrder3::Chw {
        return Err(Error::format(format!(
            "sparse padding expects chw order, found {}",
            t.order().name()
        )));
    }
    let d = t.dims();
    let out_dims = Dims3::new(d.c, d.h + 2 * p, d.w + 2 * p);
    out_dims.check_index_range()?;
    let mut nodes = Vec::with_capacity(t.nodes().len() + 4 * p * (d.h + d.w + 2 * p));
    let mut offsets = Vec::with_capacity(out_dims.h * out_dims.w);
    for w in 0..out_dims.w {
        for h in 0..out_dims.h {
            offsets.push(nodes.len());
            let inside = (p..p + d.w).contains(&w) && (p..p + d.h).contains(&h);
            if inside {
                nodes.extend_from_slice(t.segment((w - p) * d.h + (h - p)));
            }
            nodes.push(Node::SENTINEL);
        }
    }
    Ok(SparseTensor3::from_segments_unchecked(
        AxisOrder3::Chw,
        out_dims,
        nodes,
        offsets,
    ))
}

/// Surrounds the spatial extent with `p` zeros on every side. Sparse
/// inputs stay sparse; only empty segments are added.
pub fn pad(t: &FeatureMap, p: usize) -> Result<FeatureMap> {
    Ok(match t {
        FeatureMap::Dense(d) => FeatureMap::Dense(pad_dense(d, p)),
        FeatureMap::Sparse(s) => FeatureMap::Sparse(pad_sparse(s, p)?),
    })
}
