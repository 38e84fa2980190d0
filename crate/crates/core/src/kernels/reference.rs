use super::geometry::ConvGeometry;
use crate::sparse::{DenseMatrix, DenseTensor3};
use crate::{Error, Result};

/// Textbook dense cross-correlation (no filter flip), used as the
/// correctness oracle and as the dense baseline.
///
/// Accumulates in `f32` with loop order filter row `k`, filter column `l`,
/// channel `c` (innermost), starting from `0.0` for every output element.
pub fn dense_conv_reference(
    input: &DenseTensor3,
    filter: &DenseTensor3,
    geom: &ConvGeometry,
) -> Result<DenseMatrix> {
    if input.dims() != geom.input() || filter.dims() != geom.filter() {
        return Err(Error::shape(format!(
            "operands {} / {} do not match geometry {} / {}",
            input.dims(),
            filter.dims(),
            geom.input(),
            geom.filter()
        )));
    }
    let (fd, id) = (geom.filter(), geom.input());
    let (n_h, n_w) = (geom.out_h(), geom.out_w());
    let mut out = DenseMatrix::zeros(n_h, n_w);
    for i in 0..n_h {
        for j in 0..n_w {
            let mut x = 0.0f32;
            for k in 0..fd.h {
                let Some(h) = geom.source(k, i, id.h) else {
                    continue;
                };
                for l in 0..fd.w {
                    let Some(w) = geom.source(l, j, id.w) else {
                        continue;
                    };
                    let a = input.fiber(h, w);
                    let b = filter.fiber(k, l);
                    for c in 0..fd.c {
                        x += a[c] * b[c];
                    }
                }
            }
            out.set(i, j, x);
        }
    }
    Ok(out)
}
