use crate::sparse::Dims3;
use crate::{Error, Result};

/// Shapes and hyper-parameters of one input/filter convolution.
///
/// Padding is symmetric zero padding on height and width and is never
/// materialized: window positions outside the input contribute nothing.
/// Output extents use floor division, so trailing positions that do not fit
/// a whole stride are dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvGeometry {
    input: Dims3,
    filter: Dims3,
    stride: usize,
    padding: usize,
}

impl ConvGeometry {
    pub fn new(input: Dims3, filter: Dims3, stride: usize, padding: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::invalid("stride must be positive"));
        }
        if input.c != filter.c {
            return Err(Error::shape(format!(
                "input has {} channels but filter has {}",
                input.c, filter.c
            )));
        }
        if filter.h == 0 || filter.w == 0 {
            return Err(Error::shape("filter extents must be positive"));
        }
        if filter.h > input.h + 2 * padding || filter.w > input.w + 2 * padding {
            return Err(Error::shape(format!(
                "filter {filter} does not fit input {input} with padding {padding}"
            )));
        }
        Ok(ConvGeometry {
            input,
            filter,
            stride,
            padding,
        })
    }

    pub fn input(&self) -> Dims3 {
        self.input
    }

    pub fn filter(&self) -> Dims3 {
        self.filter
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn padding(&self) -> usize {
        self.padding
    }

    /// Output rows: `(H_I + 2P - H_F) / S + 1`.
    pub fn out_h(&self) -> usize {
        (self.input.h + 2 * self.padding - self.filter.h) / self.stride + 1
    }

    /// Output columns: `(W_I + 2P - W_F) / S + 1`.
    pub fn out_w(&self) -> usize {
        (self.input.w + 2 * self.padding - self.filter.w) / self.stride + 1
    }

    /// Output dims of a layer applying `filters` such filters.
    pub fn output(&self, filters: usize) -> Dims3 {
        Dims3::new(filters, self.out_h(), self.out_w())
    }

    /// Input coordinate touched by filter offset `k` at output position
    /// `i`, or `None` inside the padding.
    #[inline]
    pub(crate) fn source(&self, k: usize, i: usize, extent: usize) -> Option<usize> {
        (k + i * self.stride)
            .checked_sub(self.padding)
            .filter(|&x| x < extent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_extents() {
        let g = ConvGeometry::new(Dims3::new(1, 5, 5), Dims3::new(1, 3, 3), 1, 0).unwrap();
        assert_eq!((g.out_h(), g.out_w()), (3, 3));
        let g = ConvGeometry::new(Dims3::new(4, 32, 32), Dims3::new(4, 3, 3), 1, 1).unwrap();
        assert_eq!((g.out_h(), g.out_w()), (32, 32));
        // remainder dropped: (8 + 0 - 3) / 2 + 1 = 3
        let g = ConvGeometry::new(Dims3::new(1, 8, 7), Dims3::new(1, 3, 3), 2, 0).unwrap();
        assert_eq!((g.out_h(), g.out_w()), (3, 3));
    }

    #[test]
    fn rejects_invalid_configurations() {
        let i = Dims3::new(2, 4, 4);
        assert!(ConvGeometry::new(i, Dims3::new(3, 3, 3), 1, 0).is_err());
        assert!(ConvGeometry::new(i, Dims3::new(2, 3, 3), 0, 0).is_err());
        assert!(ConvGeometry::new(i, Dims3::new(2, 5, 5), 1, 0).is_err());
        assert!(ConvGeometry::new(i, Dims3::new(2, 5, 5), 1, 1).is_ok());
    }

    #[test]
    fn source_skips_padding() {
        let g = ConvGeometry::new(Dims3::new(1, 3, 3), Dims3::new(1, 3, 3), 1, 1).unwrap();
        assert_eq!(g.source(0, 0, 3), None);
        assert_eq!(g.source(1, 0, 3), Some(0));
        assert_eq!(g.source(2, 2, 3), None);
    }
}
