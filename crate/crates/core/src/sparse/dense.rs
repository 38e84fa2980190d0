use super::order::Axis;
use crate::{Error, Result};

/// Extents of a 3-D tensor: channels, height, width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims3 {
    pub c: usize,
    pub h: usize,
    pub w: usize,
}

impl Dims3 {
    pub const fn new(c: usize, h: usize, w: usize) -> Self {
        Dims3 { c, h, w }
    }

    pub fn len(&self) -> usize {
        self.c * self.h * self.w
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn extent(&self, axis: Axis) -> usize {
        match axis {
            Axis::C => self.c,
            Axis::H => self.h,
            Axis::W => self.w,
        }
    }

    /// Rejects extents the 32-bit node index cannot address.
    pub(crate) fn check_index_range(&self) -> Result<()> {
        let max = i32::MAX as usize;
        if self.c > max || self.h > max || self.w > max {
            return Err(Error::shape(format!("extent too large for i32 indices: {self}")));
        }
        Ok(())
    }
}

impl std::fmt::Display for Dims3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.c, self.h, self.w)
    }
}

/// Dense 3-D tensor with channel-innermost layout: element `(c, h, w)` lives
/// at `(w * H + h) * C + c`, so every channel fiber is contiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor3 {
    dims: Dims3,
    data: Vec<f32>,
}

impl DenseTensor3 {
    pub fn zeros(dims: Dims3) -> Self {
        DenseTensor3 {
            dims,
            data: vec![0.0; dims.len()],
        }
    }

    pub fn from_vec(dims: Dims3, data: Vec<f32>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::shape(format!(
                "dense tensor {dims} needs {} values, got {}",
                dims.len(),
                data.len()
            )));
        }
        Ok(DenseTensor3 { dims, data })
    }

    /// Builds from a closure over `(c, h, w)`.
    pub fn from_fn(dims: Dims3, mut f: impl FnMut(usize, usize, usize) -> f32) -> Self {
        let mut data = Vec::with_capacity(dims.len());
        for w in 0..dims.w {
            for h in 0..dims.h {
                for c in 0..dims.c {
                    data.push(f(c, h, w));
                }
            }
        }
        DenseTensor3 { dims, data }
    }

    #[inline]
    pub fn dims(&self) -> Dims3 {
        self.dims
    }

    #[inline]
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    #[inline]
    pub fn offset(&self, c: usize, h: usize, w: usize) -> usize {
        (w * self.dims.h + h) * self.dims.c + c
    }

    #[inline]
    pub fn get(&self, c: usize, h: usize, w: usize) -> f32 {
        self.data[self.offset(c, h, w)]
    }

    #[inline]
    pub fn set(&mut self, c: usize, h: usize, w: usize, value: f32) {
        let i = self.offset(c, h, w);
        self.data[i] = value;
    }

    /// Contiguous channel fiber at spatial position `(h, w)`.
    #[inline]
    pub fn fiber(&self, h: usize, w: usize) -> &[f32] {
        let start = (w * self.dims.h + h) * self.dims.c;
        &self.data[start..start + self.dims.c]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|v| **v != 0.0).count()
    }
}

/// Dense row-major matrix: `rows` along height, `cols` along width. Row-major
/// is the dense analogue of the `Wh` order (width innermost).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f32) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f32] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }
}
