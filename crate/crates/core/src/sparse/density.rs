use super::dense::DenseTensor3;
use super::tensor3::{SparseTensor3, Tensor3Ref};
use super::tensor4::SparseTensor4;

/// Fraction of nonzero entries.
pub trait Density {
    fn nonzeros(&self) -> usize;
    fn total(&self) -> usize;

    fn density(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.nonzeros() as f64 / n as f64,
        }
    }
}

impl Density for DenseTensor3 {
    fn nonzeros(&self) -> usize {
        self.nnz()
    }

    fn total(&self) -> usize {
        self.dims().len()
    }
}

impl Density for SparseTensor3 {
    fn nonzeros(&self) -> usize {
        self.nnz()
    }

    fn total(&self) -> usize {
        self.dims().len()
    }
}

impl Density for Tensor3Ref<'_> {
    fn nonzeros(&self) -> usize {
        self.nnz()
    }

    fn total(&self) -> usize {
        self.dims().len()
    }
}

impl Density for SparseTensor4 {
    fn nonzeros(&self) -> usize {
        self.nnz()
    }

    fn total(&self) -> usize {
        self.dims().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{AxisOrder3, Dims3};

    #[test]
    fn extremes() {
        let z = DenseTensor3::zeros(Dims3::new(2, 3, 4));
        assert_eq!(z.density(), 0.0);
        let ones = DenseTensor3::from_fn(Dims3::new(2, 3, 4), |_, _, _| 1.0);
        assert_eq!(ones.density(), 1.0);
        assert_eq!(SparseTensor3::from_dense(&ones, AxisOrder3::Chw).unwrap().density(), 1.0);
    }

    #[test]
    fn counts_kept_entries() {
        // keep positions congruent to 5 mod 10: 51 of 512
        let dims = Dims3::new(8, 8, 8);
        let t = DenseTensor3::from_fn(dims, |c, h, w| {
            if (w * 64 + h * 8 + c) % 10 == 5 {
                1.5
            } else {
                0.0
            }
        });
        let expected = (0..512).filter(|i| i % 10 == 5).count();
        assert_eq!(expected, 51);
        assert_eq!(t.density(), 51.0 / 512.0);
        let s = SparseTensor3::from_dense(&t, AxisOrder3::Whc).unwrap();
        assert_eq!(s.density(), 51.0 / 512.0);
    }
}
