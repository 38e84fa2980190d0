use super::feature::FeatureMap;
use crate::sparse::DenseTensor3;
use crate::{Error, Result};

/// Per-channel inference-time batch normalization parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchNormParams {
    pub scale: Vec<f32>,
    pub shift: Vec<f32>,
    pub mean: Vec<f32>,
    pub var: Vec<f32>,
    pub epsilon: f32,
}

impl BatchNormParams {
    /// Parameters that leave the input unchanged (up to rounding).
    pub fn identity(channels: usize) -> Self {
        BatchNormParams {
            scale: vec![1.0; channels],
            shift: vec![0.0; channels],
            mean: vec![0.0; channels],
            var: vec![1.0; channels],
            epsilon: 0.0,
        }
    }

    pub fn channels(&self) -> usize {
        self.scale.len()
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.scale.len();
        if self.shift.len() != c || self.mean.len() != c || self.var.len() != c {
            return Err(Error::shape(format!(
                "batch norm arrays have lengths {}/{}/{}/{}",
                c,
                self.shift.len(),
                self.mean.len(),
                self.var.len()
            )));
        }
        if let Some((i, v)) = self.var.iter().enumerate().find(|(_, &v)| !(v + self.epsilon > 0.0)) {
            return Err(Error::invalid(format!(
                "channel {i}: variance {v} plus epsilon {} is not positive",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// `x <- scale * (x - mean) / sqrt(var + eps) + shift` per channel. The
/// result is dense: normalization maps zeros to nonzero values.
pub fn apply_batchnorm(t: FeatureMap, params: &BatchNormParams) -> Result<DenseTensor3> {
    params.validate()?;
    let mut d = t.into_dense();
    let c = d.dims().c;
    if params.channels() != c {
        return Err(Error::shape(format!(
            "batch norm has {} channels, input has {c}",
            params.channels()
        )));
    }
    let denom: Vec<f32> = params.var.iter().map(|v| (v + params.epsilon).sqrt()).collect();
    if c > 0 {
        for fiber in d.data_mut().chunks_exact_mut(c) {
            for (ch, x) in fiber.iter_mut().enumerate() {
                *x = params.scale[ch] * (*x - params.mean[ch]) / denom[ch] + params.shift[ch];
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{AxisOrder3, Dims3, SparseTensor3};

    #[test]
    fn normalizes_per_channel() {
        let t = DenseTensor3::from_fn(Dims3::new(2, 1, 2), |c, _, w| (c * 10 + w) as f32);
        let p = BatchNormParams {
            scale: vec![2.0, 1.0],
            shift: vec![1.0, -1.0],
            mean: vec![0.0, 10.0],
            var: vec![4.0, 1.0],
            epsilon: 0.0,
        };
        let out = apply_batchnorm(FeatureMap::Dense(t), &p).unwrap();
        assert_eq!(out.get(0, 0, 1), 2.0);
        assert_eq!(out.get(1, 0, 0), -1.0);
        assert_eq!(out.get(1, 0, 1), 0.0);
    }

    #[test]
    fn sparse_input_is_densified() {
        let t = DenseTensor3::from_fn(Dims3::new(1, 2, 2), |_, h, w| if h == w { 1.0 } else { 0.0 });
        let s = SparseTensor3::from_dense(&t, AxisOrder3::Chw).unwrap();
        let mut p = BatchNormParams::identity(1);
        p.shift[0] = 0.5;
        let out = apply_batchnorm(FeatureMap::Sparse(s), &p).unwrap();
        assert_eq!(out.data(), &[1.5, 0.5, 0.5, 1.5]);
    }

    #[test]
    fn rejects_bad_params() {
        let t = FeatureMap::Dense(DenseTensor3::zeros(Dims3::new(2, 1, 1)));
        assert!(apply_batchnorm(t.clone(), &BatchNormParams::identity(3)).is_err());
        let mut p = BatchNormParams::identity(2);
        p.var[1] = 0.0;
        assert!(apply_batchnorm(t.clone(), &p).is_err());
        p.var[1] = 1.0;
        p.mean.pop();
        assert!(apply_batchnorm(t, &p).is_err());
    }
}
