use super::pool::{PoolMode, PoolWindow};
use crate::kernels::ConvGeometry;
use crate::sparse::Dims3;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvSpec {
    pub out_channels: usize,
    pub kernel_h: usize,
    pub kernel_w: usize,
    pub stride: usize,
    pub padding: usize,
}

impl ConvSpec {
    pub fn square(out_channels: usize, kernel: usize, stride: usize, padding: usize) -> Self {
        ConvSpec {
            out_channels,
            kernel_h: kernel,
            kernel_w: kernel,
            stride,
            padding,
        }
    }

    pub fn filter_dims(&self, in_channels: usize) -> Dims3 {
        Dims3::new(in_channels, self.kernel_h, self.kernel_w)
    }

    pub fn geometry(&self, input: Dims3) -> Result<ConvGeometry> {
        ConvGeometry::new(input, self.filter_dims(input.c), self.stride, self.padding)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ActivationKind {
    Relu,
    LeakyRelu { slope: f32 },
}

impl ActivationKind {
    /// Whether a nonzero input can map to zero (ReLU, or leaky with slope 0).
    pub fn drops_negatives(&self) -> bool {
        match self {
            ActivationKind::Relu => true,
            ActivationKind::LeakyRelu { slope } => *slope == 0.0,
        }
    }
}

/// One layer of a sequential network, without its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LayerSpec {
    Conv(ConvSpec),
    Pool { window: PoolWindow, mode: PoolMode },
    Activation(ActivationKind),
    BatchNorm,
    Pad { padding: usize },
}

impl LayerSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            LayerSpec::Conv(_) => "conv",
            LayerSpec::Pool {
                mode: PoolMode::Max,
                ..
            } => "maxpool",
            LayerSpec::Pool {
                mode: PoolMode::Avg,
                ..
            } => "avgpool",
            LayerSpec::Activation(ActivationKind::Relu) => "relu",
            LayerSpec::Activation(ActivationKind::LeakyRelu { .. }) => "leaky_relu",
            LayerSpec::BatchNorm => "batchnorm",
            LayerSpec::Pad { .. } => "pad",
        }
    }

    pub fn is_conv(&self) -> bool {
        matches!(self, LayerSpec::Conv(_))
    }

    pub fn output_dims(&self, input: Dims3) -> Result<Dims3> {
        match self {
            LayerSpec::Conv(c) => {
                if c.out_channels == 0 {
                    return Err(Error::shape("convolution needs at least one filter"));
                }
                Ok(c.geometry(input)?.output(c.out_channels))
            }
            LayerSpec::Pool { window, .. } => window.output_dims(input),
            LayerSpec::Activation(ActivationKind::LeakyRelu { slope }) if !(*slope >= 0.0) => {
                Err(Error::invalid(format!("leaky relu slope {slope} must be >= 0")))
            }
            LayerSpec::Activation(_) | LayerSpec::BatchNorm => Ok(input),
            LayerSpec::Pad { padding } => Ok(Dims3::new(
                input.c,
                input.h + 2 * padding,
                input.w + 2 * padding,
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let i = Dims3::new(3, 32, 32);
        let conv = LayerSpec::Conv(ConvSpec::square(16, 3, 1, 1));
        assert_eq!(conv.output_dims(i).unwrap(), Dims3::new(16, 32, 32));
        let pool = LayerSpec::Pool {
            window: PoolWindow::square(2),
            mode: PoolMode::Max,
        };
        assert_eq!(pool.output_dims(i).unwrap(), Dims3::new(3, 16, 16));
        let odd = Dims3::new(3, 5, 5);
        assert!(pool.output_dims(odd).is_err());
        assert_eq!(
            LayerSpec::Pad { padding: 2 }.output_dims(i).unwrap(),
            Dims3::new(3, 36, 36)
        );
        let bad = LayerSpec::Activation(ActivationKind::LeakyRelu { slope: -0.1 });
        assert!(bad.output_dims(i).is_err());
    }
}
