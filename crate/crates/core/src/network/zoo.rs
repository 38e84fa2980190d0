use std::fmt;
use std::str::FromStr;

use super::spec::NetworkSpec;
use crate::layers::{ActivationKind, ConvSpec, LayerSpec, PoolMode, PoolWindow};
use crate::sparse::Dims3;
use crate::{Error, Result};

/// Default width scale for desk-sized runs.
pub const DESK_SCALE: f64 = 0.25;
/// Spatial input extent of desk-sized runs.
pub const DESK_INPUT: usize = 32;
/// Spatial input extent of full-scale runs.
pub const FULL_INPUT: usize = 224;

/// Built-in benchmark architectures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchmarkNet {
    /// 13 3x3 convolutions with ReLU and 5 max-pool layers.
    Vgg16,
    /// [`Self::Vgg16`] without activations.
    Vgg16NoAct,
    /// Convolution backbone with batch norm and leaky ReLU(0.1).
    Yolo,
    /// [`Self::Yolo`] without batch norm and activations.
    YoloNoBn,
}

const VGG16_WIDTHS: [&[usize]; 5] = [&[64, 64], &[128, 128], &[256, 256, 256], &[512, 512, 512], &[512, 512, 512]];
const YOLO_POOLED: [usize; 5] = [16, 32, 64, 128, 256];
const YOLO_TAIL: [usize; 2] = [512, 1024];
const YOLO_OUT: usize = 125;

impl BenchmarkNet {
    pub const ALL: [BenchmarkNet; 4] = [
        BenchmarkNet::Vgg16,
        BenchmarkNet::Vgg16NoAct,
        BenchmarkNet::Yolo,
        BenchmarkNet::YoloNoBn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkNet::Vgg16 => "vgg16_desk",
            BenchmarkNet::Vgg16NoAct => "vgg16_desk_noact",
            BenchmarkNet::Yolo => "yolo_desk",
            BenchmarkNet::YoloNoBn => "yolo_desk_nobn",
        }
    }

    /// The variant with activations (and batch norm) stripped, if this is
    /// a full architecture.
    pub fn ablated(self) -> Option<BenchmarkNet> {
        match self {
            BenchmarkNet::Vgg16 => Some(BenchmarkNet::Vgg16NoAct),
            BenchmarkNet::Yolo => Some(BenchmarkNet::YoloNoBn),
            _ => None,
        }
    }

    /// Builds the network for a `input x input` RGB image with channel
    /// widths multiplied by `scale` and rounded up.
    pub fn build(self, scale: f64, input: usize) -> Result<NetworkSpec> {
        if !(scale > 0.0 && scale <= 1.0) {
            return Err(Error::invalid(format!("scale {scale} outside (0, 1]")));
        }
        let width = |w: usize| ((w as f64 * scale).ceil() as usize).max(1);
        let conv3 = |w: usize| LayerSpec::Conv(ConvSpec::square(width(w), 3, 1, 1));
        let maxpool = LayerSpec::Pool {
            window: PoolWindow::square(2),
            mode: PoolMode::Max,
        };
        let leaky = LayerSpec::Activation(ActivationKind::LeakyRelu { slope: 0.1 });
        let mut layers = Vec::new();
        match self {
            BenchmarkNet::Vgg16 | BenchmarkNet::Vgg16NoAct => {
                for block in VGG16_WIDTHS {
                    for &w in block {
                        layers.push(conv3(w));
                        if self == BenchmarkNet::Vgg16 {
                            layers.push(LayerSpec::Activation(ActivationKind::Relu));
                        }
                    }
                    layers.push(maxpool);
                }
            }
            BenchmarkNet::Yolo | BenchmarkNet::YoloNoBn => {
                let full = self == BenchmarkNet::Yolo;
                for (i, &w) in YOLO_POOLED.iter().chain(&YOLO_TAIL).enumerate() {
                    layers.push(conv3(w));
                    if full {
                        layers.push(LayerSpec::BatchNorm);
                        layers.push(leaky);
                    }
                    if i < YOLO_POOLED.len() {
                        layers.push(maxpool);
                    }
                }
                layers.push(LayerSpec::Conv(ConvSpec::square(width(YOLO_OUT), 1, 1, 0)));
            }
        }
        let spec = NetworkSpec::new(self.name(), Dims3::new(3, input, input), layers);
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for BenchmarkNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkNet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchmarkNet::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown network {s:?}")))
    }
}

/// [`BenchmarkNet::build`] at the desk input size.
pub fn build_benchmark_net(kind: BenchmarkNet, scale: f64) -> Result<NetworkSpec> {
    kind.build(scale, DESK_INPUT)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(spec: &NetworkSpec, name: &str) -> usize {
        spec.layers.iter().filter(|l| l.kind_name() == name).count()
    }

    #[test]
    fn vgg16_shape() {
        let spec = build_benchmark_net(BenchmarkNet::Vgg16, 1.0).unwrap();
        assert_eq!(spec.conv_count(), 13);
        assert_eq!(count(&spec, "maxpool"), 5);
        assert_eq!(count(&spec, "relu"), 13);
        assert_eq!(spec.output_dims().unwrap(), Dims3::new(512, 1, 1));
        let quarter = build_benchmark_net(BenchmarkNet::Vgg16, 0.25).unwrap();
        assert_eq!(quarter.output_dims().unwrap(), Dims3::new(128, 1, 1));
        let odd = build_benchmark_net(BenchmarkNet::Vgg16, 0.3).unwrap();
        assert_eq!(odd.layers[0], LayerSpec::Conv(ConvSpec::square(20, 3, 1, 1)));
    }

    #[test]
    fn ablations_keep_shapes() {
        for (full, ablated) in [
            (BenchmarkNet::Vgg16, BenchmarkNet::Vgg16NoAct),
            (BenchmarkNet::Yolo, BenchmarkNet::YoloNoBn),
        ] {
            assert_eq!(full.ablated(), Some(ablated));
            let a = build_benchmark_net(full, 0.125).unwrap();
            let b = build_benchmark_net(ablated, 0.125).unwrap();
            let convs = |s: &NetworkSpec| s.layers.iter().filter(|l| l.is_conv()).copied().collect::<Vec<_>>();
            assert_eq!(convs(&a), convs(&b));
            assert_eq!(a.output_dims().unwrap(), b.output_dims().unwrap());
            assert_eq!(count(&b, "relu") + count(&b, "leaky_relu") + count(&b, "batchnorm"), 0);
        }
    }

    #[test]
    fn yolo_shape() {
        let spec = build_benchmark_net(BenchmarkNet::Yolo, 1.0).unwrap();
        assert_eq!(spec.conv_count(), 8);
        assert_eq!(count(&spec, "batchnorm"), 7);
        assert_eq!(count(&spec, "leaky_relu"), 7);
        assert_eq!(spec.output_dims().unwrap(), Dims3::new(125, 1, 1));
        let full = BenchmarkNet::Yolo.build(1.0, FULL_INPUT).unwrap();
        assert_eq!(full.output_dims().unwrap(), Dims3::new(125, 7, 7));
    }

    #[test]
    fn all_kinds_validate_at_test_scales() {
        for kind in BenchmarkNet::ALL {
            assert_eq!(kind.name().parse::<BenchmarkNet>().unwrap(), kind);
            for scale in [0.125, 0.25, 1.0] {
                build_benchmark_net(kind, scale).unwrap();
            }
        }
        assert!(build_benchmark_net(BenchmarkNet::Vgg16, 0.0).is_err());
        assert!(build_benchmark_net(BenchmarkNet::Vgg16, 1.5).is_err());
        assert!("resnet".parse::<BenchmarkNet>().is_err());
    }
}
