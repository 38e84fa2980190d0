//! Network parameters and the `FSNW` weight file.
//!
//! ```text
//! "FSNW" | u32 version (1) | u32 record count
//! per convolution: u32 N | u32 C | u32 H | u32 W | N x FDT3 filter | N x f32 bias
//! per batch norm:  C x f32 scale | C x f32 shift | C x f32 mean | C x f32 var | f32 eps
//! ```
//! Records follow the order of the parameterized layers (convolution and
//! batch norm) in the model description, which also supplies the batch
//! norm channel count. All values are little-endian.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::spec::NetworkSpec;
use crate::layers::{BatchNormParams, LayerSpec};
use crate::sparse::codec::{read_dense3, write_dense3, ByteReader};
use crate::sparse::{DenseTensor3, Dims3};
use crate::{Error, Result};

pub const WEIGHTS_MAGIC: &[u8; 4] = b"FSNW";
pub const WEIGHTS_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum LayerWeights {
    Conv {
        filters: Vec<DenseTensor3>,
        bias: Vec<f32>,
    },
    BatchNorm(BatchNormParams),
}

impl LayerWeights {
    fn kind_name(&self) -> &'static str {
        match self {
            LayerWeights::Conv { .. } => "conv",
            LayerWeights::BatchNorm(_) => "batchnorm",
        }
    }
}

/// Parameters of every parameterized layer, in layer order.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkWeights {
    pub layers: Vec<LayerWeights>,
}

fn mismatch(context: impl Into<String>, expected: impl ToString, found: impl ToString) -> Error {
    Error::DimMismatch {
        context: context.into(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

impl NetworkWeights {
    /// Checks record kinds and shapes against `spec`. Returns the layer
    /// index of each record.
    pub fn check(&self, spec: &NetworkSpec) -> Result<Vec<usize>> {
        let shapes = spec.validate()?;
        let indices = spec.parameterized_layers();
        if indices.len() != self.layers.len() {
            return Err(mismatch("parameterized layer count", indices.len(), self.layers.len()));
        }
        for (&li, w) in indices.iter().zip(&self.layers) {
            let input = spec.layer_input(&shapes, li);
            let ctx = |what: &str| format!("layer {li} ({}) {what}", spec.layers[li].kind_name());
            match (&spec.layers[li], w) {
                (LayerSpec::Conv(c), LayerWeights::Conv { filters, bias }) => {
                    if filters.len() != c.out_channels {
                        return Err(mismatch(ctx("filter count"), c.out_channels, filters.len()));
                    }
                    if bias.len() != c.out_channels {
                        return Err(mismatch(ctx("bias count"), c.out_channels, bias.len()));
                    }
                    let expected = c.filter_dims(input.c);
                    if let Some((f, t)) = filters.iter().enumerate().find(|(_, t)| t.dims() != expected) {
                        return Err(mismatch(ctx(&format!("filter {f}")), expected, t.dims()));
                    }
                }
                (LayerSpec::BatchNorm, LayerWeights::BatchNorm(p)) => {
                    if p.channels() != input.c {
                        return Err(mismatch(ctx("channels"), input.c, p.channels()));
                    }
                    p.validate()?;
                }
                (l, w) => return Err(mismatch(format!("layer {li} kind"), l.kind_name(), w.kind_name())),
            }
        }
        Ok(indices)
    }
}

fn put_u32(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&u32::try_from(v).expect("count exceeds u32").to_le_bytes());
}

pub(crate) fn put_f32s(out: &mut Vec<u8>, vals: &[f32]) {
    for v in vals {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn encode_weights(weights: &NetworkWeights) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(WEIGHTS_MAGIC);
    out.extend_from_slice(&WEIGHTS_VERSION.to_le_bytes());
    put_u32(&mut out, weights.layers.len());
    for layer in &weights.layers {
        match layer {
            LayerWeights::Conv { filters, bias } => {
                let d = filters.first().map(|f| f.dims()).unwrap_or(Dims3::new(0, 0, 0));
                put_u32(&mut out, filters.len());
                put_u32(&mut out, d.c);
                put_u32(&mut out, d.h);
                put_u32(&mut out, d.w);
                for f in filters {
                    write_dense3(&mut out, f);
                }
                put_f32s(&mut out, bias);
            }
            LayerWeights::BatchNorm(p) => {
                put_f32s(&mut out, &p.scale);
                put_f32s(&mut out, &p.shift);
                put_f32s(&mut out, &p.mean);
                put_f32s(&mut out, &p.var);
                put_f32s(&mut out, &[p.epsilon]);
            }
        }
    }
    out
}

/// Decodes a weight file for `spec`; shapes are checked against it.
pub fn decode_weights(bytes: &[u8], spec: &NetworkSpec) -> Result<NetworkWeights> {
    let shapes = spec.validate()?;
    let mut r = ByteReader::new(bytes);
    r.magic(WEIGHTS_MAGIC, "weight file header")?;
    let version = r.u32("weight file header")?;
    if version != WEIGHTS_VERSION {
        return Err(Error::Version {
            expected: WEIGHTS_VERSION,
            found: version,
        });
    }
    let count = r.u32("weight file header")? as usize;
    let indices = spec.parameterized_layers();
    if count != indices.len() {
        return Err(mismatch("parameterized layer count", indices.len(), count));
    }
    let mut layers = Vec::with_capacity(count);
    for &li in &indices {
        let input = spec.layer_input(&shapes, li);
        let ctx = |what: &str| format!("layer {li} ({}) {what}", spec.layers[li].kind_name());
        match &spec.layers[li] {
            LayerSpec::Conv(c) => {
                let header = ctx("header");
                let n = r.u32(&header)? as usize;
                let dims = Dims3::new(
                    r.u32(&header)? as usize,
                    r.u32(&header)? as usize,
                    r.u32(&header)? as usize,
                );
                if n != c.out_channels {
                    return Err(mismatch(ctx("filter count"), c.out_channels, n));
                }
                let expected = c.filter_dims(input.c);
                if dims != expected {
                    return Err(mismatch(ctx("filter dims"), expected, dims));
                }
                let mut filters = Vec::with_capacity(n);
                for f in 0..n {
                    let what = ctx(&format!("filter {f}"));
                    let t = read_dense3(&mut r, &what)?;
                    if t.dims() != expected {
                        return Err(mismatch(what, expected, t.dims()));
                    }
                    filters.push(t);
                }
                let bias = r.f32_vec(n, &ctx("bias"))?;
                layers.push(LayerWeights::Conv { filters, bias });
            }
            LayerSpec::BatchNorm => {
                let ch = input.c;
                let p = BatchNormParams {
                    scale: r.f32_vec(ch, &ctx("scale"))?,
                    shift: r.f32_vec(ch, &ctx("shift"))?,
                    mean: r.f32_vec(ch, &ctx("mean"))?,
                    var: r.f32_vec(ch, &ctx("var"))?,
                    epsilon: r.f32(&ctx("epsilon"))?,
                };
                layers.push(LayerWeights::BatchNorm(p));
            }
            _ => unreachable!("parameterized_layers only yields conv and batchnorm"),
        }
    }
    if r.remaining() != 0 {
        return Err(Error::format(format!(
            "{} trailing bytes after the last weight record",
            r.remaining()
        )));
    }
    Ok(NetworkWeights { layers })
}

pub fn save_weights(path: impl AsRef<Path>, weights: &NetworkWeights) -> Result<()> {
    std::fs::write(path, encode_weights(weights))?;
    Ok(())
}

pub fn load_weights(path: impl AsRef<Path>, spec: &NetworkSpec) -> Result<NetworkWeights> {
    decode_weights(&std::fs::read(path)?, spec)
}

/// Seeded random parameters: filters uniform on [-0.5, 0.5], zero biases;
/// batch norm scale and variance uniform on [0.5, 1.5], shift on
/// [-0.5, 0.5], mean on [-0.1, 0.1], epsilon 1e-5.
pub fn random_weights(spec: &NetworkSpec, seed: u64) -> Result<NetworkWeights> {
    let shapes = spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::new();
    for li in spec.parameterized_layers() {
        let input = spec.layer_input(&shapes, li);
        match &spec.layers[li] {
            LayerSpec::Conv(c) => {
                let dims = c.filter_dims(input.c);
                let filters = (0..c.out_channels)
                    .map(|_| {
                        let data = (0..dims.len()).map(|_| rng.random_range(-0.5f32..=0.5)).collect();
                        DenseTensor3::from_vec(dims, data)
                    })
                    .collect::<Result<_>>()?;
                layers.push(LayerWeights::Conv {
                    filters,
                    bias: vec![0.0; c.out_channels],
                });
            }
            LayerSpec::BatchNorm => {
                let mut draw = |lo: f32, hi: f32| -> Vec<f32> {
                    (0..input.c).map(|_| rng.random_range(lo..=hi)).collect()
                };
                layers.push(LayerWeights::BatchNorm(BatchNormParams {
                    scale: draw(0.5, 1.5),
                    shift: draw(-0.5, 0.5),
                    mean: draw(-0.1, 0.1),
                    var: draw(0.5, 1.5),
                    epsilon: 1e-5,
                }));
            }
            _ => unreachable!("parameterized_layers only yields conv and batchnorm"),
        }
    }
    Ok(NetworkWeights { layers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_model;

    fn spec() -> NetworkSpec {
        parse_model("input c=2 h=6 w=6\nconv out=3 k=3 p=1\nbatchnorm\nrelu\nmaxpool k=2\nconv out=2 k=1\n").unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let s = spec();
        let w = random_weights(&s, 9).unwrap();
        assert_eq!(w.check(&s).unwrap(), vec![0, 1, 4]);
        let bytes = encode_weights(&w);
        assert_eq!(&bytes[..4], b"FSNW");
        let back = decode_weights(&bytes, &s).unwrap();
        assert_eq!(encode_weights(&back), bytes);
        assert_eq!(back, w);
    }

    #[test]
    fn random_weights_are_deterministic() {
        let s = spec();
        assert_eq!(random_weights(&s, 3).unwrap(), random_weights(&s, 3).unwrap());
        assert_ne!(random_weights(&s, 3).unwrap(), random_weights(&s, 4).unwrap());
    }

    #[test]
    fn distinct_errors() {
        let s = spec();
        let bytes = encode_weights(&random_weights(&s, 1).unwrap());

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_weights(&bad, &s), Err(Error::BadMagic { .. })));

        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(matches!(decode_weights(&bad, &s), Err(Error::Version { found: 2, .. })));

        match decode_weights(&bytes[..bytes.len() - 10], &s) {
            Err(Error::Truncated { context }) => assert!(context.contains("layer 4 (conv)"), "{context}"),
            other => panic!("{other:?}"),
        }

        let other = parse_model("input c=2 h=6 w=6\nconv out=4 k=3 p=1\nbatchnorm\nrelu\nmaxpool k=2\nconv out=2 k=1\n")
            .unwrap();
        match decode_weights(&bytes, &other) {
            Err(Error::DimMismatch { context, .. }) => assert!(context.contains("layer 0"), "{context}"),
            other => panic!("{other:?}"),
        }

        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(decode_weights(&extra, &s), Err(Error::Format(_))));
    }
}
