use super::spec::NetworkSpec;
use super::weights::{put_f32s, LayerWeights, NetworkWeights};
use crate::sparse::encode_dense3;
use crate::Result;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

fn f32_bytes(vals: &[f32]) -> Vec<u8> {
    let mut out = Vec::with_capacity(vals.len() * 4);
    put_f32s(&mut out, vals);
    out
}

/// Per-tensor checksums named `layer{i}.filter{j}` (over the FDT3
/// encoding), `layer{i}.bias`, and `layer{i}.bn_{scale,shift,mean,var,eps}`
/// (over the little-endian f32 bytes), where `i` is the layer index in
/// the model description.
pub fn weight_checksums(spec: &NetworkSpec, weights: &NetworkWeights) -> Result<Vec<(String, u64)>> {
    let indices = weights.check(spec)?;
    let mut out = Vec::new();
    for (li, layer) in indices.into_iter().zip(&weights.layers) {
        match layer {
            LayerWeights::Conv { filters, bias } => {
                for (j, f) in filters.iter().enumerate() {
                    out.push((format!("layer{li}.filter{j}"), fnv1a64(&encode_dense3(f))));
                }
                out.push((format!("layer{li}.bias"), fnv1a64(&f32_bytes(bias))));
            }
            LayerWeights::BatchNorm(p) => {
                for (name, vals) in [
                    ("scale", &p.scale),
                    ("shift", &p.shift),
                    ("mean", &p.mean),
                    ("var", &p.var),
                ] {
                    out.push((format!("layer{li}.bn_{name}"), fnv1a64(&f32_bytes(vals))));
                }
                out.push((format!("layer{li}.bn_eps"), fnv1a64(&f32_bytes(&[p.epsilon]))));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }
}
