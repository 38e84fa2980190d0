use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::forward::{forward, ForwardOptions, PreparedNet};
use super::spec::{NetworkSpec, Variant};
use super::weights::NetworkWeights;
use crate::layers::{Executor, FeatureMap, ForwardStrategy, Strategy};
use crate::sparse::{prune_random, AxisOrder3, DenseTensor3, Dims3, SparseTensor3};
use crate::{Error, Result};

/// Input densities of the standard evolution sweep.
pub const EVOLUTION_DENSITIES: [f64; 6] = [0.01, 0.05, 0.10, 0.20, 0.50, 1.0];

/// One row of a density-evolution table. Layer index 0 is the network
/// input; layer `i >= 1` is the output of the `i`-th layer.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityRow {
    pub input_density: f64,
    pub layer_index: usize,
    pub layer_kind: String,
    pub output_density: f64,
}

/// Uniform [0, 1) input randomly pruned to `density`.
pub fn random_input(dims: Dims3, density: f64, seed: u64) -> Result<DenseTensor3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..dims.len()).map(|_| rng.random::<f32>()).collect();
    let t = DenseTensor3::from_vec(dims, data)?;
    if density < 1.0 {
        prune_random(&t, density, seed)
    } else {
        Ok(t)
    }
}

/// Runs a sparse-input forward pass for each input density and records the
/// output density of every layer.
pub fn density_evolution(
    spec: &NetworkSpec,
    weights: &NetworkWeights,
    input_densities: &[f64],
    seed: u64,
    exec: &Executor,
) -> Result<Vec<DensityRow>> {
    let net = PreparedNet::new(spec, weights, Variant::SparseInput, 1.0, seed)?;
    let opts = ForwardOptions {
        strategy: ForwardStrategy::Fixed(Strategy::I),
        record_densities: true,
    };
    let mut rows = Vec::with_capacity(input_densities.len() * (spec.layers.len() + 1));
    for &d in input_densities {
        if !(d > 0.0 && d <= 1.0) {
            return Err(Error::invalid(format!("input density {d} outside (0, 1]")));
        }
        let x = random_input(spec.input, d, seed)?;
        let sparse = SparseTensor3::from_dense(&x, AxisOrder3::Chw)?;
        rows.push(DensityRow {
            input_density: d,
            layer_index: 0,
            layer_kind: "input".into(),
            output_density: sparse.nnz() as f64 / spec.input.len() as f64,
        });
        let out = forward(&net, &[FeatureMap::Sparse(sparse)], exec, &opts)?;
        for (i, (layer, density)) in spec.layers.iter().zip(out.record.layer_densities).enumerate() {
            rows.push(DensityRow {
                input_density: d,
                layer_index: i + 1,
                layer_kind: layer.kind_name().into(),
                output_density: density,
            });
        }
    }
    Ok(rows)
}
