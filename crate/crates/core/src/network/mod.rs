//! Sequential networks: description, parameters, benchmark architectures
//! and the batched forward pass.

mod checksum;
mod density;
mod forward;
mod spec;
mod text;
mod weights;
mod zoo;

pub use checksum::{fnv1a64, weight_checksums};
pub use density::{density_evolution, random_input, DensityRow, EVOLUTION_DENSITIES};
pub use forward::{forward, ForwardOptions, ForwardOutput, PreparedNet, RunRecord};
pub use spec::{NetworkSpec, Variant};
pub use text::{format_model, parse_model};
pub use weights::{
    decode_weights, encode_weights, load_weights, random_weights, save_weights, LayerWeights,
    NetworkWeights, WEIGHTS_MAGIC, WEIGHTS_VERSION,
};
pub use zoo::{build_benchmark_net, BenchmarkNet, DESK_INPUT, DESK_SCALE, FULL_INPUT};
