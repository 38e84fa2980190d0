//! Network layers assembled from the sparse kernels.
//!
//! Convolution comes in three flavours: sparse filters against a dense input
//! ([`conv_forward_strategy_i`] / [`conv_forward_strategy_ii`]), dense
//! filters against a sparse input ([`conv_forward_sparse_input`], optionally
//! fused with the following pooling layer), and the all-dense baseline
//! ([`conv_forward_dense`]).

mod activation;
mod batchnorm;
mod conv;
mod exec;
mod feature;
mod pad;
mod pool;
mod spec;

pub use activation::{apply_activation, relu_dense, relu_sparse, leaky_relu_dense, leaky_relu_sparse};
pub use batchnorm::{apply_batchnorm, BatchNormParams};
pub use conv::{
    conv_forward_dense, conv_forward_sparse_input, conv_forward_strategy_i,
    conv_forward_strategy_ii, ConvParams, ConvStats, SparseConvOutput,
};
pub use exec::{Executor, ForwardStrategy, Strategy, DEFAULT_AUTO_THRESHOLD};
pub use feature::FeatureMap;
pub use pad::pad;
pub use pool::{merged_conv_pool, pool_standalone, PoolMode, PoolWindow};
pub use spec::{ActivationKind, ConvSpec, LayerSpec};
