//! Sparse CNN inference on the CPU.
//!
//! Tensors with unstructured sparsity are stored as contiguous buffers of
//! [`Node`](sparse::Node)s (index/value pairs) where every fiber ends with a
//! sentinel node of index `-1`. Convolution exploits sparsity on either side:
//! sparse filters against dense inputs, or sparse inputs against dense
//! filters.
//!
//! * [`sparse`]: node-based vector, matrix and 3-D/4-D tensor formats,
//!   conversions, random pruning and binary codecs.
//! * [`kernels`]: sparse-dense inner product, both sparse convolution
//!   variants, sparse transposes and the dense reference convolution.
//! * [`layers`]: convolution forward strategies, fused convolution+pooling,
//!   pooling, padding, activations and batch normalization.
//! * [`network`]: model descriptions, weight files, the batched forward pass
//!   and the built-in benchmark architectures.

pub mod error;
pub mod kernels;
pub mod layers;
pub mod network;
pub mod sparse;

pub use error::{Error, Result};
