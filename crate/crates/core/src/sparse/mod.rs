//! Node-based sparse formats and their dense counterparts.

pub(crate) mod codec;
mod dense;
mod density;
mod matrix;
mod node;
mod order;
mod prune;
mod tensor3;
mod tensor4;

pub use codec::{
    decode_dense3, decode_sparse3, encode_dense3, encode_sparse3, DENSE3_MAGIC, SPARSE3_MAGIC,
};
pub use dense::{DenseMatrix, DenseTensor3, Dims3};
pub use density::Density;
pub use matrix::SparseMatrix;
pub use node::{Node, SparseVector};
pub use order::{Axis, AxisOrder2, AxisOrder3};
pub use prune::{kept_count, prune_filters, prune_random};
pub use tensor3::{SparseTensor3, Tensor3Ref};
pub use tensor4::{Dims4, SparseTensor4};
