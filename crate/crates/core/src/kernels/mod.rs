//! Core sparse kernels. Everything here is pure and single-threaded;
//! parallel decomposition lives in [`crate::layers`].

mod conv;
mod dot;
mod geometry;
mod reference;
mod transpose;

pub use conv::{
    conv_dense_input_sparse_filter, conv_dense_input_sparse_filter_counted,
    conv_sparse_input_dense_filter,
};
pub(crate) use conv::{sparse_filter_element, sparse_input_element};
pub use dot::{dot_dense_sparse, dot_dense_sparse_checked, MulCounter};
pub use geometry::ConvGeometry;
pub use reference::dense_conv_reference;
pub use transpose::{transpose_matrix, transpose_tensor3};
