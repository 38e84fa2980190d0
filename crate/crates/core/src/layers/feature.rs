use crate::sparse::{Density, DenseTensor3, Dims3, SparseTensor3};

/// Activation tensor flowing between layers.
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureMap {
    Dense(DenseTensor3),
    /// Always stored in `Chw` order.
    Sparse(SparseTensor3),
}

impl FeatureMap {
    pub fn dims(&self) -> Dims3 {
        match self {
            FeatureMap::Dense(t) => t.dims(),
            FeatureMap::Sparse(t) => t.dims(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, FeatureMap::Sparse(_))
    }

    pub fn to_dense(&self) -> DenseTensor3 {
        match self {
            FeatureMap::Dense(t) => t.clone(),
            FeatureMap::Sparse(t) => t.to_dense(),
        }
    }

    pub fn into_dense(self) -> DenseTensor3 {
        match self {
            FeatureMap::Dense(t) => t,
            FeatureMap::Sparse(t) => t.to_dense(),
        }
    }
}

impl Density for FeatureMap {
    fn nonzeros(&self) -> usize {
        match self {
            FeatureMap::Dense(t) => t.nnz(),
            FeatureMap::Sparse(t) => t.nnz(),
        }
    }

    fn total(&self) -> usize {
        self.dims().len()
    }
}
