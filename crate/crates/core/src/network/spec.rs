use std::fmt;
use std::str::FromStr;

use crate::layers::LayerSpec;
use crate::sparse::Dims3;
use crate::{Error, Result};

/// Which operand of each convolution is sparse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Pruned filters stored sparse, dense activations.
    SparseFilter,
    /// Sparse input tensor, dense filters.
    SparseInput,
    /// Everything dense; the comparison baseline.
    DenseBaseline,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::SparseFilter, Variant::SparseInput, Variant::DenseBaseline];

    pub fn name(self) -> &'static str {
        match self {
            Variant::SparseFilter => "sparse_filter",
            Variant::SparseInput => "sparse_input",
            Variant::DenseBaseline => "dense_baseline",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown variant {s:?}")))
    }
}

/// A sequential layer stack and its input shape.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    pub name: String,
    pub input: Dims3,
    pub layers: Vec<LayerSpec>,
}

impl NetworkSpec {
    pub fn new(name: impl Into<String>, input: Dims3, layers: Vec<LayerSpec>) -> Self {
        NetworkSpec {
            name: name.into(),
            input,
            layers,
        }
    }

    /// Checks that every layer accepts its predecessor's output and returns
    /// the output dims of each layer.
    pub fn validate(&self) -> Result<Vec<Dims3>> {
        if self.input.is_empty() {
            return Err(Error::shape(format!("input dims {} are empty", self.input)));
        }
        let mut dims = self.input;
        let mut out = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            dims = layer.output_dims(dims).map_err(|e| {
                Error::shape(format!("layer {i} ({}) on input {dims}: {e}", layer.kind_name()))
            })?;
            out.push(dims);
        }
        Ok(out)
    }

    /// Input dims of layer `i`, given the output dims from [`Self::validate`].
    pub fn layer_input(&self, shapes: &[Dims3], i: usize) -> Dims3 {
        if i == 0 {
            self.input
        } else {
            shapes[i - 1]
        }
    }

    pub fn output_dims(&self) -> Result<Dims3> {
        Ok(self.validate()?.last().copied().unwrap_or(self.input))
    }

    /// Indices of layers that carry parameters (convolution, batch norm).
    pub fn parameterized_layers(&self) -> Vec<usize> {
        self.layers
            .iter()
            .enumerate()
            .filter(|(_, l)| matches!(l, LayerSpec::Conv(_) | LayerSpec::BatchNorm))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn conv_count(&self) -> usize {
        self.layers.iter().filter(|l| l.is_conv()).count()
    }
}
