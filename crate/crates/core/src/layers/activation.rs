use super::feature::FeatureMap;
use super::spec::ActivationKind;
use crate::sparse::{DenseTensor3, Node, SparseTensor3};

#[inline(always)]
fn relu(x: f32) -> f32 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

#[inline(always)]
fn leaky(x: f32, slope: f32) -> f32 {
    if x < 0.0 {
        x * slope
    } else {
        x
    }
}

/// Applies `f` to every stored value, dropping results that become zero.
fn map_sparse(t: &SparseTensor3, f: impl Fn(f32) -> f32) -> SparseTensor3 {
    let mut nodes = Vec::with_capacity(t.nodes().len());
    let mut offsets = Vec::with_capacity(t.segment_count());
    for s in 0..t.segment_count() {
        offsets.push(nodes.len());
        for n in t.segment(s) {
            let v = f(n.value);
            if v != 0.0 {
                nodes.push(Node::new(n.index, v));
            }
        }
        nodes.push(Node::SENTINEL);
    }
    SparseTensor3::from_segments_unchecked(t.order(), t.dims(), nodes, offsets)
}

pub fn relu_dense(t: &mut DenseTensor3) {
    t.data_mut().iter_mut().for_each(|x| *x = relu(*x));
}

/// Drops every non-positive node.
pub fn relu_sparse(t: &SparseTensor3) -> SparseTensor3 {
    map_sparse(t, relu)
}

pub fn leaky_relu_dense(t: &mut DenseTensor3, slope: f32) {
    t.data_mut().iter_mut().for_each(|x| *x = leaky(*x, slope));
}

pub fn leaky_relu_sparse(t: &SparseTensor3, slope: f32) -> SparseTensor3 {
    map_sparse(t, |x| leaky(x, slope))
}

/// Applies the activation, keeping the representation of the input.
pub fn apply_activation(t: FeatureMap, kind: ActivationKind) -> FeatureMap {
    match (t, kind) {
        (FeatureMap::Dense(mut d), ActivationKind::Relu) => {
            relu_dense(&mut d);
            FeatureMap::Dense(d)
        }
        (FeatureMap::Dense(mut d), ActivationKind::LeakyRelu { slope }) => {
            leaky_relu_dense(&mut d, slope);
            FeatureMap::Dense(d)
        }
        (FeatureMap::Sparse(s), ActivationKind::Relu) => FeatureMap::Sparse(relu_sparse(&s)),
        (FeatureMap::Sparse(s), ActivationKind::LeakyRelu { slope }) => {
            FeatureMap::Sparse(leaky_relu_sparse(&s, slope))
        }
    }
}
