use std::time::Instant;

use super::spec::{NetworkSpec, Variant};
use super::weights::{LayerWeights, NetworkWeights};
use crate::layers::{
    apply_activation, apply_batchnorm, conv_forward_dense, conv_forward_sparse_input,
    conv_forward_strategy_i, conv_forward_strategy_ii, pad, pool_standalone, ActivationKind,
    BatchNormParams, ConvParams, Executor, FeatureMap, ForwardStrategy, LayerSpec, PoolMode,
    PoolWindow, Strategy,
};
use crate::sparse::{prune_filters, AxisOrder3, Density, DenseTensor3, SparseTensor3, SparseTensor4};
use crate::{Error, Result};

enum Layer {
    SparseConv {
        filters: SparseTensor4,
        bias: Vec<f32>,
        params: ConvParams,
    },
    DenseConv {
        filters: Vec<DenseTensor3>,
        bias: Vec<f32>,
        params: ConvParams,
    },
    Pool(PoolWindow, PoolMode),
    Activation(ActivationKind),
    BatchNorm(BatchNormParams),
    Pad(usize),
}

/// A network with parameters converted for one variant and filter density.
pub struct PreparedNet {
    spec: NetworkSpec,
    variant: Variant,
    filter_density: f64,
    layers: Vec<Layer>,
}

impl std::fmt::Debug for PreparedNet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PreparedNet")
            .field("name", &self.spec.name)
            .field("variant", &self.variant)
            .field("filter_density", &self.filter_density)
            .finish()
    }
}

impl PreparedNet {
    /// Converts `weights` for `variant`. When `filter_density < 1` every
    /// convolution's filter bank is pruned to that density, using seed
    /// `seed + layer index`. Sparse-filter nets store the pruned filters
    /// sparse; the other variants keep them dense.
    pub fn new(
        spec: &NetworkSpec,
        weights: &NetworkWeights,
        variant: Variant,
        filter_density: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(filter_density > 0.0 && filter_density <= 1.0) {
            return Err(Error::invalid(format!(
                "filter density {filter_density} outside (0, 1]"
            )));
        }
        let indices = weights.check(spec)?;
        let mut params = indices.into_iter().zip(&weights.layers);
        let mut layers = Vec::with_capacity(spec.layers.len());
        for (li, layer) in spec.layers.iter().enumerate() {
            layers.push(match layer {
                LayerSpec::Conv(c) => {
                    let Some((_, LayerWeights::Conv { filters, bias })) = params.next() else {
                        unreachable!("weights were checked against the spec");
                    };
                    let filters = if filter_density < 1.0 {
                        prune_filters(filters, filter_density, seed.wrapping_add(li as u64))?
                    } else {
                        filters.clone()
                    };
                    let params = ConvParams::new(c.stride, c.padding);
                    let bias = bias.clone();
                    match variant {
                        Variant::SparseFilter => Layer::SparseConv {
                            filters: SparseTensor4::from_dense(&filters, AxisOrder3::Chw)?,
                            bias,
                            params,
                        },
                        Variant::SparseInput | Variant::DenseBaseline => Layer::DenseConv {
                            filters,
                            bias,
                            params,
                        },
                    }
                }
                LayerSpec::BatchNorm => {
                    let Some((_, LayerWeights::BatchNorm(p))) = params.next() else {
                        unreachable!("weights were checked against the spec");
                    };
                    Layer::BatchNorm(p.clone())
                }
                LayerSpec::Pool { window, mode } => Layer::Pool(*window, *mode),
                LayerSpec::Activation(a) => Layer::Activation(*a),
                LayerSpec::Pad { padding } => Layer::Pad(*padding),
            });
        }
        Ok(PreparedNet {
            spec: spec.clone(),
            variant,
            filter_density,
            layers,
        })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn filter_density(&self) -> f64 {
        self.filter_density
    }

    /// Stored filter nonzeros of every convolution, in layer order.
    pub fn filter_nonzeros(&self) -> Vec<usize> {
        self.layers
            .iter()
            .filter_map(|l| match l {
                Layer::SparseConv { filters, .. } => Some(filters.nnz()),
                Layer::DenseConv { filters, .. } => Some(filters.iter().map(|f| f.nnz()).sum()),
                _ => None,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForwardOptions {
    pub strategy: ForwardStrategy,
    /// Record the density of every layer's output (summed over the batch).
    pub record_densities: bool,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        ForwardOptions {
            strategy: ForwardStrategy::default(),
            record_densities: false,
        }
    }
}

/// One timed forward pass.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub variant: Variant,
    pub filter_density: f64,
    pub batch: usize,
    pub workers: usize,
    pub strategy: Strategy,
    pub seconds: f64,
    /// Output density of each layer; empty unless recording was requested.
    pub layer_densities: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ForwardOutput {
    pub outputs: Vec<FeatureMap>,
    pub record: RunRecord,
}

/// Nonzero and total counts per layer.
type Counts = Vec<(usize, usize)>;

struct Recorder {
    counts: Option<Counts>,
}

impl Recorder {
    fn new(enabled: bool, layers: usize) -> Self {
        Recorder {
            counts: enabled.then(|| vec![(0, 0); layers]),
        }
    }

    fn add(&mut self, layer: usize, nonzero: usize, total: usize) {
        if let Some(c) = &mut self.counts {
            c[layer].0 += nonzero;
            c[layer].1 += total;
        }
    }

    fn tensor(&mut self, layer: usize, t: &FeatureMap) {
        if self.counts.is_some() {
            self.add(layer, t.nonzeros(), t.total());
        }
    }
}

fn pool_map(t: FeatureMap, window: PoolWindow, mode: PoolMode) -> Result<FeatureMap> {
    Ok(match t {
        FeatureMap::Dense(d) => FeatureMap::Dense(pool_standalone(&d, window, mode)?),
        FeatureMap::Sparse(s) => {
            let pooled = pool_standalone(&s.to_dense(), window, mode)?;
            FeatureMap::Sparse(SparseTensor3::from_dense(&pooled, AxisOrder3::Chw)?)
        }
    })
}

/// Runs one instance through the network. `exec` parallelizes convolutions
/// across filters; with [`Strategy::II`] it is sequential.
fn run_instance(
    net: &PreparedNet,
    input: &FeatureMap,
    strategy: Strategy,
    exec: &Executor,
    rec: &mut Recorder,
) -> Result<FeatureMap> {
    let layers = &net.layers;
    let mut cur = input.clone();
    let mut i = 0;
    while i < layers.len() {
        let ctx = |e: Error| Error::shape(format!("layer {i} ({}): {e}", net.spec.layers[i].kind_name()));
        let mut consumed = 1;
        cur = match (&layers[i], cur) {
            (Layer::SparseConv { filters, bias, params }, FeatureMap::Dense(d)) => {
                FeatureMap::Dense(match strategy {
                    Strategy::I => conv_forward_strategy_i(&d, filters, bias, *params, exec),
                    Strategy::II => conv_forward_strategy_ii(&d, filters, bias, *params),
                }
                .map_err(ctx)?)
            }
            (Layer::SparseConv { .. }, FeatureMap::Sparse(_)) => {
                return Err(Error::invalid(format!(
                    "layer {i}: sparse-filter convolution needs a dense input"
                )))
            }
            (Layer::DenseConv { filters, bias, params }, FeatureMap::Dense(d)) => {
                FeatureMap::Dense(conv_forward_dense(&d, filters, bias, *params, exec).map_err(ctx)?)
            }
            (Layer::DenseConv { filters, bias, params }, FeatureMap::Sparse(s)) => {
                let zero_bias = bias.iter().all(|&b| b == 0.0);
                let (pool, post) = match (layers.get(i + 1), layers.get(i + 2)) {
                    (Some(Layer::Pool(w, m)), _) if zero_bias => (Some((*w, *m)), None),
                    // A monotone activation commutes with max pooling.
                    (Some(Layer::Activation(a)), Some(Layer::Pool(w, PoolMode::Max))) if zero_bias => {
                        (Some((*w, PoolMode::Max)), Some(*a))
                    }
                    _ => (None, None),
                };
                let out = conv_forward_sparse_input(&s, filters, bias, *params, pool, exec).map_err(ctx)?;
                match (pool, post) {
                    (None, _) => out.output,
                    (Some(_), None) => {
                        rec.add(i, out.stats.nonzero, out.stats.elements);
                        consumed = 2;
                        out.output
                    }
                    (Some(_), Some(a)) => {
                        rec.add(i, out.stats.nonzero, out.stats.elements);
                        let kept = if a.drops_negatives() {
                            out.stats.positive
                        } else {
                            out.stats.nonzero
                        };
                        rec.add(i + 1, kept, out.stats.elements);
                        consumed = 3;
                        apply_activation(out.output, a)
                    }
                }
            }
            (Layer::Pool(w, m), t) => pool_map(t, *w, *m).map_err(ctx)?,
            (Layer::Activation(a), t) => apply_activation(t, *a),
            (Layer::BatchNorm(p), t) => FeatureMap::Dense(apply_batchnorm(t, p).map_err(ctx)?),
            (Layer::Pad(p), t) => pad(&t, *p).map_err(ctx)?,
        };
        i += consumed;
        rec.tensor(i - 1, &cur);
    }
    Ok(cur)
}

fn check_batch(net: &PreparedNet, batch: &[FeatureMap]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::invalid("batch is empty"));
    }
    for (b, t) in batch.iter().enumerate() {
        if t.dims() != net.spec.input {
            return Err(Error::shape(format!(
                "instance {b} has dims {}, network expects {}",
                t.dims(),
                net.spec.input
            )));
        }
        let ok = match (net.variant, t) {
            (Variant::SparseInput, FeatureMap::Sparse(s)) => s.order() == AxisOrder3::Chw,
            (Variant::SparseInput, FeatureMap::Dense(_)) => false,
            (_, FeatureMap::Dense(_)) => true,
            (_, FeatureMap::Sparse(_)) => false,
        };
        if !ok {
            return Err(Error::invalid(format!(
                "instance {b}: {} networks take {} input",
                net.variant,
                if net.variant == Variant::SparseInput {
                    "sparse chw"
                } else {
                    "dense"
                }
            )));
        }
    }
    Ok(())
}

/// Runs a batch through the network and times it.
///
/// Strategy I processes instances one after another and parallelizes each
/// convolution across filters; strategy II runs instances in parallel.
/// Outputs do not depend on the strategy or the worker count.
pub fn forward(
    net: &PreparedNet,
    batch: &[FeatureMap],
    exec: &Executor,
    opts: &ForwardOptions,
) -> Result<ForwardOutput> {
    check_batch(net, batch)?;
    let strategy = opts.strategy.resolve(batch.len());
    let n_layers = net.layers.len();
    let start = Instant::now();
    let (outputs, counts) = match strategy {
        Strategy::I => {
            let mut rec = Recorder::new(opts.record_densities, n_layers);
            let outputs = batch
                .iter()
                .map(|x| run_instance(net, x, strategy, exec, &mut rec))
                .collect::<Result<Vec<_>>>()?;
            (outputs, rec.counts)
        }
        Strategy::II => {
            let results = exec.try_map(batch.len(), |b| {
                let mut rec = Recorder::new(opts.record_densities, n_layers);
                let out = run_instance(net, &batch[b], strategy, &Executor::sequential(), &mut rec)?;
                Ok((out, rec.counts))
            })?;
            let mut total = Recorder::new(opts.record_densities, n_layers);
            let mut outputs = Vec::with_capacity(results.len());
            for (out, counts) in results {
                for (l, (nz, n)) in counts.into_iter().flatten().enumerate() {
                    total.add(l, nz, n);
                }
                outputs.push(out);
            }
            (outputs, total.counts)
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    let layer_densities = counts
        .unwrap_or_default()
        .into_iter()
        .map(|(nz, n)| if n == 0 { 0.0 } else { nz as f64 / n as f64 })
        .collect();
    Ok(ForwardOutput {
        outputs,
        record: RunRecord {
            variant: net.variant,
            filter_density: net.filter_density,
            batch: batch.len(),
            workers: exec.workers(),
            strategy,
            seconds,
            layer_densities,
        },
    })
}
