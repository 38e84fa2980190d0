use serde::Serialize;
use sparse_infer::layers::{Executor, FeatureMap};
use sparse_infer::network::{
    density_evolution, forward, load_weights, random_input, random_weights, BenchmarkNet, DensityRow,
    ForwardOptions, LayerWeights, NetworkSpec, NetworkWeights, PreparedNet, Variant,
};
use sparse_infer::sparse::{AxisOrder3, SparseTensor3};

use crate::config::BenchConfig;
use crate::report::{summarize, SummaryRow};
use crate::{BenchError, Result};

/// One timed repetition; serialized as a row of the timing CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimingRow {
    pub variant: String,
    pub density: f64,
    pub batch: usize,
    pub workers: usize,
    pub strategy: String,
    pub rep: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub rows: Vec<TimingRow>,
    pub summary: Vec<SummaryRow>,
    /// Sparse-input density evolution over the same sweep, when a density
    /// CSV was requested.
    pub densities: Option<Vec<DensityRow>>,
}

#[derive(Clone, Debug)]
pub struct DensityStudy {
    pub net: BenchmarkNet,
    pub rows: Vec<DensityRow>,
    /// The same study on the net with activations (and batch norm) removed.
    pub ablated: Option<(BenchmarkNet, Vec<DensityRow>)>,
}

fn setup(context: impl Into<String>) -> impl FnOnce(sparse_infer::Error) -> BenchError {
    let context = context.into();
    move |source| BenchError::Setup { context, source }
}

fn build(cfg: &BenchConfig, net: BenchmarkNet) -> Result<NetworkSpec> {
    net.build(cfg.scale, cfg.input_size)
        .map_err(setup(format!("building {net}")))
}

fn weights_for(cfg: &BenchConfig, spec: &NetworkSpec) -> Result<NetworkWeights> {
    match &cfg.weights {
        Some(path) => load_weights(path, spec).map_err(setup(format!("loading {}", path.display()))),
        None => random_weights(spec, cfg.seed).map_err(setup("generating weights")),
    }
}

fn executors(cfg: &BenchConfig) -> Result<Vec<Executor>> {
    cfg.workers
        .iter()
        .map(|&w| Executor::new(w).map_err(setup(format!("starting {w} workers"))))
        .collect()
}

/// Inputs for one grid point. Instance `k` uses seed `seed + 1000 + k`.
fn make_batch(spec: &NetworkSpec, variant: Variant, density: f64, size: usize, seed: u64) -> sparse_infer::Result<Vec<FeatureMap>> {
    (0..size)
        .map(|k| {
            let x = random_input(spec.input, density, seed.wrapping_add(1000 + k as u64))?;
            Ok(match variant {
                Variant::SparseInput => FeatureMap::Sparse(SparseTensor3::from_dense(&x, AxisOrder3::Chw)?),
                _ => FeatureMap::Dense(x),
            })
        })
        .collect()
}

/// Runs the timing grid: every density, batch size and worker count, for
/// the configured variant and the dense baseline. Each grid point gets
/// `warmup` untimed runs followed by `reps` timed ones.
///
/// For sparse-filter runs the density prunes the filters and inputs are
/// dense; otherwise it prunes the inputs and filters are kept whole.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let spec = build(cfg, cfg.net)?;
    let weights = weights_for(cfg, &spec)?;
    let execs = executors(cfg)?;
    let variants = if cfg.variant == Variant::DenseBaseline {
        vec![Variant::DenseBaseline]
    } else {
        vec![cfg.variant, Variant::DenseBaseline]
    };
    let opts = ForwardOptions {
        strategy: cfg.strategy,
        record_densities: false,
    };
    let mut rows = Vec::new();
    for &density in &cfg.densities {
        let (filter_density, input_density) = match cfg.variant {
            Variant::SparseInput => (1.0, density),
            _ => (density, 1.0),
        };
        for &variant in &variants {
            let point = |extra: &str| format!("grid point variant={variant} density={density}{extra}");
            let run_err = |point: String| move |source| BenchError::Run { point, source };
            let net = PreparedNet::new(&spec, &weights, variant, filter_density, cfg.seed)
                .map_err(run_err(point("")))?;
            for &batch in &cfg.batches {
                let inputs =
                    make_batch(&spec, variant, input_density, batch, cfg.seed).map_err(run_err(point("")))?;
                for exec in &execs {
                    let here = point(&format!(" batch={batch} workers={}", exec.workers()));
                    for _ in 0..cfg.warmup {
                        forward(&net, &inputs, exec, &opts).map_err(run_err(here.clone()))?;
                    }
                    for rep in 0..cfg.reps {
                        let out = forward(&net, &inputs, exec, &opts).map_err(run_err(here.clone()))?;
                        rows.push(TimingRow {
                            variant: variant.name().into(),
                            density,
                            batch,
                            workers: exec.workers(),
                            strategy: out.record.strategy.name().into(),
                            rep,
                            seconds: out.record.seconds,
                        });
                    }
                }
            }
        }
    }
    let densities = match &cfg.density_csv {
        Some(_) => Some(
            density_evolution(&spec, &weights, &cfg.densities, cfg.seed, &execs[0])
                .map_err(setup("density evolution"))?,
        ),
        None => None,
    };
    Ok(BenchReport {
        summary: summarize(&rows),
        rows,
        densities,
    })
}

/// Drops the batch norm records, matching a net with batch norm removed.
fn without_batchnorm(weights: &NetworkWeights) -> NetworkWeights {
    NetworkWeights {
        layers: weights
            .layers
            .iter()
            .filter(|l| matches!(l, LayerWeights::Conv { .. }))
            .cloned()
            .collect(),
    }
}

/// Layer-by-layer output densities of sparse-input runs over the input
/// density sweep, for the configured net and its ablation. Both nets share
/// their convolution weights and inputs.
pub fn run_density_study(cfg: &BenchConfig) -> Result<DensityStudy> {
    cfg.validate()?;
    if cfg.variant != Variant::SparseInput {
        return Err(BenchError::Usage(format!(
            "the density study runs the sparse_input variant, not {}",
            cfg.variant
        )));
    }
    let execs = executors(cfg)?;
    let spec = build(cfg, cfg.net)?;
    let weights = weights_for(cfg, &spec)?;
    let study = |spec: &NetworkSpec, weights: &NetworkWeights, net: BenchmarkNet| {
        density_evolution(spec, weights, &cfg.densities, cfg.seed, &execs[0]).map_err(|source| BenchError::Run {
            point: format!("density study on {net}"),
            source,
        })
    };
    let rows = study(&spec, &weights, cfg.net)?;
    let ablated = match cfg.net.ablated() {
        Some(kind) => {
            let a_spec = build(cfg, kind)?;
            let a_weights = without_batchnorm(&weights);
            Some((kind, study(&a_spec, &a_weights, kind)?))
        }
        None => None,
    };
    Ok(DensityStudy {
        net: cfg.net,
        rows,
        ablated,
    })
}
