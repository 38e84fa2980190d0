mod common;

use common::*;
use sparse_infer::layers::{Executor, FeatureMap, ForwardStrategy, Strategy};
use sparse_infer::layers::LayerSpec;
use sparse_infer::network::{
    build_benchmark_net, density_evolution, forward, random_input, random_weights, BenchmarkNet,
    ForwardOptions, NetworkSpec, NetworkWeights, PreparedNet, Variant,
};
use sparse_infer::sparse::{AxisOrder3, DenseTensor3, SparseTensor3};

const NET_RTOL: f64 = 1e-5;
const SWEEP: [f64; 6] = [0.01, 0.05, 0.10, 0.20, 0.50, 1.0];

fn run(
    spec: &NetworkSpec,
    weights: &NetworkWeights,
    variant: Variant,
    filter_density: f64,
    batch: &[DenseTensor3],
    exec: &Executor,
    strategy: ForwardStrategy,
) -> Vec<DenseTensor3> {
    let net = PreparedNet::new(spec, weights, variant, filter_density, 11).unwrap();
    let inputs: Vec<FeatureMap> = batch
        .iter()
        .map(|x| match variant {
            Variant::SparseInput => FeatureMap::Sparse(SparseTensor3::from_dense(x, AxisOrder3::Chw).unwrap()),
            _ => FeatureMap::Dense(x.clone()),
        })
        .collect();
    let opts = ForwardOptions {
        strategy,
        record_densities: false,
    };
    forward(&net, &inputs, exec, &opts)
        .unwrap()
        .outputs
        .into_iter()
        .map(FeatureMap::into_dense)
        .collect()
}

#[test]
fn sparse_filter_matches_dense_baseline() {
    let exec = Executor::new(4).unwrap();
    let mut worst = 0.0f64;
    for kind in BenchmarkNet::ALL {
        let spec = build_benchmark_net(kind, 0.125).unwrap();
        for seed in 0..20 {
            let weights = random_weights(&spec, seed).unwrap();
            let x = random_input(spec.input, 1.0, 100 + seed).unwrap();
            for rho in SWEEP {
                let strategy = ForwardStrategy::default();
                let a = run(&spec, &weights, Variant::SparseFilter, rho, &[x.clone()], &exec, strategy);
                let b = run(&spec, &weights, Variant::DenseBaseline, rho, &[x.clone()], &exec, strategy);
                let err = max_rel_error(a[0].data(), b[0].data());
                worst = worst.max(err);
                assert!(err <= NET_RTOL, "{kind} seed {seed} density {rho}: relative error {err:e}");
            }
        }
    }
    eprintln!("worst relative error {worst:e}");
}

#[test]
fn sparse_input_matches_dense_pipeline() {
    let exec = Executor::new(2).unwrap();
    for kind in BenchmarkNet::ALL {
        let spec = build_benchmark_net(kind, 0.125).unwrap();
        for seed in 0..5 {
            let weights = random_weights(&spec, seed).unwrap();
            for rho in SWEEP {
                let x = random_input(spec.input, rho, 200 + seed).unwrap();
                let strategy = ForwardStrategy::default();
                let a = run(&spec, &weights, Variant::SparseInput, 1.0, &[x.clone()], &exec, strategy);
                let b = run(&spec, &weights, Variant::DenseBaseline, 1.0, &[x], &exec, strategy);
                let err = max_rel_error(a[0].data(), b[0].data());
                assert!(err <= NET_RTOL, "{kind} seed {seed} input density {rho}: relative error {err:e}");
            }
        }
    }
}

#[test]
fn outputs_do_not_depend_on_workers_or_strategy() {
    for kind in BenchmarkNet::ALL {
        let spec = build_benchmark_net(kind, 0.125).unwrap();
        let weights = random_weights(&spec, 3).unwrap();
        let batch: Vec<_> = (0..3).map(|b| random_input(spec.input, 0.2, b).unwrap()).collect();
        for variant in Variant::ALL {
            let mut reference: Option<Vec<DenseTensor3>> = None;
            for workers in [1, 2, 4, 8] {
                let exec = Executor::new(workers).unwrap();
                for strategy in [Strategy::I, Strategy::II] {
                    let out = run(&spec, &weights, variant, 0.1, &batch, &exec, ForwardStrategy::Fixed(strategy));
                    match &reference {
                        None => reference = Some(out),
                        Some(r) => {
                            for (a, b) in out.iter().zip(r) {
                                let same = a.data().iter().zip(b.data()).all(|(x, y)| x.to_bits() == y.to_bits());
                                assert!(same, "{kind} {variant} workers {workers} strategy {strategy:?}");
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn runs_are_deterministic_and_recording_is_pure() {
    let spec = build_benchmark_net(BenchmarkNet::Yolo, 0.125).unwrap();
    let weights = random_weights(&spec, 8).unwrap();
    let x = random_input(spec.input, 0.1, 4).unwrap();
    let exec = Executor::new(2).unwrap();
    for variant in Variant::ALL {
        let net = PreparedNet::new(&spec, &weights, variant, 0.2, 1).unwrap();
        let input = match variant {
            Variant::SparseInput => FeatureMap::Sparse(SparseTensor3::from_dense(&x, AxisOrder3::Chw).unwrap()),
            _ => FeatureMap::Dense(x.clone()),
        };
        let batch = vec![input; 5];
        let mut runs = Vec::new();
        for record_densities in [true, true, false] {
            let opts = ForwardOptions {
                strategy: ForwardStrategy::default(),
                record_densities,
            };
            runs.push(forward(&net, &batch, &exec, &opts).unwrap());
        }
        let mut a = runs[0].record.clone();
        let mut b = runs[1].record.clone();
        assert!(a.seconds > 0.0);
        a.seconds = 0.0;
        b.seconds = 0.0;
        assert_eq!(a, b);
        assert_eq!(a.strategy, Strategy::II);
        assert_eq!(a.layer_densities.len(), spec.layers.len());
        assert!(a.layer_densities.iter().all(|d| (0.0..=1.0).contains(d)));
        assert!(runs[2].record.layer_densities.is_empty());
        for r in &runs[1..] {
            for (p, q) in r.outputs.iter().zip(&runs[0].outputs) {
                assert_eq!(p.to_dense(), q.to_dense());
            }
        }
    }
}

/// Density of the tensor handed to each following non-activation layer:
/// an activation's output replaces that of the layer it follows.
fn stage_densities(spec: &NetworkSpec, densities: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for (i, layer) in spec.layers.iter().enumerate() {
        if matches!(layer, LayerSpec::Activation(_)) {
            *out.last_mut().unwrap() = densities[i];
        } else {
            out.push(densities[i]);
        }
    }
    out
}

fn evolution(kind: BenchmarkNet, seed: u64) -> (NetworkSpec, Vec<Vec<f64>>) {
    let spec = build_benchmark_net(kind, 0.25).unwrap();
    let weights = random_weights(&spec, seed).unwrap();
    let rows = density_evolution(&spec, &weights, &SWEEP, seed, &Executor::new(4).unwrap()).unwrap();
    let per_input = rows
        .chunks(spec.layers.len() + 1)
        .map(|c| c[1..].iter().map(|r| r.output_density).collect())
        .collect();
    (spec, per_input)
}

#[test]
fn batch_norm_nets_densify_within_three_blocks() {
    let (spec, table) = evolution(BenchmarkNet::Yolo, 1);
    // The first three blocks end at the third pooling layer.
    let third_pool = spec
        .layers
        .iter()
        .enumerate()
        .filter(|(_, l)| matches!(l, LayerSpec::Pool { .. }))
        .nth(2)
        .unwrap()
        .0;
    for (rho, densities) in SWEEP.iter().zip(&table) {
        let peak = densities[..=third_pool].iter().cloned().fold(0.0, f64::max);
        assert!(peak >= 0.99, "input density {rho}: {densities:?}");
    }
}

#[test]
fn relu_keeps_tensors_sparser() {
    let (with, a) = evolution(BenchmarkNet::Vgg16, 2);
    let (without, b) = evolution(BenchmarkNet::Vgg16NoAct, 2);
    for ((rho, x), y) in SWEEP.iter().zip(&a).zip(&b) {
        let (x, y) = (stage_densities(&with, x), stage_densities(&without, y));
        assert_eq!(x.len(), y.len());
        for (stage, (p, q)) in x.iter().zip(&y).enumerate() {
            assert!(p <= q, "input density {rho} stage {stage}: {p} > {q}");
        }
    }
    // Without activations the deep layers fill up.
    let deep = b[2].iter().rev().take(3).cloned().fold(1.0, f64::min);
    assert!(deep >= 0.99, "{:?}", b[2]);
}
