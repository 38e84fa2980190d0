mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use sparse_infer::kernels::{conv_sparse_input_dense_filter, transpose_matrix, transpose_tensor3, ConvGeometry};
use sparse_infer::layers::{
    conv_forward_strategy_i, conv_forward_strategy_ii, merged_conv_pool, pad, pool_standalone,
    relu_dense, relu_sparse, ConvParams, Executor, FeatureMap, PoolMode, PoolWindow,
};
use sparse_infer::sparse::{
    decode_dense3, decode_sparse3, encode_dense3, encode_sparse3, kept_count, prune_random, AxisOrder2,
    AxisOrder3, Density, DenseMatrix, DenseTensor3, Dims3, SparseMatrix, SparseTensor3, SparseTensor4,
};

fn dims(max_c: usize, max_hw: usize) -> impl Strategy<Value = Dims3> {
    (1..=max_c, 1..=max_hw, 1..=max_hw).prop_map(|(c, h, w)| Dims3::new(c, h, w))
}

fn density() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.01, 0.05, 0.1, 0.2, 0.5, 1.0])
}

fn order3() -> impl Strategy<Value = AxisOrder3> {
    prop::sample::select(AxisOrder3::ALL.to_vec())
}

fn tensor(d: Dims3, density: f64, seed: u64) -> DenseTensor3 {
    random_sparse_tensor(&mut rng(seed), d, density)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sparsify_densify_round_trip(d in dims(6, 9), rho in density(), seed in any::<u64>(), order in order3()) {
        let t = tensor(d, rho, seed);
        let s = SparseTensor3::from_dense(&t, order).unwrap();
        s.validate().unwrap();
        prop_assert_eq!(s.to_dense(), t.clone());
        // One node per nonzero plus one sentinel per segment.
        prop_assert_eq!(s.nnz(), t.nnz());
        prop_assert_eq!(s.nodes().len(), t.nnz() + s.segment_count());
    }

    #[test]
    fn orders_hold_the_same_tensor(d in dims(5, 7), rho in density(), seed in any::<u64>(), a in order3(), b in order3()) {
        let t = tensor(d, rho, seed);
        let x = SparseTensor3::from_dense(&t, a).unwrap();
        let y = SparseTensor3::from_dense(&x.to_dense(), b).unwrap();
        prop_assert_eq!(y.to_dense(), t);
        prop_assert_eq!(x.nnz(), y.nnz());
    }

    #[test]
    fn codecs_round_trip(d in dims(5, 7), rho in density(), seed in any::<u64>(), order in order3()) {
        let t = tensor(d, rho, seed);
        prop_assert_eq!(decode_dense3(&encode_dense3(&t)).unwrap(), t.clone());
        let s = SparseTensor3::from_dense(&t, order).unwrap();
        let bytes = encode_sparse3(&s);
        let back = decode_sparse3(&bytes).unwrap();
        prop_assert_eq!(encode_sparse3(&back), bytes);
        prop_assert_eq!(back, s);
    }

    #[test]
    fn matrix_transpose_is_an_involution(rows in 1usize..12, cols in 1usize..12, rho in density(), seed in any::<u64>(), wh in any::<bool>()) {
        let t = tensor(Dims3::new(1, rows, cols), rho, seed);
        let dense = DenseMatrix::from_vec(rows, cols, (0..rows * cols).map(|e| t.data()[e]).collect()).unwrap();
        let order = if wh { AxisOrder2::Wh } else { AxisOrder2::Hw };
        let m = SparseMatrix::from_dense(&dense, order);
        let tr = transpose_matrix(&m);
        tr.validate().unwrap();
        prop_assert_eq!(tr.order(), order.transposed());
        prop_assert_eq!(tr.to_dense(), dense.clone());
        prop_assert_eq!(transpose_matrix(&tr), m);
    }

    #[test]
    fn tensor_transpose_preserves_values(d in dims(6, 9), rho in density(), seed in any::<u64>()) {
        let t = tensor(d, rho, seed);
        let whc = SparseTensor3::from_dense(&t, AxisOrder3::Whc).unwrap();
        let chw = transpose_tensor3(&whc).unwrap();
        chw.validate().unwrap();
        prop_assert_eq!(chw.order(), AxisOrder3::Chw);
        prop_assert_eq!(chw.to_dense(), t.clone());
        prop_assert_eq!(chw, SparseTensor3::from_dense(&t, AxisOrder3::Chw).unwrap());
    }

    #[test]
    fn strategies_are_bit_identical(
        d in dims(6, 12), n in 1usize..6, k in prop::sample::select(vec![1usize, 3, 5]),
        stride in 1usize..=2, padding in 0usize..=1, rho in density(), seed in any::<u64>(), workers in 1usize..=3,
    ) {
        prop_assume!(d.h + 2 * padding >= k && d.w + 2 * padding >= k);
        let mut r = rng(seed);
        let x = random_tensor(&mut r, d, -1.0, 1.0);
        let filters: Vec<_> = (0..n).map(|_| random_sparse_tensor(&mut r, Dims3::new(d.c, k, k), rho)).collect();
        let bias: Vec<f32> = (0..n).map(|_| r.random_range(-0.5..0.5)).collect();
        let bank = SparseTensor4::from_dense(&filters, AxisOrder3::Chw).unwrap();
        let p = ConvParams::new(stride, padding);
        let a = conv_forward_strategy_i(&x, &bank, &bias, p, &Executor::new(workers).unwrap()).unwrap();
        let b = conv_forward_strategy_ii(&x, &bank, &bias, p).unwrap();
        prop_assert_eq!(a.data(), b.data());
    }

    #[test]
    fn fused_pooling_is_exact(
        c in 1usize..5, ph in 1usize..=3, pw in 1usize..=3, bh in 1usize..4, bw in 1usize..4,
        k in prop::sample::select(vec![1usize, 3]), rho in density(), seed in any::<u64>(), max in any::<bool>(),
    ) {
        // Pick the input so that the convolution output tiles by the window.
        let (out_h, out_w) = (ph * bh, pw * bw);
        let d = Dims3::new(c, out_h + k - 1, out_w + k - 1);
        let mut r = rng(seed);
        let x = random_sparse_tensor(&mut r, d, rho);
        let f = random_tensor(&mut r, Dims3::new(c, k, k), -0.5, 0.5);
        let xs = SparseTensor3::from_dense(&x, AxisOrder3::Chw).unwrap();
        let geom = ConvGeometry::new(d, f.dims(), 1, 0).unwrap();
        let mode = if max { PoolMode::Max } else { PoolMode::Avg };
        let window = PoolWindow { h: ph, w: pw };
        let (fused, _) = merged_conv_pool(&xs.as_ref(), &f, &geom, window, mode).unwrap();
        let conv = conv_sparse_input_dense_filter(&xs.as_ref(), &f, &geom).unwrap().to_dense();
        let plane = DenseTensor3::from_fn(Dims3::new(1, out_h, out_w), |_, h, w| conv.get(h, w));
        let unfused = pool_standalone(&plane, window, mode).unwrap();
        let fused = fused.to_dense();
        for i in 0..bh {
            for j in 0..bw {
                prop_assert_eq!(fused.get(i, j).to_bits(), unfused.get(0, i, j).to_bits());
            }
        }
    }

    #[test]
    fn sparse_elementwise_layers_match_dense(d in dims(5, 8), rho in density(), seed in any::<u64>(), p in 0usize..3) {
        let t = tensor(d, rho, seed);
        let s = SparseTensor3::from_dense(&t, AxisOrder3::Chw).unwrap();
        let mut r = t.clone();
        relu_dense(&mut r);
        prop_assert_eq!(relu_sparse(&s).to_dense(), r);
        let padded = pad(&FeatureMap::Sparse(s), p).unwrap();
        prop_assert!(padded.is_sparse());
        prop_assert_eq!(padded.to_dense(), pad(&FeatureMap::Dense(t), p).unwrap().into_dense());
    }

    #[test]
    fn pruning_keeps_a_subset_of_the_requested_size(d in dims(6, 10), rho in density(), seed in any::<u64>()) {
        let t = random_tensor(&mut rng(seed), d, 0.1, 1.0);
        let p = prune_random(&t, rho, seed).unwrap();
        prop_assert_eq!(p.nonzeros(), kept_count(d.len(), rho));
        for (a, b) in p.data().iter().zip(t.data()) {
            prop_assert!(*a == 0.0 || a == b);
        }
        prop_assert_eq!(prune_random(&t, rho, seed).unwrap(), p);
    }
}
