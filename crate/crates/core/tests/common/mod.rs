#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparse_infer::sparse::{prune_random, DenseMatrix, DenseTensor3, Dims3};

pub const DENSITIES: [f64; 5] = [0.01, 0.05, 0.10, 0.50, 1.0];

/// Kernel tolerance: `|a - b| <= KERNEL_RTOL * sum|x * f| + KERNEL_ATOL`.
pub const KERNEL_RTOL: f64 = 1e-5;
pub const KERNEL_ATOL: f64 = 1e-6;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on `[lo, hi)` with exact zeros replaced by `lo`.
pub fn random_tensor(rng: &mut ChaCha8Rng, dims: Dims3, lo: f32, hi: f32) -> DenseTensor3 {
    DenseTensor3::from_fn(dims, |_, _, _| {
        let v: f32 = rng.random_range(lo..hi);
        if v == 0.0 {
            lo
        } else {
            v
        }
    })
}

/// Uniform on `[-0.5, 0.5)`, pruned to `density`.
pub fn random_sparse_tensor(rng: &mut ChaCha8Rng, dims: Dims3, density: f64) -> DenseTensor3 {
    let t = random_tensor(rng, dims, -0.5, 0.5);
    let seed = rng.random();
    prune_random(&t, density, seed).unwrap()
}

/// Direct convolution in f64, written independently of the library.
/// Returns `(values, magnitudes)` row-major over the `n_h x n_w` output,
/// where the magnitude is the sum of absolute products.
pub struct ConvOracle {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

pub fn conv_oracle(input: &DenseTensor3, filter: &DenseTensor3, stride: usize, padding: usize) -> ConvOracle {
    let (id, fd) = (input.dims(), filter.dims());
    assert_eq!(id.c, fd.c);
    let rows = (id.h + 2 * padding - fd.h) / stride + 1;
    let cols = (id.w + 2 * padding - fd.w) / stride + 1;
    let mut values = vec![0.0; rows * cols];
    let mut magnitudes = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            let (mut v, mut m) = (0.0f64, 0.0f64);
            for c in 0..fd.c {
                for k in 0..fd.h {
                    for l in 0..fd.w {
                        let h = (i * stride + k) as isize - padding as isize;
                        let w = (j * stride + l) as isize - padding as isize;
                        if h < 0 || w < 0 || h >= id.h as isize || w >= id.w as isize {
                            continue;
                        }
                        let p = input.get(c, h as usize, w as usize) as f64 * filter.get(c, k, l) as f64;
                        v += p;
                        m += p.abs();
                    }
                }
            }
            values[i * cols + j] = v;
            magnitudes[i * cols + j] = m;
        }
    }
    ConvOracle {
        rows,
        cols,
        values,
        magnitudes,
    }
}

/// Checks `got` against the oracle; returns a description of the first
/// offending element.
pub fn check_oracle(got: &DenseMatrix, oracle: &ConvOracle) -> Result<(), String> {
    if (got.rows(), got.cols()) != (oracle.rows, oracle.cols) {
        return Err(format!(
            "shape {}x{} vs {}x{}",
            got.rows(),
            got.cols(),
            oracle.rows,
            oracle.cols
        ));
    }
    for (e, (&a, (&b, &m))) in got
        .data()
        .iter()
        .zip(oracle.values.iter().zip(&oracle.magnitudes))
        .enumerate()
    {
        if (a as f64 - b).abs() > KERNEL_RTOL * m + KERNEL_ATOL {
            return Err(format!("element {e}: {a} vs {b} (magnitude {m})"));
        }
    }
    Ok(())
}

/// Norm-wise relative closeness: `max|a - b| <= rtol * max|b|`.
pub fn max_rel_error(a: &[f32], b: &[f32]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs() as f64));
    let diff = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((*x as f64 - *y as f64).abs()));
    if diff == 0.0 {
        0.0
    } else {
        diff / scale.max(f64::MIN_POSITIVE)
    }
}
