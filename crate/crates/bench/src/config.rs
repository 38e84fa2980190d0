use std::path::PathBuf;

use sparse_infer::layers::ForwardStrategy;
use sparse_infer::network::{BenchmarkNet, Variant, DESK_INPUT, DESK_SCALE};

use crate::{BenchError, Result};

/// Density sweep used when none is given, as fractions.
pub const DEFAULT_DENSITIES: [f64; 6] = [0.01, 0.05, 0.10, 0.20, 0.50, 1.0];

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub net: BenchmarkNet,
    pub scale: f64,
    /// Spatial extent of the square input image.
    pub input_size: usize,
    pub variant: Variant,
    /// Filter densities for sparse-filter runs, input densities otherwise.
    pub densities: Vec<f64>,
    pub batches: Vec<usize>,
    pub workers: Vec<usize>,
    pub strategy: ForwardStrategy,
    pub reps: usize,
    pub warmup: usize,
    pub seed: u64,
    pub weights: Option<PathBuf>,
    pub timing_csv: Option<PathBuf>,
    pub density_csv: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            net: BenchmarkNet::Vgg16,
            scale: DESK_SCALE,
            input_size: DESK_INPUT,
            variant: Variant::SparseFilter,
            densities: DEFAULT_DENSITIES.to_vec(),
            batches: vec![1],
            workers: vec![1],
            strategy: ForwardStrategy::default(),
            reps: 3,
            warmup: 1,
            seed: 0,
            weights: None,
            timing_csv: None,
            density_csv: None,
        }
    }
}

fn usage(msg: String) -> BenchError {
    BenchError::Usage(msg)
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale <= 1.0) {
            return Err(usage(format!("--scale {} must be in (0, 1]", self.scale)));
        }
        if self.input_size == 0 {
            return Err(usage("input size must be positive".into()));
        }
        if self.densities.is_empty() || self.batches.is_empty() || self.workers.is_empty() {
            return Err(usage("--density, --batch and --workers need at least one value".into()));
        }
        if let Some(d) = self.densities.iter().find(|d| !(**d > 0.0 && **d <= 1.0)) {
            return Err(usage(format!("density {}% must be in (0, 100]", d * 100.0)));
        }
        if self.batches.contains(&0) {
            return Err(usage("batch sizes must be at least 1".into()));
        }
        if self.workers.contains(&0) {
            return Err(usage("worker counts must be at least 1".into()));
        }
        if self.reps < 3 {
            return Err(usage(format!("--reps {} must be at least 3", self.reps)));
        }
        if self.warmup < 1 {
            return Err(usage("--warmup must be at least 1".into()));
        }
        Ok(())
    }
}
