use rayon::prelude::*;

use crate::{Error, Result};

/// Batch size at or below which [`ForwardStrategy::Auto`] picks strategy I.
pub const DEFAULT_AUTO_THRESHOLD: usize = 4;

/// How a convolution layer is split across workers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// One convolution per filter, parallel over filters; matrices are then
    /// stacked and transposed into the output.
    I,
    /// Output tensor written directly, one instance per worker.
    II,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::I => "I",
            Strategy::II => "II",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForwardStrategy {
    Fixed(Strategy),
    /// Strategy I for batches of at most `threshold` instances, else II.
    Auto { threshold: usize },
}

impl Default for ForwardStrategy {
    fn default() -> Self {
        ForwardStrategy::Auto {
            threshold: DEFAULT_AUTO_THRESHOLD,
        }
    }
}

impl ForwardStrategy {
    pub fn resolve(self, batch: usize) -> Strategy {
        match self {
            ForwardStrategy::Fixed(s) => s,
            ForwardStrategy::Auto { threshold } if batch <= threshold => Strategy::I,
            ForwardStrategy::Auto { .. } => Strategy::II,
        }
    }
}

/// Fixed-size worker pool. Results are always collected in index order, so
/// the worker count never changes what a computation produces.
pub struct Executor {
    workers: usize,
    pool: Option<rayon::ThreadPool>,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor").field("workers", &self.workers).finish()
    }
}

impl Executor {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::invalid("worker count must be at least 1"));
        }
        let pool = if workers > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .thread_name(|i| format!("sparse-infer-{i}"))
                    .build()
                    .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?,
            )
        } else {
            None
        };
        Ok(Executor { workers, pool })
    }

    pub fn sequential() -> Self {
        Executor {
            workers: 1,
            pool: None,
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Evaluates `f(0..n)` and returns the results in index order.
    pub fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Send + Sync,
    {
        match &self.pool {
            Some(pool) if n > 1 => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
            _ => (0..n).map(f).collect(),
        }
    }

    pub fn try_map<T, F>(&self, n: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Send + Sync,
    {
        self.map(n, f).into_iter().collect()
    }
}
