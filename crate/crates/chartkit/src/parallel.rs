//! Order-preserving fan-out over a fixed-size worker pool.

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{Result, ToolError};

pub struct Pool {
    pool: ThreadPool,
}

impl Pool {
    /// `workers = 0` uses one thread per available core.
    pub fn new(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| ToolError::Config(format!("thread pool: {e}")))?;
        Ok(Self { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `items.map(f)`, results in input order.
    pub fn map<T: Sync, R: Send>(&self, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        self.pool.install(|| items.par_iter().map(f).collect())
    }
}
