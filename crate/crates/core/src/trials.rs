//! Fan-out of independent trials over a fixed-size worker pool.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

/// Worker pool of an explicit size. Results come back in trial order, so
/// output never depends on the number of workers.
#[derive(Debug)]
pub struct TrialPool {
    workers: usize,
    pool: Option<ThreadPool>,
}

impl TrialPool {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidParameter("worker count must be at least 1".into()));
        }
        let pool = if workers == 1 {
            None
        } else {
            Some(
                ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?,
            )
        };
        Ok(TrialPool { workers, pool })
    }

    pub fn sequential() -> Self {
        TrialPool { workers: 1, pool: None }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Evaluates `f(0), …, f(count − 1)`.
    pub fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match &self.pool {
            None => (0..count).map(f).collect(),
            Some(pool) => pool.install(|| (0..count).into_par_iter().map(f).collect()),
        }
    }
}

impl Default for TrialPool {
    fn default() -> Self {
        TrialPool::sequential()
    }
}
