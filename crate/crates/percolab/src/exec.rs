//! Rayon-backed executor.

use percolab_core::Executor;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "PERCOLAB_THREADS";

/// Replicas run on a private thread pool. Results come back in index
/// order, so the thread count never changes an estimate.
pub struct Pool {
    pool: ThreadPool,
}

impl Pool {
    /// `threads == 0` lets rayon pick one thread per core.
    pub fn new(threads: usize) -> anyhow::Result<Self> {
        let pool = ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(Pool { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Pool {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}

/// Thread count from the flag, then the environment, then 0 (automatic).
pub fn resolve_threads(flag: Option<usize>) -> anyhow::Result<usize> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            v.trim().parse().map_err(|_| anyhow::anyhow!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))
        }
        _ => Ok(0),
    }
}
