//! Replica execution.
//!
//! Estimators describe one replica as a pure function of its index and
//! collect the results in index order. Aggregation is always a sequential
//! fold over that vector, so results do not depend on how an executor
//! schedules the work.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Evaluates `f(0), .., f(n-1)` and returns the results in index order.
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

impl<X: Executor + ?Sized> Executor for &X {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (**self).map(n, f)
    }
}
