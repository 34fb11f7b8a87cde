//! Index-parallel execution with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over rayon's thread
//! pool; without it every call runs on the current thread. Results never
//! depend on the schedule: callers reduce with associative, exact operations
//! or collect in index order.

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    #[default]
    Parallel,
}

/// `map` over `0..n` combined with an associative `reduce`.
pub fn map_reduce<T, I, M, R>(n: u64, exec: Execution, identity: I, map: M, reduce: R) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    M: Fn(u64) -> Result<T> + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n)
                .into_par_iter()
                .map(map)
                .try_reduce(&identity, |a, b| Ok(reduce(a, b)))
        }
        _ => (0..n).try_fold(identity(), |acc, i| Ok(reduce(acc, map(i)?))),
    }
}

/// `map` over `0..n`, collected in index order.
pub fn map_collect<T, M>(n: u64, exec: Execution, map: M) -> Result<Vec<T>>
where
    T: Send,
    M: Fn(u64) -> Result<T> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(map).collect()
        }
        _ => (0..n).map(map).collect(),
    }
}

/// Runs `f` with at most `threads` workers; `None` keeps the global pool.
pub fn with_thread_cap<T, F>(threads: Option<usize>, f: F) -> T
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            return pool.install(f);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    f()
}
