//! Replica execution.
//!
//! Replica `i` always draws from stream `i` and results come back in replica
//! order, so the parallel and sequential paths produce identical output.
//! The parallel path needs the `parallel` feature; without it every call runs
//! sequentially.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Runs `f(0), f(1), ..., f(count - 1)` and collects the results in order.
pub fn map_replicas<T, F>(count: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => map_sequential(count, f),
        Execution::Parallel => map_parallel(count, f),
    }
}

fn map_sequential<T, F: Fn(u64) -> T>(count: usize, f: F) -> Vec<T> {
    (0..count as u64).map(f).collect()
}

#[cfg(feature = "parallel")]
fn map_parallel<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count as u64).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_parallel<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    map_sequential(count, f)
}

/// Runs `op` with at most `threads` worker threads. `None` uses the global
/// pool. Without the `parallel` feature the thread count is ignored.
#[cfg(feature = "parallel")]
pub fn with_threads<R: Send>(threads: Option<usize>, op: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        },
        None => op(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R: Send>(_threads: Option<usize>, op: impl FnOnce() -> R + Send) -> R {
    op()
}
