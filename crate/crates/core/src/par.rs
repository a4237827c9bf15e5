//! Index-parallel map with an optional fixed worker count.
//!
//! Each index is computed independently and results are collected in index
//! order, so output never depends on the number of workers.

/// Hardware parallelism, for callers that were not given a worker count.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(len: usize, threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;

    let run = || (0..len).into_par_iter().map(&f).collect();
    match threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(_) => (0..len).map(&f).collect(),
        },
        _ => run(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(len: usize, _threads: Option<usize>, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}
