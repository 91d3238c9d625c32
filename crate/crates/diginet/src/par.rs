//! Data-parallel helpers over index ranges.
//!
//! With the `parallel` feature (default) these run on the rayon global pool;
//! without it they are plain sequential loops with identical results. All
//! reductions used by the crate are exact, so the result never depends on the
//! split.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(0..len).map(f).collect()`.
pub fn map_collect<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Maps every index and folds the results with an associative `reduce`.
pub fn map_reduce<T, F, R>(len: usize, identity: T, f: F, reduce: R) -> T
where
    T: Send + Sync + Clone,
    F: Fn(usize) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).reduce(|| identity.clone(), reduce)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).fold(identity, reduce)
    }
}

/// True when `f` holds for every index.
pub fn map_all<F>(len: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().all(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).all(f)
    }
}

/// Splits `0..len` into contiguous chunks of at most `chunk` indices and maps
/// each chunk range.
pub fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let count = len.div_ceil(chunk);
    map_collect(count, |c| f(c * chunk..((c + 1) * chunk).min(len)))
}

/// A chunk size giving a few chunks per worker thread.
pub fn chunk_size(len: usize) -> usize {
    len.div_ceil(threads() * 4).max(1)
}

/// Number of worker threads the helpers will use.
pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Runs `f` with all helpers confined to one thread.
pub fn sequential<T: Send, F: FnOnce() -> T + Send>(f: F) -> T {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("single-thread pool")
            .install(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        f()
    }
}
