//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the maps below run on the rayon pool. Without
//! it, or inside [`sequential`], they are ordinary iterator maps. Results are
//! always returned in index order, so output never depends on scheduling.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQ: Cell<bool> = const { Cell::new(false) };
}

/// Run `f` with every helper in this module forced onto the calling thread.
/// Used by the benchmarks to compare both paths in one binary.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    let old = FORCE_SEQ.with(|c| c.replace(true));
    let out = f();
    FORCE_SEQ.with(|c| c.set(old));
    out
}

/// True when the helpers will actually fan out.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQ.with(|c| c.get())
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

/// Smallest index in `0..n` for which `f` returns `Some`, with its value.
/// Every index may be evaluated in parallel mode; the answer is the same.
pub fn find_first<T, F>(n: usize, f: F) -> Option<(usize, T)>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            return (0..n)
                .into_par_iter()
                .filter_map(|i| f(i).map(|v| (i, v)))
                .min_by_key(|(i, _)| *i);
        }
    }
    (0..n).find_map(|i| f(i).map(|v| (i, v)))
}
