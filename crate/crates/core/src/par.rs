//! Block-parallel map/reduce used by the exhaustive sweeps.
//!
//! Work is split into a fixed number of blocks that does not depend on the
//! thread count, and partial results are merged in block order, so the output
//! is identical whether or not the `parallel` feature is enabled.

#[cfg(feature = "parallel")]
pub(crate) fn map_reduce<T, F, I, M>(n_blocks: u64, f: F, init: &I, merge: &M) -> T
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
    I: Fn() -> T + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let parts: Vec<T> = (0..n_blocks).into_par_iter().map(f).collect();
    parts.into_iter().fold(init(), merge)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_reduce<T, F, I, M>(n_blocks: u64, f: F, init: &I, merge: &M) -> T
where
    F: Fn(u64) -> T,
    I: Fn() -> T,
    M: Fn(T, T) -> T,
{
    (0..n_blocks).map(f).fold(init(), merge)
}

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
