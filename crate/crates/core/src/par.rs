//! Data-parallel mapping helpers.
//!
//! With the `parallel` feature the maps fan out over rayon's pool; without
//! it they run sequentially with identical results. Output order always
//! matches input order, so callers stay deterministic either way.

use crate::error::Result;

/// Inputs shorter than this are mapped inline even when rayon is enabled;
/// the split overhead dominates for tiny workloads.
#[cfg(feature = "parallel")]
const PARALLEL_CUTOFF: usize = 16;

#[cfg(feature = "parallel")]
pub fn map_vec<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    if items.len() < PARALLEL_CUTOFF {
        items.iter().map(f).collect()
    } else {
        items.par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_vec<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn try_map_vec<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    use rayon::prelude::*;
    if items.len() < PARALLEL_CUTOFF {
        items.iter().map(f).collect()
    } else {
        items.par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn try_map_vec<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    F: Fn(&T) -> Result<U>,
{
    items.iter().map(f).collect()
}
