//! Data-parallel map over an index range: rayon when the `parallel`
//! feature is on, a plain loop otherwise. Output order matches input
//! order in both modes, so results are independent of scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// The first error encountered (in index order for the sequential build,
/// any for the parallel one) aborts the map.
#[cfg(feature = "parallel")]
pub fn try_map_indexed<O, F>(n: usize, f: F) -> crate::Result<Vec<O>>
where
    O: Send,
    F: Fn(usize) -> crate::Result<O> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn try_map_indexed<O, F>(n: usize, f: F) -> crate::Result<Vec<O>>
where
    O: Send,
    F: Fn(usize) -> crate::Result<O> + Sync + Send,
{
    (0..n).map(f).collect()
}
