//! Execution shims: data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (default) the indexed maps run on the rayon
//! thread pool. Without it they degrade to plain iterator loops. Results are
//! collected in index order either way, so outputs are identical across both
//! modes and across thread counts.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Minimum indices per rayon task; keeps split overhead negligible for
/// cheap per-element kernels.
#[cfg(feature = "parallel")]
const MIN_CHUNK: usize = 1024;

/// Maps `f` over `0..n` and collects the results in order.
#[cfg(feature = "parallel")]
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().with_min_len(MIN_CHUNK).map(f).collect()
}

/// Maps `f` over `0..n` and collects the results in order.
#[cfg(not(feature = "parallel"))]
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Fallible variant of [`map_range`]: stops on the first error.
#[cfg(feature = "parallel")]
pub fn try_map_range<U, E, F>(n: usize, f: F) -> Result<Vec<U>, E>
where
    U: Send,
    E: Send,
    F: Fn(usize) -> Result<U, E> + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .with_min_len(MIN_CHUNK)
        .map(f)
        .collect()
}

/// Fallible variant of [`map_range`]: stops on the first error.
#[cfg(not(feature = "parallel"))]
pub fn try_map_range<U, E, F>(n: usize, f: F) -> Result<Vec<U>, E>
where
    F: Fn(usize) -> Result<U, E>,
{
    (0..n).map(f).collect()
}

/// Always-sequential map over `0..n`. Kept available in every build as the
/// baseline the benchmark suite compares the parallel path against.
pub fn map_range_seq<U, F>(n: usize, f: F) -> Vec<U>
where
    F: FnMut(usize) -> U,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_range_preserves_order() {
        let v = map_range(1000, |i| i * i);
        let w = map_range_seq(1000, |i| i * i);
        assert_eq!(v, w);
    }

    #[test]
    fn try_map_range_propagates_error() {
        let r: Result<Vec<usize>, &str> =
            try_map_range(10, |i| if i == 7 { Err("seven") } else { Ok(i) });
        assert_eq!(r, Err("seven"));
    }
}
