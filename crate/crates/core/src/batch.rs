//! Batch evaluation helpers: data-parallel when the `parallel` feature is
//! enabled, sequential otherwise.
//!
//! The verification suite and trajectory sampling are embarrassingly parallel
//! over independent samples.  Inputs are always *generated* sequentially from
//! a seeded stream; only the pure evaluation step fans out, and reductions
//! use `max` (associative and commutative in floating point), so results are
//! bit-identical regardless of thread count or feature selection.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Sequential reference implementation; always available so benchmarks can
/// compare both execution strategies in one build.
pub fn map_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Map a pure function over a batch, in parallel when enabled.
#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Map a pure function over a batch, in parallel when enabled.
#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    map_sequential(items, f)
}

/// Largest residual over a batch (`-inf` for an empty batch).
pub fn max_residual<T, F>(items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    map(items, f).into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Sequential counterpart of [`max_residual`] for benchmarks.
pub fn max_residual_sequential<T, F>(items: &[T], f: F) -> f64
where
    F: Fn(&T) -> f64,
{
    map_sequential(items, f)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}
