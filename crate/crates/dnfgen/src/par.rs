//! Internal dispatch between the rayon-backed and sequential map.
//!
//! `workers == 1` always takes the sequential path, `workers == 0` uses the
//! global rayon pool, and any other value builds a pool of that size. The
//! output order matches the input order in every mode, so callers see
//! identical results regardless of the feature flag or worker count.

#[cfg(feature = "parallel")]
pub(crate) fn map<T, U, F>(items: Vec<T>, workers: usize, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;

    match workers {
        1 => items.into_iter().map(f).collect(),
        0 => items.into_par_iter().map(f).collect(),
        n => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| items.into_par_iter().map(f).collect()),
            Err(_) => items.into_iter().map(f).collect(),
        },
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map<T, U, F>(items: Vec<T>, _workers: usize, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}
