//! Data-parallel map and fold over a slice.
//!
//! With the `parallel` feature and `jobs != 1` work runs on a rayon pool of
//! `jobs` threads (`0` = available parallelism). Otherwise it runs on the
//! calling thread. Both paths return results in input order.

/// Worker count for a `--jobs` value.
pub fn effective_jobs(jobs: usize) -> usize {
    if jobs == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        jobs
    }
}

pub fn is_parallel_available() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(feature = "parallel")]
fn pool(jobs: usize) -> Option<rayon::ThreadPool> {
    let n = effective_jobs(jobs);
    if n <= 1 {
        return None;
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()
}

pub fn map<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if let Some(pool) = pool(jobs) {
        use rayon::prelude::*;
        return pool.install(|| items.par_iter().map(&f).collect());
    }
    let _ = jobs;
    items.iter().map(f).collect()
}

/// Folds items into per-worker accumulators, then reduces them pairwise.
/// `reduce` must be associative with `identity` as its unit.
pub fn fold_reduce<T, A, I, F, R>(items: &[T], jobs: usize, identity: I, fold: F, reduce: R) -> A
where
    T: Sync,
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(A, &T) -> A + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if let Some(pool) = pool(jobs) {
        use rayon::prelude::*;
        return pool.install(|| {
            items
                .par_iter()
                .fold(&identity, &fold)
                .reduce(&identity, &reduce)
        });
    }
    let _ = (jobs, &reduce);
    items.iter().fold(identity(), fold)
}
