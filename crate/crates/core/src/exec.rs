//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) work is spread over the rayon
//! pool; without it every call runs on the current thread. [`Mode`] lets a
//! caller pick either path at run time so the two can be benchmarked against
//! each other in one build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Auto,
    Sequential,
}

impl Mode {
    fn parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Mode::Auto
    }
}

/// Cap the global worker pool. Returns false if the pool was already built
/// or the crate was compiled without parallelism.
pub fn configure_threads(n: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        false
    }
}

/// Fold `0..n` in chunks and merge the partial results.
pub fn fold_range<A, F, C>(mode: Mode, n: u64, init: impl Fn() -> A + Sync + Send, fold: F, combine: C) -> A
where
    A: Send,
    F: Fn(A, u64) -> A + Sync + Send,
    C: Fn(A, A) -> A + Sync + Send,
{
    if mode.parallel() {
        #[cfg(feature = "parallel")]
        {
            return (0..n)
                .into_par_iter()
                .fold(&init, &fold)
                .reduce(&init, &combine);
        }
    }
    let _ = &combine;
    (0..n).fold(init(), fold)
}

/// Map each item, preserving order.
pub fn map<T, U, F>(mode: Mode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    if mode.parallel() {
        #[cfg(feature = "parallel")]
        {
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

/// True when `pred` holds for every item.
pub fn all<T, F>(mode: Mode, items: &[T], pred: F) -> bool
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    if mode.parallel() {
        #[cfg(feature = "parallel")]
        {
            return items.par_iter().all(pred);
        }
    }
    items.iter().all(pred)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let sum = |m| fold_range(m, 1000, || 0u64, |a, k| a + k, |a, b| a + b);
        assert_eq!(sum(Mode::Auto), sum(Mode::Sequential));
        let xs: Vec<u32> = (0..50).collect();
        assert_eq!(map(Mode::Auto, &xs, |x| x * 2), map(Mode::Sequential, &xs, |x| x * 2));
        assert!(all(Mode::Auto, &xs, |&x| x < 50));
    }
}
