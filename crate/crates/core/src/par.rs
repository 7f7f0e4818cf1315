//! Data-parallel helpers. With the `parallel` feature the parallel mode runs
//! on rayon's pool; without it both modes are plain sequential loops. Results
//! never depend on the mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Parallel when built with the `parallel` feature, sequential otherwise.
    #[cfg_attr(feature = "parallel", default)]
    Parallel,
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
}

/// The lowest `i` in `0..len` for which `f(i)` is `Some`, with its value.
/// The answer does not depend on scheduling.
pub fn find_first<T, F>(len: u64, f: F) -> Option<(u64, T)>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    find_first_with(Execution::default(), len, f)
}

pub fn find_first_with<T, F>(exec: Execution, len: u64, f: F) -> Option<(u64, T)>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        return (0..len)
            .into_par_iter()
            .find_map_first(|i| f(i).map(|t| (i, t)));
    }
    let _ = exec;
    (0..len).find_map(|i| f(i).map(|t| (i, t)))
}

/// `items.iter().map(f).collect()`, in input order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_with(Execution::default(), items, f)
}

pub fn map_with<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}
