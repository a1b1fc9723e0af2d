//! Data-parallel helpers over sample index ranges.
//!
//! With the `parallel` feature the work is split with rayon; without it every
//! call runs sequentially. Results never depend on the execution mode because
//! each index is evaluated independently and reductions are associative and
//! commutative.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `workers == 1` means sequential, anything else uses the thread pool.
    pub fn from_workers(workers: usize) -> Self {
        if workers == 1 {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    pub fn is_parallel(&self) -> bool {
        cfg!(feature = "parallel") && *self == Execution::Parallel
    }
}

pub(crate) fn map_range<T, F>(exec: Execution, range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).collect();
    }
    let _ = exec;
    range.map(f).collect()
}

pub(crate) fn fold_range<A, F, R>(exec: Execution, range: Range<u64>, identity: fn() -> A, fold: F, reduce: R) -> A
where
    A: Send,
    F: Fn(A, u64) -> A + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return range
            .into_par_iter()
            .fold(identity, &fold)
            .reduce(identity, &reduce);
    }
    let _ = &reduce;
    let _ = exec;
    range.fold(identity(), fold)
}
