//! Execution policy for data-parallel loops.
//!
//! Every parallel loop in the crate maps an indexed work list to an ordered
//! result vector, so results are identical whichever policy runs them.

/// How a batch of independent work items is executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Rayon work-stealing. Falls back to sequential without the `parallel` feature.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Maps `f` over `items`, preserving input order in the output.
pub fn map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Like [`map`] for fallible work; returns the first error in input order.
pub fn try_map<T, R, E, F>(exec: Exec, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(exec, items, f).into_iter().collect()
}
