//! Execution strategy for data-parallel loops.
//!
//! Every parallel map here is an indexed map followed by an ordered collect,
//! so results never depend on the scheduler or the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    /// Uses the rayon global pool; identical to `Sequential` without the
    /// `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Maps `f` over `0..len`, returning results in index order.
pub fn map_indices<R, F>(exec: Execution, len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..len).into_par_iter().map(f).collect(),
        _ => (0..len).map(f).collect(),
    }
}

/// Maps `f` over a slice, returning results in slice order.
pub fn map_slice<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_agree_in_order() {
        let seq = map_indices(Execution::Sequential, 1000, |i| (i as f64).sqrt());
        let par = map_indices(Execution::Parallel, 1000, |i| (i as f64).sqrt());
        assert_eq!(seq, par);
        let items: Vec<u64> = (0..257).collect();
        assert_eq!(
            map_slice(Execution::Sequential, &items, |v| v * 3),
            map_slice(Execution::Parallel, &items, |v| v * 3)
        );
    }
}
