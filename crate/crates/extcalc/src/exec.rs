//! Sequential/parallel execution switch.
//!
//! Data-parallel inner loops (per-degree kernels in a resolution step, May
//! scans over a range of exponents, monomial sweeps) go through [`map_range`]
//! so that the same code runs sequentially or on the rayon thread pool. With
//! the `parallel` feature disabled, `Parallel` silently degrades to
//! `Sequential`. Results are collected in index order either way, so output
//! never depends on the schedule.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Apply `f` to every index in `0..n`, returning results in index order.
pub fn map_range<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => (0..n).into_par_iter().map(f).collect(),
        #[cfg(not(feature = "parallel"))]
        ExecMode::Parallel => (0..n).map(f).collect(),
    }
}

/// Apply `f` to every element of a slice, returning results in input order.
pub fn map_slice<'a, S, T, F>(mode: ExecMode, items: &'a [S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&'a S) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items.par_iter().map(f).collect(),
        #[cfg(not(feature = "parallel"))]
        ExecMode::Parallel => items.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let sq = |i: usize| i * i;
        assert_eq!(
            map_range(ExecMode::Sequential, 100, sq),
            map_range(ExecMode::Parallel, 100, sq)
        );
        let v: Vec<usize> = (0..50).collect();
        assert_eq!(
            map_slice(ExecMode::Sequential, &v, |x| x + 1),
            map_slice(ExecMode::Parallel, &v, |x| x + 1)
        );
    }
}
