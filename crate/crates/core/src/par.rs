//! Data-parallel loop helpers.
//!
//! Every hot loop in the solvers (closure evaluation per cell, collision
//! solves per cell, random sampling in the property suites) goes through
//! [`Exec`]. With the `parallel` feature enabled `Exec::Parallel` runs on the
//! rayon pool; without the feature both variants run on the calling thread,
//! so results are identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many items a parallel request runs sequentially anyway.
pub const MIN_PARALLEL_LEN: usize = 32;

/// Execution strategy for data-parallel loops.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when this strategy will actually fan out for `len` items.
    pub fn is_parallel_for(self, len: usize) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel && len >= MIN_PARALLEL_LEN
    }

    /// `(0..n).map(f).collect()`.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel_for(n) {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Like [`Exec::map_range`] but for a few coarse jobs: fans out whenever
    /// there is more than one.
    pub fn map_tasks<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel && n > 1 {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Applies `f(chunk_index, chunk)` to consecutive chunks of `data`.
    pub fn for_each_chunk_mut<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        assert!(chunk > 0, "chunk size must be positive");
        #[cfg(feature = "parallel")]
        if self.is_parallel_for(data.len() / chunk) {
            data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
            return;
        }
        data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    }

    /// Fallible variant of [`Exec::for_each_chunk_mut`]; the first error wins.
    pub fn try_for_each_chunk_mut<T, E, F>(self, data: &mut [T], chunk: usize, f: F) -> Result<(), E>
    where
        T: Send,
        E: Send,
        F: Fn(usize, &mut [T]) -> Result<(), E> + Sync + Send,
    {
        assert!(chunk > 0, "chunk size must be positive");
        #[cfg(feature = "parallel")]
        if self.is_parallel_for(data.len() / chunk) {
            return data.par_chunks_mut(chunk).enumerate().try_for_each(|(i, c)| f(i, c));
        }
        data.chunks_mut(chunk).enumerate().try_for_each(|(i, c)| f(i, c))
    }

    /// Sum of `f(i)` over `0..n`.
    pub fn sum_range<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel_for(n) {
            return (0..n).into_par_iter().map(f).sum();
        }
        (0..n).map(f).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let seq = Exec::Sequential.map_range(1000, |i| (i as f64).sqrt());
        let par = Exec::Parallel.map_range(1000, |i| (i as f64).sqrt());
        assert_eq!(seq, par);

        let mut a = vec![1.0_f64; 300];
        let mut b = a.clone();
        Exec::Sequential.for_each_chunk_mut(&mut a, 3, |i, c| c.iter_mut().for_each(|v| *v += i as f64));
        Exec::Parallel.for_each_chunk_mut(&mut b, 3, |i, c| c.iter_mut().for_each(|v| *v += i as f64));
        assert_eq!(a, b);
    }

    #[test]
    fn try_chunks_reports_error() {
        let mut data = vec![0u8; 200];
        let r: Result<(), usize> =
            Exec::Parallel.try_for_each_chunk_mut(&mut data, 2, |i, _| if i == 57 { Err(i) } else { Ok(()) });
        assert_eq!(r, Err(57));
    }
}
