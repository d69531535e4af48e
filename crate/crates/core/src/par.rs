//! Data-parallel helpers. With the `parallel` feature the row sweeps run on
//! the rayon pool; without it every helper degrades to a plain loop.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f(row_index, row)` to each `row_len`-sized chunk of `data`.
pub fn for_each_row<T, F>(data: &mut [T], row_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(row_len)
            .enumerate()
            .for_each(|(j, row)| f(j, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (j, row) in data.chunks_mut(row_len).enumerate() {
            f(j, row);
        }
    }
}

/// Collect `f(i)` for `i in 0..n`, preserving order.
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    {
        rayon::join(a, b)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (a(), b())
    }
}

/// A worker pool of fixed size, reusable across calls (the benches install
/// the same pool every iteration). Without `parallel` it is a no-op wrapper.
pub struct Pool {
    #[cfg(feature = "parallel")]
    inner: Option<rayon::ThreadPool>,
}

impl Pool {
    pub fn new(threads: usize) -> Self {
        #[cfg(feature = "parallel")]
        {
            Self { inner: rayon::ThreadPoolBuilder::new().num_threads(threads).build().ok() }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = threads;
            Self {}
        }
    }

    /// Run `f` with this pool as the current one.
    pub fn install<R, F>(&self, f: F) -> R
    where
        R: Send,
        F: FnOnce() -> R + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(p) = &self.inner {
            return p.install(f);
        }
        f()
    }
}

/// Run `f` on a pool capped at `threads` workers. `threads == 1` gives the
/// sequential baseline.
pub fn with_threads<R, F>(threads: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    Pool::new(threads).install(f)
}

/// Cap the global pool from `CALABI_THREADS`. Returns the cap if one was applied.
pub fn init_from_env() -> Option<usize> {
    let n = std::env::var("CALABI_THREADS")
        .ok()?
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)?;
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Some(n)
}
