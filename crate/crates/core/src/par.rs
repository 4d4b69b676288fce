//! Data-parallel helpers with a bitwise-reproducible reduction order.
//!
//! Sums are split into fixed-size chunks, each chunk is summed left to right,
//! and the chunk partials are then added left to right. The chunk layout does
//! not depend on the thread count, so the parallel and sequential paths give
//! identical bits. Without the `parallel` feature every [`Exec`] runs
//! sequentially.

/// Number of elements summed serially inside one chunk.
pub const CHUNK: usize = 4096;

/// Execution strategy for the hot loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
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

fn chunk_sum<T, F>(chunk: &[T], f: &F) -> f64
where
    F: Fn(&T) -> f64,
{
    chunk.iter().fold(0.0, |acc, x| acc + f(x))
}

/// `Σ f(x)` over `xs` in the fixed chunked order.
pub fn map_sum<T, F>(exec: Exec, xs: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    let partials: Vec<f64> = match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel if xs.len() > CHUNK => {
            use rayon::prelude::*;
            xs.par_chunks(CHUNK).map(|c| chunk_sum(c, &f)).collect()
        }
        _ => xs.chunks(CHUNK).map(|c| chunk_sum(c, &f)).collect(),
    };
    partials.into_iter().fold(0.0, |acc, p| acc + p)
}

fn add<const N: usize>(mut acc: [f64; N], x: [f64; N]) -> [f64; N] {
    for (a, v) in acc.iter_mut().zip(x) {
        *a += v;
    }
    acc
}

/// Componentwise `Σ f(x)` for `N` accumulators at once, same order as
/// [`map_sum`].
pub fn map_sum_n<T, F, const N: usize>(exec: Exec, xs: &[T], f: F) -> [f64; N]
where
    T: Sync,
    F: Fn(&T) -> [f64; N] + Sync + Send,
{
    let chunk = |c: &[T]| c.iter().fold([0.0; N], |acc, x| add(acc, f(x)));
    let partials: Vec<[f64; N]> = match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel if xs.len() > CHUNK => {
            use rayon::prelude::*;
            xs.par_chunks(CHUNK).map(chunk).collect()
        }
        _ => xs.chunks(CHUNK).map(chunk).collect(),
    };
    partials.into_iter().fold([0.0; N], add)
}

/// `Σ f(x)` with the default executor.
pub fn sum_by<T, F>(xs: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    map_sum(Exec::default(), xs, f)
}

/// Elementwise map preserving order.
pub fn map_vec<T, U, F>(exec: Exec, xs: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel if xs.len() > CHUNK => {
            use rayon::prelude::*;
            xs.par_iter().map(f).collect()
        }
        _ => xs.iter().map(f).collect(),
    }
}

/// `(0..n).map(f)` preserving order.
pub fn map_range<U, F>(exec: Exec, n: u64, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(u64) -> U + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel if n > CHUNK as u64 => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Sorts by `f64::total_cmp` on the key. The result is fully determined by
/// the input, whichever executor runs it.
pub fn sort_by_key_f64<T, K>(exec: Exec, xs: &mut [T], key: K)
where
    T: Send,
    K: Fn(&T) -> f64 + Sync,
{
    let cmp = |x: &T, y: &T| key(x).total_cmp(&key(y));
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel if xs.len() > CHUNK => {
            use rayon::prelude::*;
            xs.par_sort_by(cmp)
        }
        _ => xs.sort_by(cmp),
    }
}
