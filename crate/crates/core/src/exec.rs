//! Execution strategy for the numerical layer.
//!
//! Every data-parallel primitive here produces bit-identical results in
//! sequential and parallel mode: pointwise maps touch disjoint chunks, and
//! reductions are computed over fixed-size chunks whose partial sums are
//! combined in index order regardless of which thread produced them.
//! Compiling without the `parallel` feature removes the rayon dependency
//! entirely and [`ExecMode::Parallel`] degrades to the sequential path.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length for parallel maps and deterministic reductions. Fixed so
/// the floating-point summation tree never depends on thread count.
pub const CHUNK: usize = 4096;

/// Whether to run the numerical kernels on one thread or on the rayon pool.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExecMode {
    #[default]
    Parallel,
    Sequential,
}

impl ExecMode {
    /// True when the parallel path is both requested and compiled in.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecMode::Parallel
    }
}

/// Applies `f(chunk_start, chunk)` to fixed-size chunks of `data`, in
/// parallel when requested. `f` must only depend on the chunk contents and
/// its offset, which makes the result mode-independent.
pub fn for_each_chunk_mut<T, F>(mode: ExecMode, data: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        data.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(i, chunk)| f(i * CHUNK, chunk));
        return;
    }
    let _ = mode;
    for (i, chunk) in data.chunks_mut(CHUNK).enumerate() {
        f(i * CHUNK, chunk);
    }
}

/// Deterministic map-reduce: `map` is evaluated per fixed-size chunk and
/// the per-chunk values are added in chunk order, so the summation tree is
/// identical in both modes.
pub fn sum_chunks<F>(mode: ExecMode, len: usize, map: F) -> num_complex::Complex<f64>
where
    F: Fn(std::ops::Range<usize>) -> num_complex::Complex<f64> + Sync,
{
    let ranges: Vec<std::ops::Range<usize>> = (0..len)
        .step_by(CHUNK.max(1))
        .map(|s| s..(s + CHUNK).min(len))
        .collect();
    let partials: Vec<num_complex::Complex<f64>>;
    #[cfg(feature = "parallel")]
    {
        if mode.is_parallel() {
            partials = ranges.into_par_iter().map(&map).collect();
        } else {
            partials = ranges.into_iter().map(&map).collect();
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = mode;
        partials = ranges.into_iter().map(&map).collect();
    }
    partials
        .into_iter()
        .fold(num_complex::Complex::new(0.0, 0.0), |a, b| a + b)
}

/// Deterministic parallel collection: `make(i)` for `i in 0..n`, results in
/// index order in both modes.
pub fn collect_indexed<T, F>(mode: ExecMode, n: usize, make: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return (0..n).into_par_iter().map(make).collect();
    }
    let _ = mode;
    (0..n).map(make).collect()
}
