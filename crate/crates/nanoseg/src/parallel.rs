//! Row-level execution driver.
//!
//! Every per-pixel kernel in this crate computes output rows independently,
//! so the same closure can run on the rayon pool (feature `parallel`, the
//! default) or in a plain loop. Both paths produce byte-identical output; the
//! feature only changes scheduling.

#[cfg(feature = "parallel")]
pub(crate) fn for_each_row<T, F>(data: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    use rayon::prelude::*;
    data.par_chunks_mut(width)
        .enumerate()
        .for_each(|(y, row)| f(y, row));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_row<T, F>(data: &mut [T], width: usize, f: F)
where
    F: Fn(usize, &mut [T]),
{
    for (y, row) in data.chunks_mut(width).enumerate() {
        f(y, row);
    }
}
