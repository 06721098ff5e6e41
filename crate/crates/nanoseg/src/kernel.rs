//! Separable window sums over clamp-padded images, kept in exact integer
//! arithmetic so smoothing and adaptive thresholding are reproducible
//! bit-for-bit on every platform.

use crate::parallel::for_each_row;
use crate::raster::GrayImage;

/// Largest binomial window size whose comparisons stay inside i128.
///
/// A binomial window of size `k` has tap sum `2^(k-1)`, so the squared
/// denominator reaches `2^(2k-2)`; at 55 taps the worst-case product against
/// a 16-bit offset still fits, one step further overflows.
pub(crate) const MAX_BINOMIAL_WINDOW: u32 = 55;

/// All-ones taps: the window mean weights every pixel equally.
pub(crate) fn uniform_taps(k: u32) -> Vec<u128> {
    vec![1; k as usize]
}

/// Row `k-1` of Pascal's triangle, the discrete approximation of a Gaussian.
pub(crate) fn binomial_taps(k: u32) -> Vec<u128> {
    debug_assert!((1..=MAX_BINOMIAL_WINDOW).contains(&k));
    let n = u128::from(k) - 1;
    let mut taps = Vec::with_capacity(k as usize);
    let mut c: u128 = 1;
    taps.push(c);
    for i in 0..n {
        c = c * (n - i) / (i + 1);
        taps.push(c);
    }
    taps
}

/// Per-pixel weighted window sum with replicate padding:
/// `sum_{i,j} taps[i] * taps[j] * img(clamp(x+i-r), clamp(y+j-r))`.
///
/// The total weight is `(sum taps)^2`; dividing the returned sums by it gives
/// the exact weighted window mean.
pub(crate) fn separable_window_sums(img: &GrayImage, taps: &[u128]) -> Vec<u128> {
    let w = img.width() as usize;
    let h = img.height() as usize;
    let r = (taps.len() / 2) as isize;

    let mut rows = vec![0u128; w * h];
    for_each_row(&mut rows, w, |y, out| {
        let src = img.row(y as u32);
        for (x, slot) in out.iter_mut().enumerate() {
            let mut acc = 0u128;
            for (i, &t) in taps.iter().enumerate() {
                let sx = (x as isize + i as isize - r).clamp(0, w as isize - 1) as usize;
                acc += t * u128::from(src[sx]);
            }
            *slot = acc;
        }
    });

    let mut out = vec![0u128; w * h];
    for_each_row(&mut out, w, |y, dst| {
        for (j, &t) in taps.iter().enumerate() {
            let sy = (y as isize + j as isize - r).clamp(0, h as isize - 1) as usize;
            let src = &rows[sy * w..(sy + 1) * w];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += t * s;
            }
        }
    });
    out
}
