//! Intensity-domain preprocessing: window smoothing and histogram
//! equalization.
//!
//! All smoothing variants use replicate padding at the image edge and odd
//! square windows. Mean and Gaussian results are exact: the weighted sum is
//! kept in integers and divided once with round-half-up, so repeated runs and
//! parallel runs agree to the byte.

use crate::kernel::{binomial_taps, separable_window_sums, uniform_taps, MAX_BINOMIAL_WINDOW};
use crate::parallel::for_each_row;
use crate::raster::GrayImage;
use serde::{Deserialize, Serialize};

/// Smoothing filter selection, tagged for config files as
/// `{"kind": "gaussian", "kernel_size": 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SmoothingKind {
    Mean { kernel_size: u32 },
    Gaussian { kernel_size: u32 },
    Median { kernel_size: u32 },
}

impl SmoothingKind {
    pub fn kernel_size(&self) -> u32 {
        match *self {
            SmoothingKind::Mean { kernel_size }
            | SmoothingKind::Gaussian { kernel_size }
            | SmoothingKind::Median { kernel_size } => kernel_size,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FilterError {
    #[error("window size {0} is even; filters require odd windows")]
    EvenKernel(u32),
    #[error("window size {0} is below the minimum of 3")]
    KernelTooSmall(u32),
    #[error("window size {kernel_size} exceeds {max}, the largest usable window for a {width}x{height} image")]
    KernelExceedsImage {
        kernel_size: u32,
        max: u32,
        width: u32,
        height: u32,
    },
    #[error("binomial window size {kernel_size} exceeds the exact-arithmetic limit {max}")]
    KernelExceedsExactLimit { kernel_size: u32, max: u32 },
}

pub(crate) fn check_window(k: u32, binomial: bool) -> Result<(), FilterError> {
    if k < 3 {
        return Err(FilterError::KernelTooSmall(k));
    }
    if k.is_multiple_of(2) {
        return Err(FilterError::EvenKernel(k));
    }
    if binomial && k > MAX_BINOMIAL_WINDOW {
        return Err(FilterError::KernelExceedsExactLimit {
            kernel_size: k,
            max: MAX_BINOMIAL_WINDOW,
        });
    }
    Ok(())
}

/// Smooths an image with the selected window filter.
///
/// The window must be odd, at least 3, and no larger than
/// `2 * min(width, height) + 1`.
pub fn smooth(img: &GrayImage, kind: SmoothingKind) -> Result<GrayImage, FilterError> {
    let k = kind.kernel_size();
    check_window(k, matches!(kind, SmoothingKind::Gaussian { .. }))?;
    let max = 2 * img.width().min(img.height()) + 1;
    if k > max {
        return Err(FilterError::KernelExceedsImage {
            kernel_size: k,
            max,
            width: img.width(),
            height: img.height(),
        });
    }
    Ok(match kind {
        SmoothingKind::Mean { .. } => weighted_mean(img, &uniform_taps(k)),
        SmoothingKind::Gaussian { .. } => weighted_mean(img, &binomial_taps(k)),
        SmoothingKind::Median { .. } => median_filter(img, k),
    })
}

fn weighted_mean(img: &GrayImage, taps: &[u128]) -> GrayImage {
    let w = img.width() as usize;
    let sums = separable_window_sums(img, taps);
    let tap_sum: u128 = taps.iter().sum();
    let den = tap_sum * tap_sum;
    let mut out = GrayImage::new(img.width(), img.height());
    for_each_row(out.data_mut(), w, |y, row| {
        let sums = &sums[y * w..(y + 1) * w];
        for (o, &s) in row.iter_mut().zip(sums) {
            // round-half-up of s / den
            *o = ((2 * s + den) / (2 * den)) as u8;
        }
    });
    out
}

fn median_filter(img: &GrayImage, k: u32) -> GrayImage {
    let w = img.width() as usize;
    let h = img.height() as usize;
    let r = (k / 2) as isize;
    let mut out = GrayImage::new(img.width(), img.height());
    for_each_row(out.data_mut(), w, |y, row| {
        let mut buf = Vec::with_capacity((k * k) as usize);
        for (x, o) in row.iter_mut().enumerate() {
            buf.clear();
            for j in -r..=r {
                let sy = (y as isize + j).clamp(0, h as isize - 1) as u32;
                let src = img.row(sy);
                for i in -r..=r {
                    let sx = (x as isize + i).clamp(0, w as isize - 1) as usize;
                    buf.push(src[sx]);
                }
            }
            buf.sort_unstable();
            *o = buf[(buf.len() - 1) / 2];
        }
    });
    out
}

/// Stretches contrast by mapping each gray level through the cumulative
/// histogram:
/// `out = round(255 * (cdf(v) - cdf_min) / (pixels - cdf_min))`,
/// rounding half up. A single-level image is returned unchanged.
pub fn equalize_histogram(img: &GrayImage) -> GrayImage {
    let mut hist = [0u64; 256];
    for &v in img.data() {
        hist[usize::from(v)] += 1;
    }
    let mut cdf = [0u64; 256];
    let mut acc = 0u64;
    for (c, &h) in cdf.iter_mut().zip(&hist) {
        acc += h;
        *c = acc;
    }
    let n = img.data().len() as u64;
    let cdf_min = hist
        .iter()
        .position(|&h| h > 0)
        .map(|v| cdf[v])
        .unwrap_or(0);
    let denom = n - cdf_min;
    if denom == 0 {
        return img.clone();
    }

    let mut lut = [0u8; 256];
    for (v, slot) in lut.iter_mut().enumerate() {
        let num = 255 * cdf[v].saturating_sub(cdf_min);
        *slot = ((2 * num + denom) / (2 * denom)) as u8;
    }

    let w = img.width() as usize;
    let mut out = GrayImage::new(img.width(), img.height());
    for_each_row(out.data_mut(), w, |y, row| {
        let src = img.row(y as u32);
        for (o, &v) in row.iter_mut().zip(src) {
            *o = lut[usize::from(v)];
        }
    });
    out
}
