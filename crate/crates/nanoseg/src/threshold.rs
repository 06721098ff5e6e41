//! Global and adaptive binarization.
//!
//! The adaptive rule marks a pixel foreground when it is brighter than its
//! local weighted window mean minus a fixed offset `D`:
//!
//! ```text
//! out(p) = 255  iff  img(p) > M(p) - D
//! ```
//!
//! where `M` is the mean of the window around `p` (uniform or binomial
//! weights, replicate padding). The comparison is evaluated exactly by
//! cross-multiplying with the integer weight denominator, so results never
//! depend on float rounding. Larger `D` admits more pixels and suppresses
//! noise-induced cracks; smaller `D` carves aggressively at every local dip.

use crate::kernel::{binomial_taps, separable_window_sums, uniform_taps};
use crate::parallel::for_each_row;
use crate::preprocess::{check_window, FilterError};
use crate::raster::{BinaryMask, GrayImage};
use serde::{Deserialize, Serialize};

/// Window weighting for the adaptive local mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Mean,
    Gaussian,
}

/// Adaptive threshold parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdaptiveParams {
    /// Odd window size, at least 3.
    pub block: u32,
    /// Brightness slack subtracted from the window mean.
    pub offset_d: i16,
    pub weighting: Weighting,
}

impl Default for AdaptiveParams {
    fn default() -> Self {
        AdaptiveParams {
            block: 11,
            offset_d: 2,
            weighting: Weighting::Mean,
        }
    }
}

/// Marks pixels strictly brighter than `t` as foreground.
pub fn binary_threshold(img: &GrayImage, t: u8) -> BinaryMask {
    let w = img.width() as usize;
    let mut out = BinaryMask::new(img.width(), img.height());
    for_each_row(out.data_mut(), w, |y, row| {
        let src = img.row(y as u32);
        for (o, &v) in row.iter_mut().zip(src) {
            *o = if v > t { 255 } else { 0 };
        }
    });
    out
}

/// Thresholds against the local window mean, see the module docs for the
/// decision rule.
pub fn adaptive_threshold(img: &GrayImage, params: &AdaptiveParams) -> Result<BinaryMask, FilterError> {
    check_window(params.block, params.weighting == Weighting::Gaussian)?;
    let taps = match params.weighting {
        Weighting::Mean => uniform_taps(params.block),
        Weighting::Gaussian => binomial_taps(params.block),
    };
    let sums = separable_window_sums(img, &taps);
    let tap_sum: u128 = taps.iter().sum();
    let den = (tap_sum * tap_sum) as i128;
    let d = i128::from(params.offset_d);

    let w = img.width() as usize;
    let mut out = BinaryMask::new(img.width(), img.height());
    for_each_row(out.data_mut(), w, |y, row| {
        let src = img.row(y as u32);
        let sums = &sums[y * w..(y + 1) * w];
        for ((o, &v), &s) in row.iter_mut().zip(src).zip(sums) {
            // v > M - D  <=>  (v + D) * den > sum, exactly
            *o = if (i128::from(v) + d) * den > s as i128 {
                255
            } else {
                0
            };
        }
    });
    Ok(out)
}
