//! Binary morphology with rectangular structuring elements.
//!
//! Conventions, fixed across the crate:
//! - the structuring element is a solid, odd-sized rectangle anchored at its
//!   center;
//! - pixels outside the raster count as background for *both* erosion and
//!   dilation, so erosion can never keep a pixel whose window hangs off the
//!   edge and dilation never conjures foreground from beyond it;
//! - `iterations` applies the base operation that many times, e.g.
//!   `open(m, se, 2)` erodes twice and then dilates twice.
//!
//! A rectangle is separable into a horizontal and a vertical run, which both
//! passes exploit; the result is identical to the direct set definition.

use crate::parallel::for_each_row;
use crate::raster::BinaryMask;
use serde::{Deserialize, Serialize};

/// Solid rectangular structuring element with odd dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuringElement {
    pub width: u32,
    pub height: u32,
}

impl StructuringElement {
    pub const SQUARE3: StructuringElement = StructuringElement {
        width: 3,
        height: 3,
    };

    pub const fn rect(width: u32, height: u32) -> Self {
        StructuringElement { width, height }
    }
}

impl Default for StructuringElement {
    fn default() -> Self {
        StructuringElement::SQUARE3
    }
}

fn check_se(se: StructuringElement) {
    assert!(
        se.width % 2 == 1 && se.height % 2 == 1 && se.width >= 1 && se.height >= 1,
        "structuring element must have odd positive dimensions, got {}x{}",
        se.width,
        se.height
    );
}

/// Keeps a pixel only when the entire SE window is in-bounds and foreground.
pub fn erode(mask: &BinaryMask, se: StructuringElement, iterations: u32) -> BinaryMask {
    check_se(se);
    assert!(iterations >= 1, "iterations must be at least 1");
    let mut out = erode_once(mask, se);
    for _ in 1..iterations {
        out = erode_once(&out, se);
    }
    out
}

/// Sets a pixel when any in-bounds window position is foreground.
pub fn dilate(mask: &BinaryMask, se: StructuringElement, iterations: u32) -> BinaryMask {
    check_se(se);
    assert!(iterations >= 1, "iterations must be at least 1");
    let mut out = dilate_once(mask, se);
    for _ in 1..iterations {
        out = dilate_once(&out, se);
    }
    out
}

/// Erosion followed by dilation; removes specks smaller than the SE.
pub fn open(mask: &BinaryMask, se: StructuringElement, iterations: u32) -> BinaryMask {
    dilate(&erode(mask, se, iterations), se, iterations)
}

/// Dilation followed by erosion; fills gaps narrower than the SE.
pub fn close(mask: &BinaryMask, se: StructuringElement, iterations: u32) -> BinaryMask {
    erode(&dilate(mask, se, iterations), se, iterations)
}

fn erode_once(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    let w = mask.width() as usize;
    let h = mask.height() as usize;
    let rx = (se.width / 2) as usize;
    let ry = (se.height / 2) as usize;

    // horizontal: all of [x-rx, x+rx] must be in-bounds foreground
    let mut tmp = BinaryMask::new(mask.width(), mask.height());
    for_each_row(tmp.data_mut(), w, |y, row| {
        let src = &mask.data()[y * w..(y + 1) * w];
        if w < 2 * rx + 1 {
            return;
        }
        for x in rx..w - rx {
            if src[x - rx..=x + rx].iter().all(|&v| v == 255) {
                row[x] = 255;
            }
        }
    });

    // vertical: AND the surrounding rows of the horizontal pass
    let mut out = BinaryMask::new(mask.width(), mask.height());
    for_each_row(out.data_mut(), w, |y, row| {
        if y < ry || y + ry >= h {
            return;
        }
        row.copy_from_slice(&tmp.data()[(y - ry) * w..(y - ry + 1) * w]);
        for sy in y - ry + 1..=y + ry {
            let src = &tmp.data()[sy * w..(sy + 1) * w];
            for (o, &v) in row.iter_mut().zip(src) {
                *o &= v;
            }
        }
    });
    out
}

fn dilate_once(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    let w = mask.width() as usize;
    let h = mask.height() as usize;
    let rx = (se.width / 2) as usize;
    let ry = (se.height / 2) as usize;

    // horizontal: any in-bounds pixel of [x-rx, x+rx]
    let mut tmp = BinaryMask::new(mask.width(), mask.height());
    for_each_row(tmp.data_mut(), w, |y, row| {
        let src = &mask.data()[y * w..(y + 1) * w];
        for (x, o) in row.iter_mut().enumerate() {
            let lo = x.saturating_sub(rx);
            let hi = (x + rx).min(w - 1);
            if src[lo..=hi].contains(&255) {
                *o = 255;
            }
        }
    });

    // vertical: OR the surrounding rows
    let mut out = BinaryMask::new(mask.width(), mask.height());
    for_each_row(out.data_mut(), w, |y, row| {
        let lo = y.saturating_sub(ry);
        let hi = (y + ry).min(h - 1);
        for sy in lo..=hi {
            let src = &tmp.data()[sy * w..(sy + 1) * w];
            for (o, &v) in row.iter_mut().zip(src) {
                *o |= v;
            }
        }
    });
    out
}
