//! Core raster types: 8-bit grayscale images, binary masks, and the small
//! geometry structs shared across the crate.
//!
//! Pixels are stored row-major with `(0, 0)` in the top-left corner, `x`
//! growing right and `y` growing down. Both image types require at least one
//! pixel; a zero-sized raster is never valid.

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Pixel coordinate. Serialized compactly as a `[x, y]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const fn new(x: u32, y: u32) -> Self {
        Point { x, y }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&self.x)?;
        t.serialize_element(&self.y)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PointVisitor;

        impl<'de> Visitor<'de> for PointVisitor {
            type Value = Point;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a [x, y] coordinate pair")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Point, A::Error> {
                let x = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let y = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                Ok(Point { x, y })
            }
        }

        deserializer.deserialize_tuple(2, PointVisitor)
    }
}

/// Axis-aligned rectangle in pixel coordinates with a nonzero extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

impl Rect {
    pub const fn new(x: u32, y: u32, width: u32, height: u32) -> Self {
        Rect {
            x,
            y,
            width,
            height,
        }
    }

    /// Number of pixels covered.
    pub fn area(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    /// True when the rectangle touches any edge of a `width` x `height` canvas.
    pub fn touches_border(&self, width: u32, height: u32) -> bool {
        self.x == 0
            || self.y == 0
            || self.x + self.width >= width
            || self.y + self.height >= height
    }
}

/// Errors for operations combining two rasters.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RasterError {
    #[error("raster dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
}

/// Single-channel 8-bit image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    /// Zero-filled image. Panics when either dimension is zero.
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        GrayImage {
            width,
            height,
            data: vec![0; width as usize * height as usize],
        }
    }

    /// Wraps an existing row-major buffer. Returns `None` when the buffer
    /// length does not match `width * height` or a dimension is zero.
    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Option<Self> {
        if width == 0 || height == 0 || data.len() != width as usize * height as usize {
            return None;
        }
        Some(GrayImage {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        let mut img = GrayImage::new(width, height);
        for y in 0..height {
            for x in 0..width {
                let i = img.idx(x, y);
                img.data[i] = f(x, y);
            }
        }
        img
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    #[inline]
    fn idx(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[self.idx(x, y)]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        let i = self.idx(x, y);
        self.data[i] = value;
    }

    /// Row `y` as a contiguous slice.
    pub fn row(&self, y: u32) -> &[u8] {
        let start = y as usize * self.width as usize;
        &self.data[start..start + self.width as usize]
    }
}

/// Binary raster; every stored byte is either 0 (background) or 255
/// (foreground).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl BinaryMask {
    /// All-background mask. Panics when either dimension is zero.
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be nonzero");
        BinaryMask {
            width,
            height,
            data: vec![0; width as usize * height as usize],
        }
    }

    /// Wraps a raw buffer, rejecting any byte that is not 0 or 255.
    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Option<Self> {
        if width == 0 || height == 0 || data.len() != width as usize * height as usize {
            return None;
        }
        if data.iter().any(|&v| v != 0 && v != 255) {
            return None;
        }
        Some(BinaryMask {
            width,
            height,
            data,
        })
    }

    /// Builds a mask by evaluating a foreground predicate per pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut mask = BinaryMask::new(width, height);
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    mask.set(x, y, true);
                }
            }
        }
        mask
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    #[inline]
    fn idx(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn is_set(&self, x: u32, y: u32) -> bool {
        self.data[self.idx(x, y)] != 0
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, on: bool) {
        let i = self.idx(x, y);
        self.data[i] = if on { 255 } else { 0 };
    }

    /// Number of foreground pixels.
    pub fn count_foreground(&self) -> u64 {
        self.data.iter().filter(|&&v| v != 0).count() as u64
    }
}

fn check_dims(a: (u32, u32), b: (u32, u32)) -> Result<(), RasterError> {
    if a == b {
        Ok(())
    } else {
        Err(RasterError::DimensionMismatch(a.0, a.1, b.0, b.1))
    }
}

/// Pixelwise intersection of two masks of identical dimensions.
pub fn bitwise_and(a: &BinaryMask, b: &BinaryMask) -> Result<BinaryMask, RasterError> {
    check_dims((a.width, a.height), (b.width, b.height))?;
    let data = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| x & y)
        .collect();
    Ok(BinaryMask {
        width: a.width,
        height: a.height,
        data,
    })
}

/// Pixelwise union of two masks of identical dimensions.
pub fn bitwise_or(a: &BinaryMask, b: &BinaryMask) -> Result<BinaryMask, RasterError> {
    check_dims((a.width, a.height), (b.width, b.height))?;
    let data = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| x | y)
        .collect();
    Ok(BinaryMask {
        width: a.width,
        height: a.height,
        data,
    })
}

/// Interleaved 8-bit RGB image, used for contour overlays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl RgbImage {
    /// Replicates a grayscale image into all three channels.
    pub fn from_gray(img: &GrayImage) -> Self {
        let mut data = Vec::with_capacity(img.data.len() * 3);
        for &v in &img.data {
            data.extend_from_slice(&[v, v, v]);
        }
        RgbImage {
            width: img.width,
            height: img.height,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> (u8, u8, u8) {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        (self.data[i], self.data[i + 1], self.data[i + 2])
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, rgb: (u8, u8, u8)) {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.data[i] = rgb.0;
        self.data[i + 1] = rgb.1;
        self.data[i + 2] = rgb.2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mask(rng: &mut ChaCha8Rng, w: u32, h: u32) -> BinaryMask {
        BinaryMask::from_fn(w, h, |_, _| rng.random_bool(0.5))
    }

    #[test]
    fn from_raw_validates_length_and_values() {
        assert!(GrayImage::from_raw(2, 2, vec![1, 2, 3]).is_none());
        assert!(GrayImage::from_raw(0, 2, vec![]).is_none());
        assert!(GrayImage::from_raw(2, 2, vec![0, 1, 2, 255]).is_some());
        assert!(BinaryMask::from_raw(2, 1, vec![0, 254]).is_none());
        assert!(BinaryMask::from_raw(2, 1, vec![0, 255]).is_some());
    }

    #[test]
    fn and_or_truth_table() {
        let a = BinaryMask::from_raw(2, 2, vec![0, 0, 255, 255]).unwrap();
        let b = BinaryMask::from_raw(2, 2, vec![0, 255, 0, 255]).unwrap();
        let and = bitwise_and(&a, &b).unwrap();
        let or = bitwise_or(&a, &b).unwrap();
        assert_eq!(and.data(), &[0, 0, 0, 255]);
        assert_eq!(or.data(), &[0, 255, 255, 255]);
    }

    #[test]
    fn and_or_dimension_mismatch() {
        let a = BinaryMask::new(2, 2);
        let b = BinaryMask::new(2, 3);
        assert_eq!(
            bitwise_and(&a, &b),
            Err(RasterError::DimensionMismatch(2, 2, 2, 3))
        );
        assert!(bitwise_or(&a, &b).is_err());
    }

    #[test]
    fn lattice_identities_hold_on_random_masks() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_mask(&mut rng, 9, 7);
            let b = random_mask(&mut rng, 9, 7);
            let zero = BinaryMask::new(9, 7);
            assert_eq!(bitwise_and(&a, &a).unwrap(), a);
            assert_eq!(bitwise_or(&a, &a).unwrap(), a);
            assert_eq!(bitwise_and(&a, &zero).unwrap(), zero);
            assert_eq!(bitwise_or(&a, &zero).unwrap(), a);
            assert_eq!(bitwise_and(&a, &b).unwrap(), bitwise_and(&b, &a).unwrap());
            assert_eq!(bitwise_or(&a, &b).unwrap(), bitwise_or(&b, &a).unwrap());
            let and = bitwise_and(&a, &b).unwrap();
            let or = bitwise_or(&a, &b).unwrap();
            assert!(and.count_foreground() <= a.count_foreground());
            assert!(or.count_foreground() >= a.count_foreground());
        }
    }

    #[test]
    fn point_serializes_as_pair() {
        let p = Point::new(3, 4);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "[3,4]");
        let back: Point = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rect_border_test() {
        assert!(Rect::new(0, 3, 2, 2).touches_border(10, 10));
        assert!(Rect::new(3, 3, 7, 2).touches_border(10, 10));
        assert!(!Rect::new(1, 1, 8, 8).touches_border(10, 10));
    }
}
