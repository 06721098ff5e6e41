//! Outer-contour extraction and rasterization.
//!
//! Foreground components are 8-connected; background is 4-connected. Only
//! top-level components produce contours: a blob sitting inside another
//! blob's enclosed hole is skipped. Each contour is the closed boundary walk
//! of its component plus the pixel count of the enclosed region (component
//! and any internal holes).
//!
//! Tracing is Moore neighborhood tracing starting from the topmost-leftmost
//! pixel, walking clockwise, and stopping when the first (pixel, entry)
//! state repeats. The repeat-state criterion closes correctly on shapes
//! where the start pixel is legitimately visited more than once, such as
//! single-pixel isthmuses.

use crate::raster::{BinaryMask, GrayImage, Point, Rect, RgbImage};
use serde::{Deserialize, Serialize};

/// Closed boundary of one top-level component.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    /// Boundary walk; consecutive points are 8-adjacent and the last point
    /// is 8-adjacent to the first. Points may repeat on 1-pixel-wide spurs.
    pub points: Vec<Point>,
    /// Pixels enclosed by the boundary, holes included.
    pub filled_area: u64,
    pub bbox: Rect,
}

/// Minimum-area retention rule: keep contours whose filled area is at least
/// `max(absolute_min, relative_fraction * largest_area)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AreaPolicy {
    pub absolute_min: u64,
    /// Fraction of the largest contour area in the same image, in `[0, 1]`.
    pub relative_fraction: f64,
}

impl Default for AreaPolicy {
    fn default() -> Self {
        AreaPolicy {
            absolute_min: 5,
            relative_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ContourError {
    #[error("contour point ({x}, {y}) lies outside the {width}x{height} canvas")]
    PointOutOfBounds {
        x: u32,
        y: u32,
        width: u32,
        height: u32,
    },
}

// Clockwise in image coordinates (y grows downward), starting north.
const NEIGHBORS: [(i64, i64); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

fn dir_index(dx: i64, dy: i64) -> usize {
    match (dx, dy) {
        (0, -1) => 0,
        (1, -1) => 1,
        (1, 0) => 2,
        (1, 1) => 3,
        (0, 1) => 4,
        (-1, 1) => 5,
        (-1, 0) => 6,
        (-1, -1) => 7,
        _ => unreachable!("backtrack cell is always 8-adjacent"),
    }
}

fn trace_outer_boundary(mask: &BinaryMask, sx: u32, sy: u32) -> Vec<Point> {
    let w = i64::from(mask.width());
    let h = i64::from(mask.height());
    let fg =
        |x: i64, y: i64| x >= 0 && y >= 0 && x < w && y < h && mask.is_set(x as u32, y as u32);

    // From `cur`, scan its neighborhood clockwise starting just after the
    // backtrack cell; the first foreground pixel becomes the next `cur` and
    // the cell examined immediately before it the next backtrack.
    let step = |cx: i64, cy: i64, bx: i64, by: i64| -> Option<(i64, i64, i64, i64)> {
        let start = dir_index(bx - cx, by - cy);
        for k in 1..=8 {
            let d = (start + k) % 8;
            let (nx, ny) = (cx + NEIGHBORS[d].0, cy + NEIGHBORS[d].1);
            if fg(nx, ny) {
                let pb = (start + k + 7) % 8;
                return Some((nx, ny, cx + NEIGHBORS[pb].0, cy + NEIGHBORS[pb].1));
            }
        }
        None
    };

    let (sx, sy) = (i64::from(sx), i64::from(sy));
    // The cell above the topmost-leftmost pixel is always background.
    let Some(first) = step(sx, sy, sx, sy - 1) else {
        return vec![Point::new(sx as u32, sy as u32)];
    };

    let mut points = vec![Point::new(sx as u32, sy as u32)];
    let mut state = first;
    let limit = 4 * (w as usize) * (h as usize) + 8;
    loop {
        points.push(Point::new(state.0 as u32, state.1 as u32));
        let next =
            step(state.0, state.1, state.2, state.3).expect("current pixel has a foreground neighbor");
        if next == first {
            break;
        }
        state = next;
        debug_assert!(points.len() <= limit, "boundary walk failed to close");
        if points.len() > limit {
            break;
        }
    }
    // The walk re-enters the start pixel right before the state repeats.
    if points.len() > 1 && points.first() == points.last() {
        points.pop();
    }
    points
}

/// Flags every background cell 4-connected to the canvas border.
fn exterior_background(mask: &BinaryMask) -> Vec<bool> {
    let w = mask.width() as usize;
    let h = mask.height() as usize;
    let mut ext = vec![false; w * h];
    let mut stack = Vec::new();

    let seed = |i: usize, ext: &mut Vec<bool>, stack: &mut Vec<usize>| {
        if !ext[i] && mask.data()[i] == 0 {
            ext[i] = true;
            stack.push(i);
        }
    };
    for x in 0..w {
        seed(x, &mut ext, &mut stack);
        seed((h - 1) * w + x, &mut ext, &mut stack);
    }
    for y in 0..h {
        seed(y * w, &mut ext, &mut stack);
        seed(y * w + w - 1, &mut ext, &mut stack);
    }

    while let Some(i) = stack.pop() {
        let x = i % w;
        let y = i / w;
        if x > 0 {
            seed(i - 1, &mut ext, &mut stack);
        }
        if x + 1 < w {
            seed(i + 1, &mut ext, &mut stack);
        }
        if y > 0 {
            seed(i - w, &mut ext, &mut stack);
        }
        if y + 1 < h {
            seed(i + w, &mut ext, &mut stack);
        }
    }
    ext
}

/// Fills the region enclosed by `points` on a frame one pixel wider than
/// `bbox` on every side. Returns a `bbox`-sized bitmap where `true` marks
/// boundary or enclosed cells.
pub(crate) fn fill_boundary_local(points: &[Point], bbox: Rect) -> Vec<bool> {
    let bw = bbox.width as usize;
    let bh = bbox.height as usize;
    let fw = bw + 2;
    let fh = bh + 2;

    let mut boundary = vec![false; fw * fh];
    for p in points {
        debug_assert!(
            p.x >= bbox.x && p.y >= bbox.y && p.x < bbox.x + bbox.width && p.y < bbox.y + bbox.height
        );
        let lx = (p.x - bbox.x) as usize + 1;
        let ly = (p.y - bbox.y) as usize + 1;
        boundary[ly * fw + lx] = true;
    }

    // 4-connected flood from the frame ring; the ring itself is never
    // boundary, so seeding one corner reaches all escapable cells.
    let mut reached = vec![false; fw * fh];
    let mut stack = vec![0usize];
    reached[0] = true;
    while let Some(i) = stack.pop() {
        let x = i % fw;
        let y = i / fw;
        let mut visit = |j: usize| {
            if !reached[j] && !boundary[j] {
                reached[j] = true;
                stack.push(j);
            }
        };
        if x > 0 {
            visit(i - 1);
        }
        if x + 1 < fw {
            visit(i + 1);
        }
        if y > 0 {
            visit(i - fw);
        }
        if y + 1 < fh {
            visit(i + fw);
        }
    }

    let mut filled = vec![false; bw * bh];
    for ly in 0..bh {
        for lx in 0..bw {
            filled[ly * bw + lx] = !reached[(ly + 1) * fw + lx + 1];
        }
    }
    filled
}

/// Finds the outer contours of all top-level 8-connected components,
/// ordered by the raster position of their topmost-leftmost pixel.
pub fn find_outer_contours(mask: &BinaryMask) -> Vec<Contour> {
    let w = mask.width() as usize;
    let h = mask.height() as usize;
    let ext = exterior_background(mask);
    let mut visited = vec![false; w * h];
    let mut stack = Vec::new();
    let mut contours = Vec::new();

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if mask.data()[i] == 0 || visited[i] {
                continue;
            }

            // Flood the whole component to mark it visited and find its bbox.
            let (mut min_x, mut max_x, mut min_y, mut max_y) = (x, x, y, y);
            visited[i] = true;
            stack.push((x, y));
            while let Some((cx, cy)) = stack.pop() {
                min_x = min_x.min(cx);
                max_x = max_x.max(cx);
                min_y = min_y.min(cy);
                max_y = max_y.max(cy);
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let nx = cx as i64 + dx;
                        let ny = cy as i64 + dy;
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let j = ny as usize * w + nx as usize;
                        if !visited[j] && mask.data()[j] != 0 {
                            visited[j] = true;
                            stack.push((nx as usize, ny as usize));
                        }
                    }
                }
            }

            // The cell above the first raster-order pixel is background; if
            // it is not exterior the component sits inside another blob's
            // hole and is not top-level.
            if y > 0 && !ext[i - w] {
                continue;
            }

            let points = trace_outer_boundary(mask, x as u32, y as u32);
            let bbox = Rect::new(
                min_x as u32,
                min_y as u32,
                (max_x - min_x + 1) as u32,
                (max_y - min_y + 1) as u32,
            );
            let filled = fill_boundary_local(&points, bbox);
            let filled_area = filled.iter().filter(|&&b| b).count() as u64;
            contours.push(Contour {
                points,
                filled_area,
                bbox,
            });
        }
    }
    contours
}

/// Applies the minimum-area policy, preserving input order.
pub fn filter_min_area(contours: Vec<Contour>, policy: &AreaPolicy) -> Vec<Contour> {
    let max_area = contours.iter().map(|c| c.filled_area).max().unwrap_or(0);
    let cut = (policy.absolute_min as f64).max(policy.relative_fraction * max_area as f64);
    let mut kept = contours;
    kept.retain(|c| c.filled_area as f64 >= cut);
    kept
}

/// Draws the boundary on a blank canvas and fills it: a pixel is foreground
/// when it is a boundary pixel or not 4-reachable from the canvas border
/// through background.
pub fn rasterize_and_fill(
    contour: &Contour,
    width: u32,
    height: u32,
) -> Result<BinaryMask, ContourError> {
    fill_points(&contour.points, width, height)
}

/// [`rasterize_and_fill`] for a bare point list, used when contours come
/// from deserialized reports rather than freshly traced components.
pub fn fill_points(points: &[Point], width: u32, height: u32) -> Result<BinaryMask, ContourError> {
    let mut out = BinaryMask::new(width, height);
    if points.is_empty() {
        return Ok(out);
    }
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (u32::MAX, 0, u32::MAX, 0);
    for p in points {
        if p.x >= width || p.y >= height {
            return Err(ContourError::PointOutOfBounds {
                x: p.x,
                y: p.y,
                width,
                height,
            });
        }
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let bbox = Rect::new(min_x, min_y, max_x - min_x + 1, max_y - min_y + 1);
    let filled = fill_boundary_local(points, bbox);
    let bw = bbox.width as usize;
    for ly in 0..bbox.height as usize {
        for lx in 0..bw {
            if filled[ly * bw + lx] {
                out.set(bbox.x + lx as u32, bbox.y + ly as u32, true);
            }
        }
    }
    Ok(out)
}

/// Copies the image to RGB and paints every contour point pure red.
pub fn render_overlay(img: &GrayImage, contours: &[Contour]) -> RgbImage {
    let mut out = RgbImage::from_gray(img);
    for c in contours {
        for p in &c.points {
            assert!(
                p.x < img.width() && p.y < img.height(),
                "contour point ({}, {}) outside image",
                p.x,
                p.y
            );
            out.set(p.x, p.y, (255, 0, 0));
        }
    }
    out
}
