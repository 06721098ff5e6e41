//! The two segmentation pipelines and their shared reporting types.
//!
//! Both start from the same preprocessed image and global threshold. The
//! conventional pipeline then opens and closes the whole mask at once, which
//! repairs cracks *and* reconnects distinct particles across narrow gaps.
//! The superposition pipeline instead:
//!
//! 1. intersects the opened adaptive-threshold mask with the opened
//!    binary-threshold mask (the superposition mask `P_m`),
//! 2. extracts outer contours and drops those below the area policy,
//! 3. re-rasterizes each surviving contour onto its own blank canvas, fills
//!    enclosed holes, and closes it *in isolation*,
//! 4. ORs the per-contour results into the output mask and traces final
//!    contours.
//!
//! Because closing never sees two particles at once, gaps between particles
//! can never be bridged, while cracks and holes inside one particle are
//! still repaired.

use crate::contour::{
    fill_boundary_local, filter_min_area, find_outer_contours, AreaPolicy, Contour, ContourError,
};
use crate::morphology::{close, open, StructuringElement};
use crate::preprocess::{equalize_histogram, smooth, FilterError, SmoothingKind};
use crate::raster::{bitwise_and, BinaryMask, GrayImage, Point, Rect};
use crate::threshold::{adaptive_threshold, binary_threshold, AdaptiveParams};
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Histogram bin width for equivalent diameters, in pixels.
pub const DIAMETER_BIN_WIDTH: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Superposition,
    Conventional,
}

/// Full parameter set for either pipeline. All fields have defaults so
/// config files only need to state what they change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Optional smoothing stage; `null` disables it.
    pub smoothing: Option<SmoothingKind>,
    /// Histogram equalization stage toggle.
    pub equalize: bool,
    /// Global threshold (exclusive) applied after preprocessing.
    pub binary_t: u8,
    pub adaptive: AdaptiveParams,
    pub open_se: StructuringElement,
    pub open_iters: u32,
    pub close_se: StructuringElement,
    pub close_iters: u32,
    pub area_policy: AreaPolicy,
    /// Drop particles whose bounding box touches the canvas edge.
    pub exclude_border_particles: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            smoothing: Some(SmoothingKind::Gaussian { kernel_size: 3 }),
            equalize: true,
            binary_t: 100,
            adaptive: AdaptiveParams::default(),
            open_se: StructuringElement::SQUARE3,
            open_iters: 1,
            close_se: StructuringElement::SQUARE3,
            close_iters: 1,
            area_policy: AreaPolicy::default(),
            exclude_border_particles: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// Rejects configurations that would fail mid-pipeline, with a message
/// naming the offending field.
pub fn validate_config(cfg: &PipelineConfig) -> Result<(), PipelineError> {
    let err = |msg: String| Err(PipelineError::Config(msg));
    if let Some(kind) = cfg.smoothing {
        let k = kind.kernel_size();
        if k < 3 || k % 2 == 0 {
            return err(format!("smoothing kernel_size {k} must be odd and at least 3"));
        }
    }
    if cfg.adaptive.block < 3 || cfg.adaptive.block.is_multiple_of(2) {
        return err(format!(
            "adaptive block {} must be odd and at least 3",
            cfg.adaptive.block
        ));
    }
    for (name, se) in [("open_se", cfg.open_se), ("close_se", cfg.close_se)] {
        if se.width == 0 || se.height == 0 || se.width % 2 == 0 || se.height % 2 == 0 {
            return err(format!(
                "{name} must have odd positive dimensions, got {}x{}",
                se.width, se.height
            ));
        }
    }
    for (name, iters) in [("open_iters", cfg.open_iters), ("close_iters", cfg.close_iters)] {
        if iters == 0 {
            return err(format!("{name} must be at least 1"));
        }
    }
    let frac = cfg.area_policy.relative_fraction;
    if !(0.0..=1.0).contains(&frac) {
        return err(format!("area_policy.relative_fraction {frac} must be in [0, 1]"));
    }
    Ok(())
}

/// Optional smoothing followed by optional histogram equalization.
pub fn preprocess_step(img: &GrayImage, cfg: &PipelineConfig) -> Result<GrayImage, PipelineError> {
    let smoothed = match cfg.smoothing {
        Some(kind) => smooth(img, kind)?,
        None => img.clone(),
    };
    Ok(if cfg.equalize {
        equalize_histogram(&smoothed)
    } else {
        smoothed
    })
}

/// Intersection of the opened adaptive mask and the opened binary mask.
///
/// The adaptive mask carves cracks reliably even under uneven exposure but
/// also invents cracks in noisy flat areas; the binary mask is stable on
/// flat areas but blind to low-contrast cracks. Their intersection keeps a
/// pixel only when both agree it belongs to a particle.
pub fn superposition_mask(
    pre: &GrayImage,
    cfg: &PipelineConfig,
) -> Result<BinaryMask, PipelineError> {
    let adaptive = adaptive_threshold(pre, &cfg.adaptive)?;
    let binary = binary_threshold(pre, cfg.binary_t);
    let adaptive_open = open(&adaptive, cfg.open_se, cfg.open_iters);
    let binary_open = open(&binary, cfg.open_se, cfg.open_iters);
    Ok(bitwise_and(&adaptive_open, &binary_open).expect("masks share dimensions"))
}

/// Rasterizes each contour onto a blank canvas, fills it, closes it in
/// isolation, and ORs everything together. The result is independent of the
/// contour order.
pub fn accumulate_closed_contours(
    contours: &[Contour],
    width: u32,
    height: u32,
    se: StructuringElement,
    iterations: u32,
) -> BinaryMask {
    // Work on a sub-raster per contour: closing a region that is zero
    // outside its bounding box can only produce pixels within the box grown
    // by the total dilation radius, and every pixel in that grown box sees
    // the same neighborhood as it would on the full canvas.
    let margin_x = iterations * (se.width / 2);
    let margin_y = iterations * (se.height / 2);
    let closed_piece = |c: &Contour| -> (Rect, BinaryMask) {
        let x0 = c.bbox.x.saturating_sub(margin_x);
        let y0 = c.bbox.y.saturating_sub(margin_y);
        let x1 = (c.bbox.x + c.bbox.width + margin_x).min(width);
        let y1 = (c.bbox.y + c.bbox.height + margin_y).min(height);
        let sub = Rect::new(x0, y0, x1 - x0, y1 - y0);

        let mut piece = BinaryMask::new(sub.width, sub.height);
        let filled = fill_boundary_local(&c.points, c.bbox);
        let bw = c.bbox.width as usize;
        for ly in 0..c.bbox.height {
            for lx in 0..c.bbox.width {
                if filled[ly as usize * bw + lx as usize] {
                    piece.set(c.bbox.x + lx - x0, c.bbox.y + ly - y0, true);
                }
            }
        }
        (sub, close(&piece, se, iterations))
    };

    #[cfg(feature = "parallel")]
    let pieces: Vec<(Rect, BinaryMask)> = contours.par_iter().map(closed_piece).collect();
    #[cfg(not(feature = "parallel"))]
    let pieces: Vec<(Rect, BinaryMask)> = contours.iter().map(closed_piece).collect();

    let mut acc = BinaryMask::new(width, height);
    for (sub, piece) in pieces {
        for ly in 0..sub.height {
            for lx in 0..sub.width {
                if piece.is_set(lx, ly) {
                    acc.set(sub.x + lx, sub.y + ly, true);
                }
            }
        }
    }
    acc
}

/// Contour-by-contour repair of the superposition mask: every sufficiently
/// large component is filled and closed in isolation, so holes and cracks
/// inside one particle are repaired while separated particles stay apart.
///
/// Returns the repaired mask and its final outer contours.
pub fn divide_and_conquer(p_m: &BinaryMask, cfg: &PipelineConfig) -> (BinaryMask, Vec<Contour>) {
    let initial = find_outer_contours(p_m);
    let kept = filter_min_area(initial, &cfg.area_policy);
    let repaired = accumulate_closed_contours(
        &kept,
        p_m.width(),
        p_m.height(),
        cfg.close_se,
        cfg.close_iters,
    );
    let finals = find_outer_contours(&repaired);
    (repaired, finals)
}

/// Per-particle measurements, one row of the final report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleRecord {
    pub id: u32,
    pub area_px: u64,
    pub eq_diameter_px: f64,
    pub centroid_x: f64,
    pub centroid_y: f64,
    pub bbox: Rect,
    pub touches_border: bool,
    /// Closed outer boundary, serialized as `[x, y]` pairs; enough to
    /// reconstruct the filled region exactly.
    pub contour: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaStats {
    pub min_px: u64,
    pub max_px: u64,
    pub mean_px: f64,
    /// Lower median of the sorted areas.
    pub median_px: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterHistogram {
    pub bin_width_px: f64,
    /// `counts[i]` covers diameters in `[i*bin, (i+1)*bin)`; trailing bins
    /// are trimmed, so an empty report has no bins.
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub method: Method,
    pub width: u32,
    pub height: u32,
    pub count: usize,
    pub particles: Vec<ParticleRecord>,
    pub area_stats: Option<AreaStats>,
    pub diameter_histogram: DiameterHistogram,
    /// Configuration actually applied, echoed for reproducibility.
    pub config: PipelineConfig,
}

/// Report plus the intermediate rasters, for callers that emit artifacts.
#[derive(Debug, Clone)]
pub struct AnalysisArtifacts {
    pub report: AnalysisReport,
    /// Superposition: the repaired mask `P+`; conventional: the closed mask.
    pub mask: BinaryMask,
    /// Contours backing the report records, in record order.
    pub contours: Vec<Contour>,
}

/// Area statistics and equivalent-diameter histogram over a contour set.
pub fn compute_stats(contours: &[Contour]) -> (Option<AreaStats>, DiameterHistogram) {
    let mut areas: Vec<u64> = contours.iter().map(|c| c.filled_area).collect();
    areas.sort_unstable();
    let histogram = {
        let mut counts: Vec<u64> = Vec::new();
        for &a in &areas {
            let d = equivalent_diameter(a);
            let bin = (d / DIAMETER_BIN_WIDTH).floor() as usize;
            if counts.len() <= bin {
                counts.resize(bin + 1, 0);
            }
            counts[bin] += 1;
        }
        DiameterHistogram {
            bin_width_px: DIAMETER_BIN_WIDTH,
            counts,
        }
    };
    let stats = if areas.is_empty() {
        None
    } else {
        let sum: u64 = areas.iter().sum();
        Some(AreaStats {
            min_px: areas[0],
            max_px: *areas.last().unwrap(),
            mean_px: sum as f64 / areas.len() as f64,
            median_px: areas[(areas.len() - 1) / 2],
        })
    };
    (stats, histogram)
}

fn equivalent_diameter(area: u64) -> f64 {
    2.0 * (area as f64 / std::f64::consts::PI).sqrt()
}

fn build_report(
    method: Method,
    width: u32,
    height: u32,
    contours: Vec<Contour>,
    cfg: &PipelineConfig,
) -> AnalysisArtifactsParts {
    let mut particles = Vec::with_capacity(contours.len());
    for (i, c) in contours.iter().enumerate() {
        let filled = fill_boundary_local(&c.points, c.bbox);
        let bw = c.bbox.width as usize;
        let (mut area, mut sum_x, mut sum_y) = (0u64, 0f64, 0f64);
        for ly in 0..c.bbox.height as usize {
            for lx in 0..bw {
                if filled[ly * bw + lx] {
                    area += 1;
                    sum_x += (c.bbox.x as usize + lx) as f64;
                    sum_y += (c.bbox.y as usize + ly) as f64;
                }
            }
        }
        debug_assert_eq!(area, c.filled_area);
        particles.push(ParticleRecord {
            id: i as u32 + 1,
            area_px: c.filled_area,
            eq_diameter_px: equivalent_diameter(c.filled_area),
            centroid_x: sum_x / area as f64,
            centroid_y: sum_y / area as f64,
            bbox: c.bbox,
            touches_border: c.bbox.touches_border(width, height),
            contour: c.points.clone(),
        });
    }
    let (area_stats, diameter_histogram) = compute_stats(&contours);
    let report = AnalysisReport {
        method,
        width,
        height,
        count: particles.len(),
        particles,
        area_stats,
        diameter_histogram,
        config: cfg.clone(),
    };
    AnalysisArtifactsParts { report, contours }
}

struct AnalysisArtifactsParts {
    report: AnalysisReport,
    contours: Vec<Contour>,
}

fn apply_border_exclusion(contours: &mut Vec<Contour>, cfg: &PipelineConfig, w: u32, h: u32) {
    if !cfg.exclude_border_particles {
        return;
    }
    // Erosion treats out-of-canvas pixels as background, so the closing
    // stage always pulls a region that touched the border one structuring
    // element radius inward. Regions whose box comes within that margin of
    // the edge therefore touched it before cleanup, and are the ones this
    // option is meant to drop.
    let mx = cfg.close_iters * (cfg.close_se.width / 2);
    let my = cfg.close_iters * (cfg.close_se.height / 2);
    contours.retain(|c| {
        c.bbox.x > mx
            && c.bbox.y > my
            && c.bbox.x + c.bbox.width + mx < w
            && c.bbox.y + c.bbox.height + my < h
    });
}

/// Superposition pipeline, returning the report plus mask and contours.
pub fn analyze_artifacts(
    img: &GrayImage,
    cfg: &PipelineConfig,
) -> Result<AnalysisArtifacts, PipelineError> {
    validate_config(cfg)?;
    let pre = preprocess_step(img, cfg)?;
    let p_m = superposition_mask(&pre, cfg)?;
    let (repaired, mut finals) = divide_and_conquer(&p_m, cfg);
    apply_border_exclusion(&mut finals, cfg, img.width(), img.height());
    let parts = build_report(Method::Superposition, img.width(), img.height(), finals, cfg);
    Ok(AnalysisArtifacts {
        report: parts.report,
        mask: repaired,
        contours: parts.contours,
    })
}

/// Superposition pipeline, report only.
pub fn analyze(img: &GrayImage, cfg: &PipelineConfig) -> Result<AnalysisReport, PipelineError> {
    Ok(analyze_artifacts(img, cfg)?.report)
}

/// Conventional pipeline: global threshold, then whole-image opening and
/// closing. Demonstrates the gap-reconnection failure mode the
/// superposition pipeline avoids.
pub fn conventional_analyze_artifacts(
    img: &GrayImage,
    cfg: &PipelineConfig,
) -> Result<AnalysisArtifacts, PipelineError> {
    validate_config(cfg)?;
    let pre = preprocess_step(img, cfg)?;
    let binary = binary_threshold(&pre, cfg.binary_t);
    let opened = open(&binary, cfg.open_se, cfg.open_iters);
    let closed = close(&opened, cfg.close_se, cfg.close_iters);
    let contours = find_outer_contours(&closed);
    let mut kept = filter_min_area(contours, &cfg.area_policy);
    apply_border_exclusion(&mut kept, cfg, img.width(), img.height());
    let parts = build_report(Method::Conventional, img.width(), img.height(), kept, cfg);
    Ok(AnalysisArtifacts {
        report: parts.report,
        mask: closed,
        contours: parts.contours,
    })
}

/// Conventional pipeline, report only.
pub fn conventional_analyze(
    img: &GrayImage,
    cfg: &PipelineConfig,
) -> Result<AnalysisReport, PipelineError> {
    Ok(conventional_analyze_artifacts(img, cfg)?.report)
}

/// Reconstructs the filled region of a record's contour on the full canvas.
pub fn record_region(
    record: &ParticleRecord,
    width: u32,
    height: u32,
) -> Result<BinaryMask, ContourError> {
    crate::contour::fill_points(&record.contour, width, height)
}
