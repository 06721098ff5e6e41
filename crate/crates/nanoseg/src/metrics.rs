//! Scoring detections against a ground-truth label map.
//!
//! Detections and truth regions are matched greedily, one-to-one, in
//! descending IoU order; a pair counts as matched when its IoU is at least
//! 0.5. Ties are broken by detection id, then label, so scores are
//! reproducible down to the bit.

use crate::contour::ContourError;
use crate::pipeline::{record_region, AnalysisReport};
use crate::raster::GrayImage;
use serde::{Deserialize, Serialize};

/// Minimum IoU for a detection to claim a truth region.
pub const MATCH_IOU: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Matched detections over all detections; 0 when nothing was detected.
    pub precision: f64,
    /// Matched truth regions over all truth regions; 1 when truth is empty.
    pub recall: f64,
    /// Mean IoU over truth regions, counting unmatched ones as 0.
    pub mean_iou: f64,
    /// `|detected - truth| / truth`.
    pub count_error: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("report is {report_width}x{report_height} but labels are {labels_width}x{labels_height}")]
    DimensionMismatch {
        report_width: u32,
        report_height: u32,
        labels_width: u32,
        labels_height: u32,
    },
    #[error(transparent)]
    Contour(#[from] ContourError),
}

/// Scores a report against a label map (0 is background).
pub fn evaluate(report: &AnalysisReport, labels: &GrayImage) -> Result<Metrics, EvalError> {
    if (labels.width(), labels.height()) != (report.width, report.height) {
        return Err(EvalError::DimensionMismatch {
            report_width: report.width,
            report_height: report.height,
            labels_width: labels.width(),
            labels_height: labels.height(),
        });
    }

    let mut truth_areas = [0u64; 256];
    for &l in labels.data() {
        truth_areas[l as usize] += 1;
    }
    // dense label -> truth-index table; labels need not be contiguous
    let mut truth_index = [usize::MAX; 256];
    let mut truth_area: Vec<u64> = Vec::new();
    for l in 1..256 {
        if truth_areas[l] > 0 {
            truth_index[l] = truth_area.len();
            truth_area.push(truth_areas[l]);
        }
    }

    struct Candidate {
        iou: f64,
        det: usize,
        truth: usize,
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut det_count = 0usize;
    for (det, rec) in report.particles.iter().enumerate() {
        det_count += 1;
        let region = record_region(rec, report.width, report.height)?;
        let mut overlap: Vec<u64> = vec![0; truth_area.len()];
        let mut det_area = 0u64;
        let (x0, y0) = (rec.bbox.x, rec.bbox.y);
        for y in y0..y0 + rec.bbox.height {
            for x in x0..x0 + rec.bbox.width {
                if region.is_set(x, y) {
                    det_area += 1;
                    let l = labels.get(x, y) as usize;
                    if l != 0 {
                        overlap[truth_index[l]] += 1;
                    }
                }
            }
        }
        for (truth, &o) in overlap.iter().enumerate() {
            if o == 0 {
                continue;
            }
            let iou = o as f64 / (det_area + truth_area[truth] - o) as f64;
            if iou >= MATCH_IOU {
                candidates.push(Candidate { iou, det, truth });
            }
        }
    }

    candidates.sort_by(|a, b| {
        b.iou
            .partial_cmp(&a.iou)
            .expect("IoU is never NaN")
            .then(a.det.cmp(&b.det))
            .then(a.truth.cmp(&b.truth))
    });
    let mut det_taken = vec![false; det_count];
    let mut truth_taken = vec![false; truth_area.len()];
    let mut matched = 0usize;
    let mut iou_sum = 0.0f64;
    for c in &candidates {
        if det_taken[c.det] || truth_taken[c.truth] {
            continue;
        }
        det_taken[c.det] = true;
        truth_taken[c.truth] = true;
        matched += 1;
        iou_sum += c.iou;
    }

    let (d, n) = (det_count as f64, truth_area.len() as f64);
    let m = matched as f64;
    Ok(Metrics {
        precision: if det_count == 0 { 0.0 } else { m / d },
        recall: if truth_area.is_empty() { 1.0 } else { m / n },
        mean_iou: if truth_area.is_empty() {
            if det_count == 0 { 1.0 } else { 0.0 }
        } else {
            iou_sum / n
        },
        count_error: if truth_area.is_empty() {
            if det_count == 0 { 0.0 } else { f64::INFINITY }
        } else {
            (d - n).abs() / n
        },
    })
}
