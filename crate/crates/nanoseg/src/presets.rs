//! Ready-made pipeline configurations for the four benchmark exposure
//! regimes. Mirrors of these ship as JSON files under `presets/` at the
//! repository root for use with the CLI's `--config` flag.
//!
//! All presets smooth with a 3x3 Gaussian and skip histogram equalization
//! (their thresholds are calibrated against raw intensities: background
//! near 20, particle bodies near 180). The adaptive block is 21 pixels,
//! which comfortably spans the widest crack so local means are always
//! body-dominated; the polarized preset widens it further to also blanket
//! the open background between particles.

use crate::contour::AreaPolicy;
use crate::pipeline::PipelineConfig;
use crate::preprocess::SmoothingKind;
use crate::synth::Exposure;
use crate::threshold::{AdaptiveParams, Weighting};

fn base(binary_t: u8, offset_d: i16) -> PipelineConfig {
    PipelineConfig {
        smoothing: Some(SmoothingKind::Gaussian { kernel_size: 3 }),
        equalize: false,
        binary_t,
        adaptive: AdaptiveParams {
            block: 21,
            offset_d,
            weighting: Weighting::Mean,
        },
        ..PipelineConfig::default()
    }
}

/// Evenly exposed scenes: the global threshold sits mid-valley between
/// background and body intensities.
pub fn regime_a() -> PipelineConfig {
    base(100, 20)
}

/// Cross-glare scenes: the threshold drops to 80 so glare-free body parts
/// still clear it, and the adaptive offset rises to 25 so the bright arms
/// cannot carve false cracks into the bodies beside them. The heavier
/// closing heals the speckle the glare leaves behind after thresholding.
pub fn regime_b() -> PipelineConfig {
    let mut cfg = base(80, 25);
    cfg.close_iters = 3;
    cfg
}

/// Debris-speckled scenes: threshold 60 keeps faint bodies, while the area
/// filter removes the debris the thresholds inevitably accept.
pub fn regime_c() -> PipelineConfig {
    base(60, 20)
}

/// Laterally polarized scenes: threshold 50 keeps the dim left-hand bodies,
/// but the bright right-hand background clears it too. This preset erases
/// that background with the adaptive mask instead: a 41-pixel block reaches
/// far enough that every background pixel sees particle bodies inside its
/// window, lifting the local mean above the background level. Fragments that
/// survive anyway are dropped by the border exclusion and a
/// fifth-of-the-largest area floor.
pub fn regime_d() -> PipelineConfig {
    let mut cfg = base(50, 16);
    cfg.adaptive.block = 41;
    cfg.area_policy = AreaPolicy {
        absolute_min: 5,
        relative_fraction: 0.20,
    };
    cfg.exclude_border_particles = true;
    cfg
}

/// The preset matching a synthetic exposure regime.
pub fn for_exposure(exposure: Exposure) -> PipelineConfig {
    match exposure {
        Exposure::Even => regime_a(),
        Exposure::Cross => regime_b(),
        Exposure::Satellite => regime_c(),
        Exposure::Polarized => regime_d(),
    }
}
