//! End-to-end checks of the `nanoseg` binary: artifact shapes, failure
//! modes, and equality with the library API it wraps.

use nanoseg::{
    analyze, compute_stats, decode_pgm, encode_pgm, encode_pgm_with_maxval, evaluate,
    fill_points, find_outer_contours, generate, presets, AnalysisReport, BinaryMask, GrayImage,
    Method, Metrics, ParticleRecord, PipelineConfig, Scene, SceneSpec,
};
use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// Scratch directory under the system temp root, removed on drop.
struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let path = std::env::temp_dir().join(format!("nanoseg-cli-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&path);
        fs::create_dir_all(&path).unwrap();
        TempDir(path)
    }

    fn file(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    fn path_str(&self, name: &str) -> String {
        self.file(name).to_str().unwrap().to_owned()
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nanoseg"))
        .args(args)
        .output()
        .expect("spawning nanoseg")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "nanoseg {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn small_scene(seed: u64) -> Scene {
    generate(&SceneSpec {
        width: 256,
        height: 256,
        particle_count: 12,
        radius_range: [18, 24],
        seed,
        ..SceneSpec::default()
    })
    .unwrap()
}

fn read_report(path: &Path) -> AnalysisReport {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn analyze_on_blank_image_reports_zero_particles() {
    let dir = TempDir::new("blank");
    let blank = GrayImage::from_fn(64, 64, |_, _| 0);
    fs::write(dir.file("blank.pgm"), encode_pgm(&blank)).unwrap();

    run_ok(&["analyze", &dir.path_str("blank.pgm")]);

    let csv = fs::read_to_string(dir.file("blank.particles.csv")).unwrap();
    assert_eq!(
        csv,
        "id,area_px,eq_diameter_px,centroid_x,centroid_y,bbox_x,bbox_y,bbox_w,bbox_h\n"
    );
    let report = read_report(&dir.file("blank.report.json"));
    assert_eq!(report.count, 0);
    assert!(report.particles.is_empty());
    assert!(dir.file("blank.overlay.ppm").exists());
    assert!(
        !dir.file("blank.mask.pgm").exists(),
        "mask is opt-in and was not requested"
    );
}

#[test]
fn method_both_writes_a_report_per_method() {
    let dir = TempDir::new("both");
    let scene = small_scene(1);
    fs::write(dir.file("scene.pgm"), encode_pgm(&scene.image)).unwrap();

    run_ok(&[
        "analyze",
        &dir.path_str("scene.pgm"),
        "--method",
        "both",
        "--emit",
        "json",
    ]);

    let sup = read_report(&dir.file("scene.superposition.report.json"));
    let conv = read_report(&dir.file("scene.conventional.report.json"));
    assert_eq!(sup.method, Method::Superposition);
    assert_eq!(conv.method, Method::Conventional);
    let sup_text = fs::read_to_string(dir.file("scene.superposition.report.json")).unwrap();
    let conv_text = fs::read_to_string(dir.file("scene.conventional.report.json")).unwrap();
    assert!(sup_text.contains("\"method\": \"superposition\""));
    assert!(conv_text.contains("\"method\": \"conventional\""));
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new("gen-det");
    let spec = r#"{ "width": 256, "height": 256, "particle_count": 10, "radius_range": [18, 24] }"#;
    fs::write(dir.file("spec.json"), spec).unwrap();

    for out in ["a", "b"] {
        run_ok(&[
            "generate",
            "--config",
            &dir.path_str("spec.json"),
            "--seed",
            "9",
            "--out",
            &dir.path_str(out),
        ]);
    }
    for name in ["scene.pgm", "scene.labels.pgm", "scene.truth.json"] {
        let a = fs::read(dir.file("a").join(name)).unwrap();
        let b = fs::read(dir.file("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical seeds");
    }
}

#[test]
fn generate_writes_one_label_per_particle() {
    let dir = TempDir::new("gen-labels");
    let spec = r#"{ "width": 256, "height": 256, "particle_count": 16, "radius_range": [18, 22], "seed": 3 }"#;
    fs::write(dir.file("spec.json"), spec).unwrap();

    run_ok(&[
        "generate",
        "--config",
        &dir.path_str("spec.json"),
        "--out",
        &dir.path_str("."),
    ]);

    let labels = decode_pgm(&fs::read(dir.file("scene.labels.pgm")).unwrap()).unwrap();
    let ids: HashSet<u8> = labels.data().iter().copied().filter(|&v| v != 0).collect();
    assert_eq!(ids.len(), 16);
}

/// A report whose particles are the label regions themselves; evaluating it
/// against those labels must score a perfect match.
fn truth_report(scene: &Scene, count: u32) -> AnalysisReport {
    let (w, h) = (scene.labels.width(), scene.labels.height());
    let mut particles = Vec::new();
    let mut contours = Vec::new();
    for v in 1..=count {
        let mask = BinaryMask::from_fn(w, h, |x, y| u32::from(scene.labels.get(x, y)) == v);
        let mut cs = find_outer_contours(&mask);
        assert_eq!(cs.len(), 1, "label {v} should be a single blob");
        let c = cs.pop().unwrap();
        let region = fill_points(&c.points, w, h).unwrap();
        let (mut area, mut sx, mut sy) = (0u64, 0f64, 0f64);
        for y in 0..h {
            for x in 0..w {
                if region.is_set(x, y) {
                    area += 1;
                    sx += x as f64;
                    sy += y as f64;
                }
            }
        }
        particles.push(ParticleRecord {
            id: v,
            area_px: area,
            eq_diameter_px: 2.0 * (area as f64 / std::f64::consts::PI).sqrt(),
            centroid_x: sx / area as f64,
            centroid_y: sy / area as f64,
            bbox: c.bbox,
            touches_border: false,
            contour: c.points.clone(),
        });
        contours.push(c);
    }
    let (area_stats, diameter_histogram) = compute_stats(&contours);
    AnalysisReport {
        method: Method::Superposition,
        width: w,
        height: h,
        count: particles.len(),
        particles,
        area_stats,
        diameter_histogram,
        config: PipelineConfig::default(),
    }
}

fn read_metrics(path: &Path) -> Metrics {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn evaluate_scores_truth_as_detections_perfectly() {
    let dir = TempDir::new("eval-perfect");
    let scene = small_scene(5);
    fs::write(
        dir.file("scene.labels.pgm"),
        encode_pgm_with_maxval(&scene.labels, 12),
    )
    .unwrap();
    let report = truth_report(&scene, 12);
    fs::write(
        dir.file("gt.report.json"),
        serde_json::to_vec(&report).unwrap(),
    )
    .unwrap();

    run_ok(&[
        "evaluate",
        &dir.path_str("gt.report.json"),
        &dir.path_str("scene.labels.pgm"),
    ]);

    let cli = read_metrics(&dir.file("gt.metrics.json"));
    assert_eq!(cli.precision, 1.0);
    assert_eq!(cli.recall, 1.0);
    assert_eq!(cli.mean_iou, 1.0);
    assert_eq!(cli.count_error, 0.0);
    assert_eq!(cli, evaluate(&report, &scene.labels).unwrap());
}

#[test]
fn evaluate_empty_report_scores_zero_recall() {
    let dir = TempDir::new("eval-empty");
    let scene = small_scene(6);
    fs::write(
        dir.file("scene.labels.pgm"),
        encode_pgm_with_maxval(&scene.labels, 12),
    )
    .unwrap();
    let (area_stats, diameter_histogram) = compute_stats(&[]);
    let report = AnalysisReport {
        method: Method::Superposition,
        width: 256,
        height: 256,
        count: 0,
        particles: Vec::new(),
        area_stats,
        diameter_histogram,
        config: PipelineConfig::default(),
    };
    fs::write(
        dir.file("none.report.json"),
        serde_json::to_vec(&report).unwrap(),
    )
    .unwrap();

    run_ok(&[
        "evaluate",
        &dir.path_str("none.report.json"),
        &dir.path_str("scene.labels.pgm"),
    ]);

    let cli = read_metrics(&dir.file("none.metrics.json"));
    assert_eq!(cli.recall, 0.0);
    assert_eq!(cli, evaluate(&report, &scene.labels).unwrap());
}

#[test]
fn invalid_config_is_rejected_naming_the_file() {
    let dir = TempDir::new("bad-config");
    let blank = GrayImage::from_fn(16, 16, |_, _| 0);
    fs::write(dir.file("blank.pgm"), encode_pgm(&blank)).unwrap();
    fs::write(dir.file("bad.json"), r#"{ "no_such_knob": 1 }"#).unwrap();

    let out = run(&[
        "analyze",
        &dir.path_str("blank.pgm"),
        "--config",
        &dir.path_str("bad.json"),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bad.json"), "diagnostic was: {stderr}");
}

#[test]
fn unreadable_input_fails_without_blocking_the_rest() {
    let dir = TempDir::new("mixed-inputs");
    let scene = small_scene(2);
    fs::write(dir.file("good.pgm"), encode_pgm(&scene.image)).unwrap();

    let out = run(&[
        "analyze",
        &dir.path_str("good.pgm"),
        &dir.path_str("missing.pgm"),
        "--emit",
        "json",
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("missing.pgm"), "diagnostic was: {stderr}");
    assert!(
        dir.file("good.report.json").exists(),
        "healthy inputs should still produce artifacts"
    );
}

#[test]
fn worker_count_does_not_change_artifacts() {
    let dir = TempDir::new("threads");
    let scene = small_scene(4);
    fs::write(dir.file("scene.pgm"), encode_pgm(&scene.image)).unwrap();

    for (out, threads) in [("one", "1"), ("four", "4")] {
        let status = Command::new(env!("CARGO_BIN_EXE_nanoseg"))
            .args([
                "analyze",
                &dir.path_str("scene.pgm"),
                "--emit",
                "overlay,csv,json,mask",
                "--out",
                &dir.path_str(out),
            ])
            .env("NANOSEG_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in [
        "scene.overlay.ppm",
        "scene.particles.csv",
        "scene.report.json",
        "scene.mask.pgm",
    ] {
        let one = fs::read(dir.file("one").join(name)).unwrap();
        let four = fs::read(dir.file("four").join(name)).unwrap();
        assert_eq!(one, four, "{name} differs across worker counts");
    }
}

#[test]
fn csv_rows_and_overlay_outlines_match_the_report() {
    let dir = TempDir::new("artifacts-agree");
    let scene = small_scene(8);
    fs::write(dir.file("scene.pgm"), encode_pgm(&scene.image)).unwrap();

    run_ok(&["analyze", &dir.path_str("scene.pgm")]);

    let report = read_report(&dir.file("scene.report.json"));
    let csv = fs::read_to_string(dir.file("scene.particles.csv")).unwrap();
    assert_eq!(csv.lines().count(), report.count + 1, "header plus one row per particle");

    let overlay = fs::read(dir.file("scene.overlay.ppm")).unwrap();
    let header = format!("P6\n{} {}\n255\n", report.width, report.height);
    let rgb = &overlay[header.len()..];
    let mut outlined = HashSet::new();
    for rec in &report.particles {
        for p in &rec.contour {
            outlined.insert((p.x, p.y));
        }
    }
    for y in 0..report.height {
        for x in 0..report.width {
            let px = &rgb[3 * (y * report.width + x) as usize..][..3];
            assert_eq!(
                px == [255, 0, 0],
                outlined.contains(&(x, y)),
                "overlay and report contours disagree at ({x}, {y})"
            );
        }
    }
}

#[test]
fn cli_count_matches_library_analyze() {
    let dir = TempDir::new("wrapper-equality");
    let scene = generate(&SceneSpec {
        seed: 7,
        ..SceneSpec::default()
    })
    .unwrap();
    fs::write(dir.file("scene.pgm"), encode_pgm(&scene.image)).unwrap();
    let preset = concat!(env!("CARGO_MANIFEST_DIR"), "/../../presets/regime_a.json");

    run_ok(&[
        "analyze",
        &dir.path_str("scene.pgm"),
        "--config",
        preset,
        "--emit",
        "json",
    ]);

    let report = read_report(&dir.file("scene.report.json"));
    let direct = analyze(&scene.image, &presets::regime_a()).unwrap();
    assert_eq!(report.count, direct.count);
    assert_eq!(
        serde_json::to_string(&report.particles).unwrap(),
        serde_json::to_string(&direct.particles).unwrap()
    );
}
