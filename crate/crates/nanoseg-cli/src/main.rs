//! Batch front end: segment PGM micrographs, render synthetic benchmark
//! scenes, and score reports against label maps.
//!
//! Inputs are 8-bit PGM (P2 or P5). Outputs per analyzed image: an overlay
//! PPM with red particle outlines, a particles CSV, a report JSON, and
//! optionally the repaired mask as PGM. Every artifact is a pure function of
//! the input bytes and the configuration, so reruns are byte-identical.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nanoseg::{
    analyze_artifacts, conventional_analyze_artifacts, decode_pgm, encode_pgm,
    encode_pgm_with_maxval, encode_ppm, evaluate, generate, render_overlay, validate_config,
    AnalysisArtifacts, AnalysisReport, GrayImage, PipelineConfig, SceneSpec,
};
use rayon::prelude::*;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nanoseg", version, about = "Segmentation of aggregated particles in micrographs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment one or more PGM images and write per-image artifacts
    Analyze(AnalyzeArgs),
    /// Render a synthetic benchmark scene with pixel-exact ground truth
    Generate(GenerateArgs),
    /// Score a report JSON against a ground-truth label map
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input images, 8-bit PGM (P2 or P5)
    #[arg(required = true, value_name = "IMAGE")]
    inputs: Vec<PathBuf>,

    /// Pipeline configuration JSON; library defaults apply when omitted
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Which pipeline to run
    #[arg(long, value_enum, default_value_t = MethodSel::Superposition)]
    method: MethodSel,

    /// Output directory; defaults to each input's own directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Comma-separated artifact kinds to write
    #[arg(long, value_delimiter = ',', default_values_t = vec![EmitKind::Overlay, EmitKind::Csv, EmitKind::Json])]
    emit: Vec<EmitKind>,

    /// Override the global threshold
    #[arg(long, value_name = "N")]
    binary_t: Option<u8>,

    /// Override the adaptive window size (odd, at least 3)
    #[arg(long, value_name = "N")]
    adaptive_block: Option<u32>,

    /// Override the adaptive offset D
    #[arg(long, value_name = "N")]
    adaptive_d: Option<i16>,

    /// Override the absolute minimum particle area in pixels
    #[arg(long, value_name = "N")]
    min_area: Option<u64>,

    /// Override the minimum area as a fraction of the largest particle
    #[arg(long, value_name = "F")]
    min_area_frac: Option<f64>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Scene specification JSON; library defaults apply when omitted
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override the scene seed
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Output directory for scene.pgm, scene.labels.pgm, scene.truth.json
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Report JSON produced by `nanoseg analyze`
    #[arg(value_name = "REPORT")]
    report: PathBuf,

    /// Ground-truth label map, PGM with one gray level per particle
    #[arg(value_name = "LABELS")]
    labels: PathBuf,

    /// Output directory; defaults to the report's directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodSel {
    Superposition,
    Conventional,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmitKind {
    Overlay,
    Csv,
    Json,
    Mask,
}

impl std::fmt::Display for EmitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            EmitKind::Overlay => "overlay",
            EmitKind::Csv => "csv",
            EmitKind::Json => "json",
            EmitKind::Mask => "mask",
        };
        f.write_str(name)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_thread_pool() {
        eprintln!("nanoseg: {e:#}");
        return ExitCode::FAILURE;
    }
    let result = match cli.command {
        Command::Analyze(args) => run_analyze(&args),
        Command::Generate(args) => run_generate(&args),
        Command::Evaluate(args) => run_evaluate(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nanoseg: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Honors NANOSEG_THREADS as a cap on worker parallelism. Unset means the
/// rayon default (one worker per CPU).
fn init_thread_pool() -> Result<()> {
    let Ok(raw) = std::env::var("NANOSEG_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| anyhow!("NANOSEG_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("installing the worker pool")
}

fn run_analyze(args: &AnalyzeArgs) -> Result<()> {
    let mut cfg: PipelineConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
        }
        None => PipelineConfig::default(),
    };
    if let Some(t) = args.binary_t {
        cfg.binary_t = t;
    }
    if let Some(block) = args.adaptive_block {
        cfg.adaptive.block = block;
    }
    if let Some(d) = args.adaptive_d {
        cfg.adaptive.offset_d = d;
    }
    if let Some(a) = args.min_area {
        cfg.area_policy.absolute_min = a;
    }
    if let Some(f) = args.min_area_frac {
        cfg.area_policy.relative_fraction = f;
    }
    validate_config(&cfg)?;

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }

    // Process inputs in parallel but report failures afterwards in input
    // order, so diagnostics never interleave.
    let failures: Vec<String> = args
        .inputs
        .par_iter()
        .filter_map(|path| {
            process_image(path, &cfg, args)
                .err()
                .map(|e| format!("{}: {e:#}", path.display()))
        })
        .collect();
    for line in &failures {
        eprintln!("nanoseg: {line}");
    }
    if !failures.is_empty() {
        bail!("{} of {} inputs failed", failures.len(), args.inputs.len());
    }
    Ok(())
}

fn process_image(path: &Path, cfg: &PipelineConfig, args: &AnalyzeArgs) -> Result<()> {
    let bytes = fs::read(path).context("reading input")?;
    let img = decode_pgm(&bytes).context("decoding input")?;

    let methods: &[MethodSel] = match args.method {
        MethodSel::Superposition => &[MethodSel::Superposition],
        MethodSel::Conventional => &[MethodSel::Conventional],
        MethodSel::Both => &[MethodSel::Superposition, MethodSel::Conventional],
    };

    let out_dir = match &args.out {
        Some(dir) => dir.clone(),
        None => path.parent().unwrap_or(Path::new(".")).to_path_buf(),
    };
    let stem = path
        .file_stem()
        .ok_or_else(|| anyhow!("input has no file name"))?
        .to_string_lossy()
        .into_owned();

    for &method in methods {
        let artifacts = match method {
            MethodSel::Superposition => analyze_artifacts(&img, cfg)?,
            MethodSel::Conventional => conventional_analyze_artifacts(&img, cfg)?,
            MethodSel::Both => unreachable!("expanded above"),
        };
        // A single-method run uses plain artifact names; `--method both`
        // inserts the method so the two runs cannot clobber each other.
        let prefix = if args.method == MethodSel::Both {
            let tag = match method {
                MethodSel::Conventional => "conventional",
                _ => "superposition",
            };
            format!("{stem}.{tag}")
        } else {
            stem.clone()
        };
        write_artifacts(&out_dir, &prefix, &img, &artifacts, &args.emit)?;
    }
    Ok(())
}

fn write_artifacts(
    out_dir: &Path,
    prefix: &str,
    img: &GrayImage,
    artifacts: &AnalysisArtifacts,
    emit: &[EmitKind],
) -> Result<()> {
    let write = |name: String, bytes: Vec<u8>| -> Result<()> {
        let path = out_dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
    };
    for kind in emit {
        match kind {
            EmitKind::Overlay => {
                let overlay = render_overlay(img, &artifacts.contours);
                write(format!("{prefix}.overlay.ppm"), encode_ppm(&overlay))?;
            }
            EmitKind::Csv => {
                write(
                    format!("{prefix}.particles.csv"),
                    particles_csv(&artifacts.report).into_bytes(),
                )?;
            }
            EmitKind::Json => {
                let mut text = serde_json::to_string_pretty(&artifacts.report)
                    .context("serializing report")?;
                text.push('\n');
                write(format!("{prefix}.report.json"), text.into_bytes())?;
            }
            EmitKind::Mask => {
                let mask = GrayImage::from_raw(
                    artifacts.mask.width(),
                    artifacts.mask.height(),
                    artifacts.mask.data().to_vec(),
                )
                .expect("mask buffer matches its dimensions");
                write(format!("{prefix}.mask.pgm"), encode_pgm(&mask))?;
            }
        }
    }
    Ok(())
}

fn particles_csv(report: &AnalysisReport) -> String {
    let mut out =
        String::from("id,area_px,eq_diameter_px,centroid_x,centroid_y,bbox_x,bbox_y,bbox_w,bbox_h\n");
    for p in &report.particles {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            p.id,
            p.area_px,
            p.eq_diameter_px,
            p.centroid_x,
            p.centroid_y,
            p.bbox.x,
            p.bbox.y,
            p.bbox.width,
            p.bbox.height
        ));
    }
    out
}

fn run_generate(args: &GenerateArgs) -> Result<()> {
    let mut spec: SceneSpec = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading scene spec {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing scene spec {}", path.display()))?
        }
        None => SceneSpec::default(),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let scene = generate(&spec)?;

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let write = |name: &str, bytes: Vec<u8>| -> Result<()> {
        let path = args.out.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
    };
    write("scene.pgm", encode_pgm(&scene.image))?;
    let maxval = (spec.particle_count as u8).max(1);
    write(
        "scene.labels.pgm",
        encode_pgm_with_maxval(&scene.labels, maxval),
    )?;
    let mut truth = serde_json::to_string_pretty(&scene.truth).context("serializing truth")?;
    truth.push('\n');
    write("scene.truth.json", truth.into_bytes())?;
    Ok(())
}

fn run_evaluate(args: &EvaluateArgs) -> Result<()> {
    let text = fs::read_to_string(&args.report)
        .with_context(|| format!("reading report {}", args.report.display()))?;
    let report: AnalysisReport = serde_json::from_str(&text)
        .with_context(|| format!("parsing report {}", args.report.display()))?;
    let label_bytes = fs::read(&args.labels)
        .with_context(|| format!("reading labels {}", args.labels.display()))?;
    let labels = decode_pgm(&label_bytes)
        .with_context(|| format!("decoding labels {}", args.labels.display()))?;

    let metrics = evaluate(&report, &labels)?;

    let out_dir = match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            dir.clone()
        }
        None => args
            .report
            .parent()
            .unwrap_or(Path::new("."))
            .to_path_buf(),
    };
    let stem = metrics_stem(&args.report);
    let mut text = serde_json::to_string_pretty(&metrics).context("serializing metrics")?;
    text.push('\n');
    let path = out_dir.join(format!("{stem}.metrics.json"));
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;

    println!(
        "precision={} recall={} mean_iou={} count_error={}",
        metrics.precision, metrics.recall, metrics.mean_iou, metrics.count_error
    );
    Ok(())
}

/// `scene.report.json` scores to `scene.metrics.json`, not
/// `scene.report.metrics.json`.
fn metrics_stem(report_path: &Path) -> String {
    let name = report_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".to_string());
    match name.strip_suffix(".report.json") {
        Some(base) if !base.is_empty() => base.to_string(),
        _ => report_path
            .file_stem()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "report".to_string()),
    }
}
