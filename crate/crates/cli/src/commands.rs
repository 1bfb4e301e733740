//! Subcommand implementations, shared by the binary and the test suites.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use octaseg::imgio::{load_gray, load_mask, save_gray, save_mask};
use octaseg::metrics::{cohens_kappa, evaluate, EvalReport};
use octaseg::netstruct::{detect_faz, skeletonize};
use octaseg::phantom;
use octaseg::{BinaryMask, GrayImage, RoiSpec};

use crate::config::PipelineConfig;
use crate::manifest::{report_metrics, Aggregate, ManifestEntry, ManifestFailure, RunManifest};
use crate::pipeline::Pipeline;

/// Process exit status: 0 success, 1 finished with warnings, 2 invalid
/// configuration or I/O.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Partial,
    Invalid,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Partial => 1,
            Outcome::Invalid => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Segments a batch of scans and writes one 0/255 PNG mask per input.
///
/// Inputs are processed in canonical (sorted) order; per-file failures are
/// recorded in the manifest without aborting the batch.
pub fn cmd_segment(
    config: &PipelineConfig,
    inputs: &[PathBuf],
    out_dir: &Path,
    jobs: usize,
) -> Result<(RunManifest, Outcome), anyhow::Error> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let pipeline = Pipeline::new(config.clone())?;

    let mut sorted: Vec<&PathBuf> = inputs.iter().collect();
    sorted.sort();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()?;
    let results: Vec<Result<ManifestEntry, ManifestFailure>> = pool.install(|| {
        sorted
            .par_iter()
            .map(|input| {
                let name = display_name(input);
                let run = || -> Result<ManifestEntry, anyhow::Error> {
                    let img = load_gray(input)?;
                    let mask = pipeline.segment(&img)?;
                    let out_path = out_dir.join(mask_file_name(input));
                    save_mask(&mask, &out_path)?;
                    Ok(ManifestEntry {
                        input: name.clone(),
                        mask_path: Some(out_path.display().to_string()),
                        report: None,
                    })
                };
                run().map_err(|e| ManifestFailure {
                    input: display_name(input),
                    error: e.to_string(),
                })
            })
            .collect()
    });

    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(entry) => entries.push(entry),
            Err(failure) => failures.push(failure),
        }
    }
    let outcome = if failures.is_empty() {
        Outcome::Success
    } else {
        Outcome::Partial
    };
    let manifest = RunManifest {
        config_digest: config.digest(),
        entries,
        failures,
        aggregate: None,
    };
    Ok((manifest, outcome))
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn mask_file_name(input: &Path) -> String {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "mask".to_string());
    format!("{stem}.png")
}

/// Raster files in a directory, keyed by file name.
fn list_rasters(dir: &Path) -> Result<BTreeMap<String, PathBuf>, std::io::Error> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let is_raster = matches!(
            path.extension().and_then(|e| e.to_str()),
            Some("png") | Some("pgm")
        );
        if path.is_file() && is_raster {
            files.insert(display_name(&path), path);
        }
    }
    Ok(files)
}

/// Evaluation output: one report row per matched pair plus the aggregate.
pub struct Evaluation {
    pub rows: Vec<(String, EvalReport)>,
    pub row_failures: Vec<ManifestFailure>,
    pub unmatched: Vec<String>,
    pub aggregate: Aggregate,
}

impl Evaluation {
    pub fn outcome(&self) -> Outcome {
        if self.row_failures.is_empty() && self.unmatched.is_empty() {
            Outcome::Success
        } else {
            Outcome::Partial
        }
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => {
                let mut out = String::new();
                let _ = writeln!(out, "file,{}", EvalReport::CSV_COLUMNS);
                for (file, report) in &self.rows {
                    let _ = writeln!(out, "{file},{}", report.csv_fields().join(","));
                }
                let mean_cells: Vec<String> = crate::manifest::METRIC_NAMES
                    .iter()
                    .map(|name| {
                        self.aggregate
                            .means
                            .get(*name)
                            .map(|v| format!("{v:.6}"))
                            .unwrap_or_default()
                    })
                    .collect();
                if !self.rows.is_empty() {
                    let _ = writeln!(out, "mean,{}", mean_cells.join(","));
                }
                out
            }
            ReportFormat::Json => {
                let value = serde_json::json!({
                    "rows": self.rows.iter().map(|(file, report)| {
                        serde_json::json!({ "file": file, "report": report })
                    }).collect::<Vec<_>>(),
                    "aggregate": self.aggregate,
                    "failures": self.row_failures,
                    "unmatched": self.unmatched,
                });
                serde_json::to_string_pretty(&value).expect("report serialises")
            }
        }
    }
}

/// Evaluates filename-matched (segmentation, ground truth) mask pairs.
pub fn cmd_evaluate(seg_dir: &Path, gt_dir: &Path) -> Result<Evaluation, anyhow::Error> {
    let segs = list_rasters(seg_dir)?;
    let gts = list_rasters(gt_dir)?;

    let mut rows = Vec::new();
    let mut row_failures = Vec::new();
    let mut unmatched = Vec::new();

    for (name, seg_path) in &segs {
        let Some(gt_path) = gts.get(name) else {
            unmatched.push(name.clone());
            continue;
        };
        match (load_mask(seg_path), load_mask(gt_path)) {
            (Ok(seg), Ok(gt)) => match evaluate(&seg, &gt) {
                Ok(report) => rows.push((name.clone(), report)),
                Err(e) => row_failures.push(ManifestFailure {
                    input: name.clone(),
                    error: e.to_string(),
                }),
            },
            (Err(e), _) | (_, Err(e)) => row_failures.push(ManifestFailure {
                input: name.clone(),
                error: e.to_string(),
            }),
        }
    }
    for name in gts.keys() {
        if !segs.contains_key(name) {
            unmatched.push(name.clone());
        }
    }

    let metric_rows: Vec<(String, Vec<(&'static str, Option<f64>)>)> = rows
        .iter()
        .map(|(file, report)| (file.clone(), report_metrics(report)))
        .collect();
    let aggregate = Aggregate::from_rows(&metric_rows);

    Ok(Evaluation {
        rows,
        row_failures,
        unmatched,
        aggregate,
    })
}

/// Agreement output of [`cmd_agree`].
pub struct Agreement {
    pub pairs: Vec<(String, f64)>,
    pub degenerate: Vec<String>,
    pub unmatched: Vec<String>,
    pub failures: Vec<ManifestFailure>,
    pub mean: Option<f64>,
}

impl Agreement {
    pub fn outcome(&self) -> Outcome {
        if self.failures.is_empty() && self.unmatched.is_empty() {
            Outcome::Success
        } else {
            Outcome::Partial
        }
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => {
                let mut out = String::from("file,kappa\n");
                for (file, kappa) in &self.pairs {
                    let _ = writeln!(out, "{file},{kappa:.6}");
                }
                if let Some(mean) = self.mean {
                    let _ = writeln!(out, "mean,{mean:.6}");
                }
                out
            }
            ReportFormat::Json => serde_json::to_string_pretty(&serde_json::json!({
                "pairs": self.pairs.iter().map(|(f, k)| serde_json::json!({"file": f, "kappa": k})).collect::<Vec<_>>(),
                "mean": self.mean,
                "degenerate": self.degenerate,
                "unmatched": self.unmatched,
                "failures": self.failures,
            }))
            .expect("agreement serialises"),
        }
    }
}

/// Cohen's kappa per filename-matched mask pair, with the mean over defined
/// pairs; degenerate pairs are excluded from the mean and listed.
pub fn cmd_agree(a_dir: &Path, b_dir: &Path) -> Result<Agreement, anyhow::Error> {
    let a_files = list_rasters(a_dir)?;
    let b_files = list_rasters(b_dir)?;

    let mut pairs = Vec::new();
    let mut degenerate = Vec::new();
    let mut unmatched = Vec::new();
    let mut failures = Vec::new();

    for (name, a_path) in &a_files {
        let Some(b_path) = b_files.get(name) else {
            unmatched.push(name.clone());
            continue;
        };
        match (load_mask(a_path), load_mask(b_path)) {
            (Ok(a), Ok(b)) => {
                // a pair of constant same-class masks has chance agreement 1;
                // its kappa carries no information, so the pair is flagged
                // and left out of the mean
                let fa = a.count_foreground();
                let fb = b.count_foreground();
                let constant_same =
                    (fa == 0 && fb == 0) || (fa == a.len() && fb == b.len());
                if constant_same {
                    degenerate.push(name.clone());
                    continue;
                }
                match cohens_kappa(&a, &b) {
                    Ok(Some(kappa)) => pairs.push((name.clone(), kappa)),
                    Ok(None) => degenerate.push(name.clone()),
                    Err(e) => failures.push(ManifestFailure {
                        input: name.clone(),
                        error: e.to_string(),
                    }),
                }
            }
            (Err(e), _) | (_, Err(e)) => failures.push(ManifestFailure {
                input: name.clone(),
                error: e.to_string(),
            }),
        }
    }
    for name in b_files.keys() {
        if !a_files.contains_key(name) {
            unmatched.push(name.clone());
        }
    }

    let mean = if pairs.is_empty() {
        None
    } else {
        Some(pairs.iter().map(|(_, k)| k).sum::<f64>() / pairs.len() as f64)
    };
    Ok(Agreement {
        pairs,
        degenerate,
        unmatched,
        failures,
        mean,
    })
}

/// FAZ geometry of one mask as JSON.
pub fn cmd_faz(mask_path: &Path) -> Result<String, anyhow::Error> {
    let mask = load_mask(mask_path)?;
    let skeleton = skeletonize(&mask);
    let faz = detect_faz(&skeleton)?;
    let acircularity = octaseg::metrics::acircularity(&faz)?;
    Ok(serde_json::to_string_pretty(&serde_json::json!({
        "area": faz.area,
        "perimeter": faz.perimeter,
        "acircularity": acircularity,
        "boundary": faz.boundary,
    }))
    .expect("faz serialises"))
}

/// Phantom kinds generatable from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhantomKind {
    Tube,
    Ring,
    Grid,
    Tree,
}

pub struct PhantomSpec {
    pub kind: PhantomKind,
    pub size: usize,
    pub width: f64,
    pub contrast: f64,
    pub noise: f64,
    pub seed: u64,
}

/// Writes `<name>.png` (image) and `<name>_mask.png` (analytic ground
/// truth) into `out_dir`.
pub fn cmd_phantom(
    spec: &PhantomSpec,
    name: &str,
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf), anyhow::Error> {
    std::fs::create_dir_all(out_dir)?;
    let background = 0.05;
    let foreground = (background + spec.contrast).min(1.0);
    let size = spec.size;
    let phantom = match spec.kind {
        PhantomKind::Tube => phantom::tube(
            size,
            size,
            size as f64 / 2.0,
            spec.width,
            foreground,
            background,
        ),
        PhantomKind::Ring => {
            let mask = phantom::circle_ring(size, size as f64 / 4.0, spec.width.max(1.0));
            mask_phantom(mask, foreground, background)
        }
        PhantomKind::Grid => {
            let spacing = (size / 6).max(4);
            let mask = phantom::grid(size, size, spacing, spec.width.max(1.0) as usize, 4);
            mask_phantom(mask, foreground, background)
        }
        PhantomKind::Tree => phantom::tree(size, 7, spec.width, foreground, background),
    };
    let image = if spec.noise > 0.0 {
        phantom::with_noise(&phantom.image, spec.noise, spec.seed)
    } else {
        phantom.image
    };

    let image_path = out_dir.join(format!("{name}.png"));
    let mask_path = out_dir.join(format!("{name}_mask.png"));
    save_gray(&image, &image_path)?;
    save_mask(&phantom.mask, &mask_path)?;
    Ok((image_path, mask_path))
}

fn mask_phantom(mask: BinaryMask, foreground: f64, background: f64) -> phantom::Phantom {
    let image = GrayImage::from_fn(mask.width(), mask.height(), |r, c| {
        if mask.get(r, c) {
            foreground
        } else {
            background
        }
    });
    phantom::Phantom { image, mask }
}

/// Extracts the five clinical ROIs of each input into
/// `<stem>_<label>.png` files.
pub fn cmd_roi(
    spec: Option<&RoiSpec>,
    inputs: &[PathBuf],
    out_dir: &Path,
) -> Result<(Vec<PathBuf>, Outcome), anyhow::Error> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut any_failure = false;
    for input in inputs {
        let run = || -> Result<Vec<PathBuf>, anyhow::Error> {
            let img = load_gray(input)?;
            let spec = match spec {
                Some(s) => s.clone(),
                None => RoiSpec::centered(img.width(), img.height()),
            };
            let stem = input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scan".into());
            let mut out = Vec::new();
            for (label, crop) in octaseg::imgio::extract_rois(&img, &spec)? {
                let path = out_dir.join(format!("{stem}_{label}.png"));
                save_gray(&crop, &path)?;
                out.push(path);
            }
            Ok(out)
        };
        match run() {
            Ok(paths) => written.extend(paths),
            Err(e) => {
                eprintln!("roi: {}: {e}", input.display());
                any_failure = true;
            }
        }
    }
    let outcome = if any_failure {
        Outcome::Partial
    } else {
        Outcome::Success
    };
    Ok((written, outcome))
}
