use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use octaseg_cli::commands::{
    cmd_agree, cmd_evaluate, cmd_faz, cmd_phantom, cmd_roi, cmd_segment, Outcome, PhantomKind,
    PhantomSpec, ReportFormat,
};
use octaseg_cli::config::PipelineConfig;

#[derive(Parser)]
#[command(
    name = "octaseg",
    about = "Microvascular angiogram segmentation and network-structure evaluation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PhantomKindArg {
    Tube,
    Ring,
    Grid,
    Tree,
}

impl From<PhantomKindArg> for PhantomKind {
    fn from(k: PhantomKindArg) -> Self {
        match k {
            PhantomKindArg::Tube => PhantomKind::Tube,
            PhantomKindArg::Ring => PhantomKind::Ring,
            PhantomKindArg::Grid => PhantomKind::Grid,
            PhantomKindArg::Tree => PhantomKind::Tree,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Segment scans: enhance, binarise, clean, write 0/255 masks.
    Segment {
        /// Pipeline configuration (JSON); defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for masks and the run manifest.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Input rasters (PNG or binary PGM, 8-bit grayscale).
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Evaluate segmentations against ground-truth masks.
    Evaluate {
        /// Directory of segmentation masks.
        #[arg(long)]
        seg: PathBuf,
        /// Directory of ground-truth masks (filename-matched).
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inter-rater agreement (Cohen's kappa) between two mask sets.
    Agree {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Avascular-zone area, perimeter and acircularity of one mask.
    Faz {
        mask: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic phantom with its analytic ground truth.
    Phantom {
        #[arg(long, value_enum)]
        kind: PhantomKindArg,
        #[arg(long, default_value_t = 304)]
        size: usize,
        #[arg(long)]
        out: PathBuf,
        /// Vessel half-width (tube/tree) or line thickness (ring/grid).
        #[arg(long, default_value_t = 2.0)]
        width: f64,
        /// Foreground-background intensity gap.
        #[arg(long, default_value_t = 0.85)]
        contrast: f64,
        /// Uniform noise amplitude added to the image.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file stem.
        #[arg(long, default_value = "phantom")]
        name: String,
    },
    /// Extract the five clinical ROI windows from each scan.
    Roi {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<PipelineConfig, anyhow::Error> {
    match path {
        Some(p) => Ok(PipelineConfig::load(p)?),
        None => Ok(PipelineConfig::default()),
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), anyhow::Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run() -> Result<Outcome, anyhow::Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Segment {
            config,
            out,
            jobs,
            inputs,
        } => {
            let config = load_config(&config)?;
            let (manifest, outcome) = cmd_segment(&config, &inputs, &out, jobs)?;
            std::fs::write(out.join("manifest.json"), manifest.to_json())?;
            for failure in &manifest.failures {
                eprintln!("segment: {}: {}", failure.input, failure.error);
            }
            Ok(outcome)
        }
        Command::Evaluate {
            seg,
            gt,
            format,
            out,
        } => {
            let evaluation = cmd_evaluate(&seg, &gt)?;
            emit(&evaluation.render(format.into()), &out)?;
            for failure in &evaluation.row_failures {
                eprintln!("evaluate: {}: {}", failure.input, failure.error);
            }
            for name in &evaluation.unmatched {
                eprintln!("evaluate: {name}: no counterpart file");
            }
            Ok(evaluation.outcome())
        }
        Command::Agree { a, b, format, out } => {
            let agreement = cmd_agree(&a, &b)?;
            emit(&agreement.render(format.into()), &out)?;
            for name in &agreement.degenerate {
                eprintln!("agree: {name}: degenerate pair excluded from mean");
            }
            for name in &agreement.unmatched {
                eprintln!("agree: {name}: no counterpart file");
            }
            Ok(agreement.outcome())
        }
        Command::Faz { mask, out } => {
            let json = cmd_faz(&mask)?;
            emit(&json, &out)?;
            Ok(Outcome::Success)
        }
        Command::Phantom {
            kind,
            size,
            out,
            width,
            contrast,
            noise,
            seed,
            name,
        } => {
            let spec = PhantomSpec {
                kind: kind.into(),
                size,
                width,
                contrast,
                noise,
                seed,
            };
            let (image_path, mask_path) = cmd_phantom(&spec, &name, &out)?;
            println!("{}", image_path.display());
            println!("{}", mask_path.display());
            Ok(Outcome::Success)
        }
        Command::Roi {
            config,
            out,
            inputs,
        } => {
            let config = load_config(&config)?;
            let (written, outcome) = cmd_roi(config.roi.as_ref(), &inputs, &out)?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(outcome)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(outcome) => ExitCode::from(outcome.code() as u8),
        Err(e) => {
            eprintln!("octaseg: {e}");
            ExitCode::from(2)
        }
    }
}
