//! Batch orchestration for angiogram segmentation and evaluation.
//!
//! The binary wires six subcommands over the core library: `segment`
//! (enhance -> binarise -> clean over a batch), `evaluate` (metric reports
//! against ground truth), `agree` (inter-rater kappa), `faz` (avascular-zone
//! geometry), `phantom` (synthetic test imagery) and `roi` (clinical window
//! extraction). Everything lives in this library crate so integration tests
//! can drive commands in-process.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod pipeline;

pub use commands::{Outcome, ReportFormat};
pub use config::PipelineConfig;
pub use pipeline::Pipeline;
