//! Vessel-enhancement filters.
//!
//! Four handcrafted filters turn a raw angiogram into a grayscale
//! vesselness map: multiscale Hessian vesselness ([`frangi`]), a complex
//! wavelet orientation bank ([`gabor`]), a curved-ridge second-derivative
//! bank ([`scird_ts`]) and oriented flux ([`oof`]). All of them share the
//! exact convolution engine in [`kernel`], so they satisfy three structural
//! guarantees, bit for bit: constant inputs produce identically zero
//! output, adding a lossless constant offset changes nothing (they are
//! derivative-based), and axis-aligned rotations or flips of the input
//! commute with the filter whenever the orientation grid is closed under
//! the transform (the defaults are).
//!
//! Outputs are min-max rescaled to `[0, 1]` so downstream display-range
//! thresholds apply directly.

mod frangi;
mod gabor;
mod hessian;
pub(crate) mod kernel;
mod oof;
mod scird;

pub use frangi::{frangi, FrangiParams};
pub use gabor::{gabor, GaborParams};
pub use hessian::{gaussian_hessian, HessianField};
pub use oof::{oof, OofParams};
pub use scird::{scird_ts, ScirdParams};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("invalid scale range [{0}, {1}]")]
    InvalidScaleRange(f64, f64),
    #[error("step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("weights must be positive")]
    NonPositiveWeight,
    #[error("scale list must be non-empty and positive")]
    EmptyScales,
    #[error("orientation count must be at least 1")]
    NoOrientations,
    #[error("filter size must be odd and at least 3, got {0}")]
    BadFilterSize(usize),
    #[error("curvature range [{0}, {1}] is invalid")]
    InvalidCurvatureRange(f64, f64),
}

/// Inclusive scale sweep `lo, lo + step, ..., <= hi` (with a half-step slack
/// against accumulation error).
pub(crate) fn scale_sequence(range: (f64, f64), step: f64) -> Vec<f64> {
    let mut scales = Vec::new();
    let mut s = range.0;
    let mut i = 1u32;
    while s <= range.1 + step * 1e-9 {
        scales.push(s);
        s = range.0 + step * f64::from(i);
        i += 1;
    }
    scales
}
