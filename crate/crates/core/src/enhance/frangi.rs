//! Multiscale Hessian vesselness.

use crate::imgio::GrayImage;

use super::hessian::gaussian_hessian;
use super::kernel::{eig2_by_magnitude, rescale_unit};
use super::{scale_sequence, ParamError};

/// Multiscale vesselness parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FrangiParams {
    /// Gaussian scales swept from low to high, inclusive.
    pub scale_range: (f64, f64),
    /// Step between consecutive scales.
    pub scale_ratio: f64,
    /// Blobness weight (suppresses blob-like responses).
    pub beta_one: f64,
    /// Structureness weight (suppresses low-contrast responses).
    pub beta_two: f64,
}

impl Default for FrangiParams {
    fn default() -> Self {
        Self {
            scale_range: (0.5, 2.0),
            scale_ratio: 0.5,
            beta_one: 1.0,
            beta_two: 15.0,
        }
    }
}

impl FrangiParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        let (lo, hi) = self.scale_range;
        if !(lo > 0.0 && hi >= lo) {
            return Err(ParamError::InvalidScaleRange(lo, hi));
        }
        if !(self.scale_ratio > 0.0) {
            return Err(ParamError::NonPositiveStep(self.scale_ratio));
        }
        if !(self.beta_one > 0.0 && self.beta_two > 0.0) {
            return Err(ParamError::NonPositiveWeight);
        }
        Ok(())
    }
}

/// Bright-vessel Frangi vesselness, maximised over scales and min-max
/// rescaled to `[0, 1]`.
///
/// Per scale the eigenvalues of the scale-normalized Hessian are ordered by
/// magnitude (`|l1| <= |l2|`); pixels with `l2 >= 0` cannot be bright
/// ridges and score zero, the rest score
/// `exp(-(l1/l2)^2 / (2 b1^2)) * (1 - exp(-(l1^2 + l2^2) / (2 b2^2)))`.
pub fn frangi(img: &GrayImage, params: &FrangiParams) -> Result<GrayImage, ParamError> {
    params.validate()?;
    let b1 = 2.0 * params.beta_one * params.beta_one;
    let b2 = 2.0 * params.beta_two * params.beta_two;

    let mut best = vec![0.0f64; img.len()];
    for sigma in scale_sequence(params.scale_range, params.scale_ratio) {
        let field = gaussian_hessian(img, sigma)?;
        for (i, best_v) in best.iter_mut().enumerate() {
            let (small, large) = eig2_by_magnitude(field.dxx[i], field.dxy[i], field.dyy[i]);
            if large >= 0.0 {
                continue;
            }
            let blobness = small / large;
            let structure = small * small + large * large;
            let v = (-blobness * blobness / b1).exp() * (1.0 - (-structure / b2).exp());
            if v > *best_v {
                *best_v = v;
            }
        }
    }
    let data = rescale_unit(&best);
    Ok(GrayImage::new(img.width(), img.height(), data).expect("frangi output"))
}
