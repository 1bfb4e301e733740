//! Per-pixel feature extraction for classifier binarisation.

use crate::enhance::{gaussian_hessian, kernel::eig2_by_magnitude};
use crate::imgio::GrayImage;

use super::BinariseError;

pub const FEATURE_COUNT: usize = 7;

/// Seven features characterising one pixel: intensity, then range, mean,
/// standard deviation and entropy over the 3x3 neighbourhood, then the two
/// Hessian eigenvalues at scale 1 ordered by magnitude.
pub type FeatureVector = [f64; FEATURE_COUNT];

/// Row-major field of feature vectors, one per pixel.
#[derive(Debug, Clone)]
pub struct FeatureField {
    pub width: usize,
    pub height: usize,
    pub features: Vec<FeatureVector>,
}

impl FeatureField {
    pub fn at(&self, row: usize, col: usize) -> &FeatureVector {
        &self.features[row * self.width + col]
    }
}

/// Computes the seven-feature field (reflective borders; entropy over an
/// 8-bin quantization of the patch; population standard deviation).
pub fn pixel_features(img: &GrayImage) -> Result<FeatureField, BinariseError> {
    if img.width() < 3 || img.height() < 3 {
        return Err(BinariseError::TooSmall);
    }
    let (w, h) = (img.width(), img.height());
    let hessian = gaussian_hessian(img, 1.0).expect("unit sigma is valid");

    let mut features = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            let mut patch = [0.0f64; 9];
            let mut i = 0;
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    let rr = crate::enhance::kernel::reflect(r as i64 + dr, h as i64);
                    let cc = crate::enhance::kernel::reflect(c as i64 + dc, w as i64);
                    patch[i] = img.get(rr, cc);
                    i += 1;
                }
            }
            let intensity = img.get(r, c);
            let min = patch.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = patch.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mean = patch.iter().sum::<f64>() / 9.0;
            let variance = patch.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / 9.0;
            let std = variance.max(0.0).sqrt();
            let entropy = patch_entropy(&patch);
            let (dxx, dxy, dyy) = hessian.at(r, c);
            let (lambda_small, lambda_large) = eig2_by_magnitude(dxx, dxy, dyy);
            features.push([
                intensity,
                max - min,
                mean,
                std,
                entropy,
                lambda_small,
                lambda_large,
            ]);
        }
    }
    Ok(FeatureField {
        width: w,
        height: h,
        features,
    })
}

/// Shannon entropy (bits) of the patch under a fixed 8-bin quantization of
/// `[0, 1]`.
fn patch_entropy(patch: &[f64; 9]) -> f64 {
    let mut counts = [0u32; 8];
    for &v in patch {
        let bin = ((v * 8.0) as usize).min(7);
        counts[bin] += 1;
    }
    let mut entropy = 0.0;
    for &n in &counts {
        if n > 0 {
            let p = f64::from(n) / 9.0;
            entropy -= p * p.log2();
        }
    }
    entropy
}
