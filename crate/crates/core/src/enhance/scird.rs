//! Curved-support ridge-detector bank.

use crate::imgio::GrayImage;

use super::kernel::{convolve_exact_many, orientation_table, rescale_unit, Kernel};
use super::{scale_sequence, ParamError};

/// Curved-ridge bank parameters.
///
/// The bank enumerates kernels over the `(sigma_1, sigma_2, k, angle)` grid.
/// With rotated coordinates `u = x cos t + y sin t`, `v = y cos t - x sin t`
/// and the bent cross-ridge coordinate `h = v + k u^2`, each kernel is the
/// (negated) second derivative of a curved Gaussian:
///
/// ```text
/// F(x, y) = (1 - h^2 / sigma_2^2) / sigma_2^2
///           * exp(-u^2 / (2 sigma_1^2)) * exp(-h^2 / (2 sigma_2^2))
/// ```
///
/// so bright ridges of matching curvature respond positively along their
/// centreline. Responses are divided by `1 + alpha * s(p)` where `s(p)` is
/// the intensity standard deviation over the `filter_size` window (the
/// contrast-normalisation weight), maximised over the bank, then rescaled
/// to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScirdParams {
    /// Along-ridge Gaussian support range, inclusive.
    pub sigma1_range: (f64, f64),
    pub sigma1_step: f64,
    /// Cross-ridge Gaussian support range, inclusive.
    pub sigma2_range: (f64, f64),
    pub sigma2_step: f64,
    /// Curvature range, inclusive; a symmetric range is mirrored exactly.
    pub k_range: (f64, f64),
    pub k_step: f64,
    /// Orientation step in degrees; must divide 180.
    pub angle_step: f64,
    /// Kernel side in pixels, odd.
    pub filter_size: usize,
    /// Contrast-normalisation weight.
    pub alpha: f64,
}

impl Default for ScirdParams {
    fn default() -> Self {
        Self {
            sigma1_range: (1.0, 5.0),
            sigma1_step: 0.5,
            sigma2_range: (1.0, 2.0),
            sigma2_step: 0.5,
            k_range: (-0.1, 0.1),
            k_step: 0.025,
            angle_step: 10.0,
            filter_size: 9,
            alpha: 0.05,
        }
    }
}

impl ScirdParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        for (range, step) in [
            (self.sigma1_range, self.sigma1_step),
            (self.sigma2_range, self.sigma2_step),
        ] {
            if !(range.0 > 0.0 && range.1 >= range.0) {
                return Err(ParamError::InvalidScaleRange(range.0, range.1));
            }
            if !(step > 0.0) {
                return Err(ParamError::NonPositiveStep(step));
            }
        }
        if self.k_range.1 < self.k_range.0 {
            return Err(ParamError::InvalidCurvatureRange(
                self.k_range.0,
                self.k_range.1,
            ));
        }
        if !(self.k_step > 0.0) {
            return Err(ParamError::NonPositiveStep(self.k_step));
        }
        if !(self.angle_step > 0.0) || 180.0 % self.angle_step != 0.0 {
            return Err(ParamError::NonPositiveStep(self.angle_step));
        }
        if self.filter_size.is_multiple_of(2) || self.filter_size < 3 {
            return Err(ParamError::BadFilterSize(self.filter_size));
        }
        if !(self.alpha >= 0.0) {
            return Err(ParamError::NonPositiveWeight);
        }
        Ok(())
    }

    /// Curvature grid. A symmetric range is built by mirroring the positive
    /// half so `k` and `-k` members pair bit-exactly.
    fn curvatures(&self) -> Vec<f64> {
        let (lo, hi) = self.k_range;
        if lo == -hi && hi > 0.0 {
            let positive: Vec<f64> = scale_sequence((self.k_step, hi), self.k_step);
            let mut grid: Vec<f64> = positive.iter().rev().map(|&k| -k).collect();
            grid.push(0.0);
            grid.extend(positive);
            grid
        } else {
            scale_sequence((lo, hi), self.k_step)
        }
    }
}

/// Maximum contrast-normalised response over the curved-ridge bank,
/// rescaled to `[0, 1]`.
pub fn scird_ts(img: &GrayImage, params: &ScirdParams) -> Result<GrayImage, ParamError> {
    params.validate()?;
    let data = bank_response(img, params)?;
    let data = rescale_unit(&data);
    Ok(GrayImage::new(img.width(), img.height(), data).expect("scird output"))
}

pub(crate) fn bank_response(img: &GrayImage, params: &ScirdParams) -> Result<Vec<f64>, ParamError> {
    let radius = (params.filter_size - 1) / 2;
    let n_angles = (180.0 / params.angle_step).round() as usize;
    let trig = orientation_table(n_angles);
    let sigma1s = scale_sequence(params.sigma1_range, params.sigma1_step);
    let sigma2s = scale_sequence(params.sigma2_range, params.sigma2_step);
    let curvatures = params.curvatures();

    let damping = local_contrast_damping(img, params.filter_size, params.alpha);

    let mut best = vec![f64::NEG_INFINITY; img.len()];
    for &sigma1 in &sigma1s {
        for &sigma2 in &sigma2s {
            for &k in &curvatures {
                // kernels for all orientations share radius: convolve batched
                let kernels: Vec<Kernel> = trig
                    .iter()
                    .map(|&(c, s)| curved_ridge_kernel(radius, sigma1, sigma2, k, c, s))
                    .collect();
                let responses = convolve_exact_many(img, &kernels);
                for response in &responses {
                    for (i, best_v) in best.iter_mut().enumerate() {
                        let v = response[i] / damping[i];
                        if v > *best_v {
                            *best_v = v;
                        }
                    }
                }
            }
        }
    }
    Ok(best)
}

fn curved_ridge_kernel(radius: usize, sigma1: f64, sigma2: f64, k: f64, c: f64, s: f64) -> Kernel {
    let s1 = 2.0 * sigma1 * sigma1;
    let s2 = sigma2 * sigma2;
    Kernel::from_fn(radius, true, |dy, dx| {
        let x = dx as f64;
        let y = dy as f64;
        let u = x * c + y * s;
        let v = y * c - x * s;
        let h = v + k * (u * u);
        let h2 = h * h;
        (1.0 - h2 / s2) / s2 * (-(u * u) / s1).exp() * (-h2 / (2.0 * s2)).exp()
    })
}

/// `1 + alpha * std` over the `window` x `window` neighbourhood, computed
/// with the exact engine so it shares the filters' symmetry guarantees.
fn local_contrast_damping(img: &GrayImage, window: usize, alpha: f64) -> Vec<f64> {
    if alpha == 0.0 {
        return vec![1.0; img.len()];
    }
    let radius = (window - 1) / 2;
    let n = (window * window) as f64;
    let box_kernel = Kernel::from_fn(radius, false, |_, _| 1.0 / n);
    let mean = super::kernel::convolve_exact(img, &box_kernel);
    let squared = GrayImage::new(
        img.width(),
        img.height(),
        img.data().iter().map(|&v| v * v).collect(),
    )
    .expect("squares of unit-interval values stay in range");
    let mean_sq = super::kernel::convolve_exact(&squared, &box_kernel);
    mean.iter()
        .zip(&mean_sq)
        .map(|(&m, &msq)| 1.0 + alpha * (msq - m * m).max(0.0).sqrt())
        .collect()
}
