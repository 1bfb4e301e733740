//! Oriented flux tube detection.

use crate::exact::ExactSum;
use crate::imgio::GrayImage;

use super::kernel::{convolve_exact_many, eig2_signed, orientation_table, rescale_unit, Kernel};
use super::{scale_sequence, ParamError};

/// Oriented-flux parameters.
///
/// For each probe radius `r` the symmetric 2x2 flux matrix `Q(p; r)`
/// averages the outward flux of the Gaussian-smoothed image gradient
/// through the circle of radius `r` centred at `p`:
///
/// ```text
/// Q_ij(p) = mean over boundary samples x of  d_i G_sigma(p - x) * n_j(x)
/// ```
///
/// (symmetrised in `i, j`). Bright tubes drive both eigenvalues negative,
/// so the detection measure is `max(0, -(l1 + l2))`, maximised over radii
/// and rescaled to `[0, 1]`. `upthreshold` is carried for the two-step
/// binarisation stage and does not affect the filter response.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OofParams {
    /// Probe radius sweep, inclusive; the step equals `sigma`.
    pub radius_range: (f64, f64),
    /// Gradient smoothing scale and radius step.
    pub sigma: f64,
    /// Display-range global threshold used by two-step binarisation.
    pub upthreshold: f64,
}

impl Default for OofParams {
    fn default() -> Self {
        Self {
            radius_range: (0.5, 2.0),
            sigma: 0.5,
            upthreshold: 70.0,
        }
    }
}

impl OofParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        let (lo, hi) = self.radius_range;
        if !(lo > 0.0 && hi >= lo) {
            return Err(ParamError::InvalidScaleRange(lo, hi));
        }
        if !(self.sigma > 0.0) {
            return Err(ParamError::NonPositiveSigma(self.sigma));
        }
        Ok(())
    }
}

/// Oriented-flux detection measure, maximised over radii, in `[0, 1]`.
pub fn oof(img: &GrayImage, params: &OofParams) -> Result<GrayImage, ParamError> {
    params.validate()?;
    let data = detection_response(img, params)?;
    let data = rescale_unit(&data);
    Ok(GrayImage::new(img.width(), img.height(), data).expect("oof output"))
}

pub(crate) fn detection_response(
    img: &GrayImage,
    params: &OofParams,
) -> Result<Vec<f64>, ParamError> {
    let mut best = vec![0.0f64; img.len()];
    for radius in scale_sequence(params.radius_range, params.sigma) {
        let response = flux_measure(img, radius, params.sigma);
        for (b, v) in best.iter_mut().zip(response) {
            if v > *b {
                *b = v;
            }
        }
    }
    Ok(best)
}

/// Detection measure at a single probe radius.
pub(crate) fn flux_measure(img: &GrayImage, radius: f64, sigma: f64) -> Vec<f64> {
    let [kxx, kxy, kyy] = flux_kernels(radius, sigma);
    let responses = convolve_exact_many(img, &[kxx, kxy, kyy]);
    let mut out = vec![0.0f64; img.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let (lo, hi) = eig2_signed(responses[0][i], responses[1][i], responses[2][i]);
        let sum = lo + hi;
        if sum < 0.0 {
            *o = -sum;
        }
    }
    out
}

/// Builds the three flux kernels for one radius.
///
/// Boundary samples are spaced uniformly (a multiple of 8 so the sample set
/// is closed under the dihedral group) and each tap accumulates its sample
/// sum exactly, which keeps `Q_yy` the exact transpose image of `Q_xx` and
/// `Q_xy` exactly antisymmetric: rotations and flips of the input then
/// permute the matrix entries bit-for-bit.
fn flux_kernels(radius: f64, sigma: f64) -> [Kernel; 3] {
    let samples = 8 * ((radius * 2.0).ceil() as usize).max(1);
    let circle = circle_table(samples);
    let weight = 1.0 / samples as f64;
    let support = (radius + 4.0 * sigma).ceil() as usize + 1;

    let s2 = sigma * sigma;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * s2);
    // d/dx of the Gaussian, evaluated so G(-x, y) == -G(x, y) exactly
    let grad = |x: f64, y: f64| -> f64 { -x / s2 * norm * (-(x * x + y * y) / (2.0 * s2)).exp() };

    let mut acc_xx = ExactSum::new();
    let mut acc_xy = ExactSum::new();
    let mut acc_yy = ExactSum::new();
    // correlation form: the tap at offset o gathers dG(r n - o) per sample
    let build = |dy: i64, dx: i64, acc: &mut ExactSum, which: usize| -> f64 {
        acc.reset();
        for &(c, s) in &circle {
            let x = radius * c - dx as f64;
            let y = radius * s - dy as f64;
            let term = match which {
                0 => grad(x, y) * c,
                // symmetrised off-diagonal: (dxG ny + dyG nx) / 2
                1 => 0.5 * (grad(x, y) * s + grad(y, x) * c),
                _ => grad(y, x) * s,
            };
            acc.add_product(term, weight);
        }
        acc.value()
    };

    let kxx = Kernel::from_fn(support, true, |dy, dx| build(dy, dx, &mut acc_xx, 0));
    let kxy = Kernel::from_fn(support, true, |dy, dx| build(dy, dx, &mut acc_xy, 1));
    let kyy = Kernel::from_fn(support, true, |dy, dx| build(dy, dx, &mut acc_yy, 2));
    [kxx, kxy, kyy]
}

/// Unit vectors at `n` evenly spaced angles over the full circle, built from
/// the half-turn table by exact negation so the set carries exact dihedral
/// symmetry.
fn circle_table(n: usize) -> Vec<(f64, f64)> {
    debug_assert!(n.is_multiple_of(2));
    let half = orientation_table(n / 2);
    let mut table = Vec::with_capacity(n);
    table.extend_from_slice(&half);
    table.extend(half.iter().map(|&(c, s)| (-c, -s)));
    table
}
