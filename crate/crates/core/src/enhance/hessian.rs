//! Scale-normalized Gaussian second derivatives.

use crate::imgio::GrayImage;

use super::kernel::{convolve_exact_many, Kernel};
use super::ParamError;

/// Per-pixel symmetric 2x2 second-derivative matrices at one Gaussian scale.
///
/// Components are scale-normalized (multiplied by sigma^2). `dxx`
/// differentiates along columns, `dyy` along rows.
#[derive(Debug, Clone)]
pub struct HessianField {
    pub width: usize,
    pub height: usize,
    pub sigma: f64,
    pub dxx: Vec<f64>,
    pub dxy: Vec<f64>,
    pub dyy: Vec<f64>,
}

impl HessianField {
    #[inline]
    pub fn at(&self, row: usize, col: usize) -> (f64, f64, f64) {
        let i = row * self.width + col;
        (self.dxx[i], self.dxy[i], self.dyy[i])
    }
}

fn gauss(sigma: f64, x: f64) -> f64 {
    (-x * x / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// Sampled Gaussian, mirrored so `g[r - t] == g[r + t]` exactly, normalised
/// to unit sum before quantization.
pub(crate) fn gauss_kernel_1d(sigma: f64, radius: usize) -> Vec<f64> {
    let mut taps = vec![0.0; 2 * radius + 1];
    for t in 0..=radius {
        let v = gauss(sigma, t as f64);
        taps[radius + t] = v;
        taps[radius - t] = v;
    }
    let sum: f64 = taps.iter().sum();
    for t in taps.iter_mut() {
        *t /= sum;
    }
    taps
}

/// Sampled Gaussian first derivative, antisymmetric by construction.
pub(crate) fn gauss_d1_kernel_1d(sigma: f64, radius: usize) -> Vec<f64> {
    let mut taps = vec![0.0; 2 * radius + 1];
    for t in 1..=radius {
        let x = t as f64;
        let v = -x / (sigma * sigma) * gauss(sigma, x);
        taps[radius + t] = v;
        taps[radius - t] = -v;
    }
    taps
}

/// Sampled Gaussian second derivative, symmetric by construction, with its
/// discrete moments calibrated: the taps sum to zero and their second
/// moment equals the analytic value 2, both to the quantization precision.
/// The calibration is what lets the response to a quadratic ramp match the
/// analytic second derivative to ~1e-9 even though the sampled kernel is
/// truncated.
pub(crate) fn gauss_d2_kernel_1d(sigma: f64, radius: usize) -> Vec<f64> {
    let mut taps = vec![0.0; 2 * radius + 1];
    for t in 0..=radius {
        let x = t as f64;
        let s2 = sigma * sigma;
        let v = (x * x - s2) / (s2 * s2) * gauss(sigma, x);
        taps[radius + t] = v;
        taps[radius - t] = v;
    }
    calibrate_second_derivative(&mut taps);
    taps
}

/// Snaps a symmetric second-derivative tap table onto a dyadic grid, then
/// fixes the zeroth moment to 0 and the second moment to 2 by integer
/// adjustments that keep the table symmetric (pairs `+-j` move together,
/// the centre compensates).
fn calibrate_second_derivative(taps: &mut [f64]) {
    let radius = taps.len() / 2;
    let max = taps.iter().fold(0.0f64, |m, &t| m.max(t.abs()));
    if max == 0.0 {
        return;
    }
    let quantum = 2f64.powi((max.log2().floor() as i32) - 44);
    let mut quanta: Vec<i128> = taps.iter().map(|&t| (t / quantum).round() as i128).collect();
    let dc: i128 = quanta.iter().sum();
    quanta[radius] -= dc;
    let target = (2.0 / quantum).round() as i128;
    let current: i128 = quanta
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let j = i as i128 - radius as i128;
            j * j * m
        })
        .sum();
    let mut residue = target - current;
    for j in (1..=radius as i128).rev() {
        let step = 2 * j * j;
        let delta = residue / step;
        if delta != 0 {
            quanta[radius + j as usize] += delta;
            quanta[radius - j as usize] += delta;
            quanta[radius] -= 2 * delta;
            residue -= delta * step;
        }
    }
    for (t, &m) in taps.iter_mut().zip(&quanta) {
        *t = m as f64 * quantum;
    }
}

pub(crate) fn hessian_radius(sigma: f64) -> usize {
    (4.0 * sigma).ceil().max(1.0) as usize
}

/// Computes the scale-normalized Hessian field at scale `sigma` with
/// reflective boundary handling.
///
/// The three kernels are built as outer products of mirrored 1D tables and
/// quantized zero-DC: `dyy` is the literal transpose of `dxx` and `dxy` is
/// antisymmetric in both axes, so transposing or rotating the input permutes
/// the components bit-exactly and a constant image maps to an exactly zero
/// field.
pub fn gaussian_hessian(img: &GrayImage, sigma: f64) -> Result<HessianField, ParamError> {
    if !(sigma > 0.0) {
        return Err(ParamError::NonPositiveSigma(sigma));
    }
    let radius = hessian_radius(sigma);
    let g0 = gauss_kernel_1d(sigma, radius);
    let g1 = gauss_d1_kernel_1d(sigma, radius);
    let g2 = gauss_d2_kernel_1d(sigma, radius);
    let normalization = sigma * sigma;
    let r = radius as i64;

    let kxx = Kernel::from_fn(radius, true, |dy, dx| {
        normalization * g2[(dx + r) as usize] * g0[(dy + r) as usize]
    });
    let kyy = kxx.transpose();
    let kxy = Kernel::from_fn(radius, true, |dy, dx| {
        normalization * g1[(dx + r) as usize] * g1[(dy + r) as usize]
    });

    let mut responses = convolve_exact_many(img, &[kxx, kxy, kyy]);
    let dyy = responses.pop().expect("dyy");
    let dxy = responses.pop().expect("dxy");
    let dxx = responses.pop().expect("dxx");
    Ok(HessianField {
        width: img.width(),
        height: img.height(),
        sigma,
        dxx,
        dxy,
        dyy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_sigma() {
        let img = GrayImage::filled(8, 8, 0.5);
        assert!(gaussian_hessian(&img, 0.0).is_err());
        assert!(gaussian_hessian(&img, -1.0).is_err());
    }

    #[test]
    fn constant_image_gives_exactly_zero_field() {
        for value in [0.0, 0.25, 1.0, 0.7316] {
            let img = GrayImage::filled(16, 12, value);
            let field = gaussian_hessian(&img, 1.5).unwrap();
            assert!(field.dxx.iter().all(|&v| v == 0.0));
            assert!(field.dxy.iter().all(|&v| v == 0.0));
            assert!(field.dyy.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn quadratic_ramp_has_analytic_second_derivative() {
        // img(x) = a x^2: d2/dx2 = 2a, so the normalized response is
        // 2 a sigma^2 at interior pixels
        let n = 64usize;
        let a = 1.0 / ((n - 1) as f64).powi(2);
        let img = GrayImage::from_fn(n, n, |_, c| a * (c * c) as f64);
        let sigma = 2.0;
        let field = gaussian_hessian(&img, sigma).unwrap();
        let expected = 2.0 * a * sigma * sigma;
        let radius = hessian_radius(sigma);
        for r in radius..n - radius {
            for c in radius..n - radius {
                let (dxx, dxy, dyy) = field.at(r, c);
                assert!(
                    (dxx - expected).abs() < 1e-6,
                    "dxx {dxx} vs {expected} at ({r},{c})"
                );
                assert!(dxy.abs() < 1e-9, "dxy {dxy}");
                assert!(dyy.abs() < 1e-9, "dyy {dyy}");
            }
        }
    }

    #[test]
    fn transpose_swaps_components_bitwise() {
        let img = GrayImage::from_fn(20, 14, |r, c| {
            (((r * 37 + c * 11) % 64) as f64 / 63.0).powi(2)
        });
        let field = gaussian_hessian(&img, 1.0).unwrap();
        let transposed_field = gaussian_hessian(&img.transpose(), 1.0).unwrap();
        for r in 0..img.height() {
            for c in 0..img.width() {
                let (dxx, dxy, dyy) = field.at(r, c);
                let (txx, txy, tyy) = transposed_field.at(c, r);
                assert_eq!(dxx.to_bits(), tyy.to_bits());
                assert_eq!(dyy.to_bits(), txx.to_bits());
                assert_eq!(dxy.to_bits(), txy.to_bits());
            }
        }
    }

    #[test]
    fn constant_offset_does_not_change_field() {
        // dyadic pixel values make the offset addition lossless
        let img = GrayImage::from_fn(16, 16, |r, c| ((r * 16 + c) % 128) as f64 / 256.0);
        let shifted = GrayImage::from_fn(16, 16, |r, c| img.get(r, c) + 0.25);
        let f0 = gaussian_hessian(&img, 1.0).unwrap();
        let f1 = gaussian_hessian(&shifted, 1.0).unwrap();
        assert!(f0
            .dxx
            .iter()
            .zip(&f1.dxx)
            .all(|(a, b)| a.to_bits() == b.to_bits()));
        assert!(f0
            .dxy
            .iter()
            .zip(&f1.dxy)
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}
