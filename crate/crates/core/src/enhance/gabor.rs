//! Complex wavelet orientation bank.

use crate::exact::ExactSum;
use crate::imgio::GrayImage;

use super::kernel::{convolve_exact_many, orientation_table, rescale_unit, Kernel};
use super::ParamError;

/// Orientation-bank parameters.
///
/// The exact kernel, for scale `a`, orientation `theta` and elongation
/// `epsilon`, with rotated coordinates `u = (x cos t + y sin t) / a`,
/// `v = (y cos t - x sin t) / a`:
///
/// ```text
/// envelope(u, v) = exp(-(u^2 / epsilon + v^2) / 2)
/// re = (cos(|k0| v) - C) * envelope      im = sin(|k0| v) * envelope
/// ```
///
/// `C` makes the real part zero-mean (the admissibility correction). Each
/// member is normalised by its envelope mass so responses are comparable
/// across scales, and the reported response is the modulus `sqrt(re^2 +
/// im^2)` maximised over the bank.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GaborParams {
    /// Wavelet dilations.
    pub scales: Vec<f64>,
    /// Envelope elongation along the ridge axis.
    pub epsilon: f64,
    /// Modulation vector; only its magnitude enters the kernel, the wave
    /// runs across the ridge axis.
    pub k0: (f64, f64),
    /// Orientations evenly spaced over half a turn.
    pub n_orientations: usize,
}

impl Default for GaborParams {
    fn default() -> Self {
        Self {
            scales: vec![1.0, 2.0, 3.0, 4.0],
            epsilon: 4.0,
            k0: (0.0, 3.0),
            n_orientations: 18,
        }
    }
}

impl GaborParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.scales.is_empty() || self.scales.iter().any(|&s| s <= 0.0) {
            return Err(ParamError::EmptyScales);
        }
        if self.n_orientations == 0 {
            return Err(ParamError::NoOrientations);
        }
        if !(self.epsilon > 0.0) {
            return Err(ParamError::NonPositiveWeight);
        }
        Ok(())
    }

    fn wave_number(&self) -> f64 {
        (self.k0.0 * self.k0.0 + self.k0.1 * self.k0.1).sqrt()
    }
}

/// Maximum modulus of the zero-DC wavelet bank, rescaled to `[0, 1]`.
pub fn gabor(img: &GrayImage, params: &GaborParams) -> Result<GrayImage, ParamError> {
    params.validate()?;
    let data = rescale_unit(&bank_response(img, params));
    Ok(GrayImage::new(img.width(), img.height(), data).expect("gabor output"))
}

/// Raw maximum modulus before rescaling.
pub(crate) fn bank_response(img: &GrayImage, params: &GaborParams) -> Vec<f64> {
    let trig = orientation_table(params.n_orientations);
    let wave = params.wave_number();

    let mut best = vec![0.0f64; img.len()];
    for &scale in &params.scales {
        let radius = (3.0 * scale * params.epsilon.sqrt()).ceil().max(1.0) as usize;
        for &(c, s) in &trig {
            let (re, im) = gabor_pair(scale, params.epsilon, wave, c, s, radius);
            let responses = convolve_exact_many(img, &[re, im]);
            for (i, best_v) in best.iter_mut().enumerate() {
                let modulus = (responses[0][i] * responses[0][i]
                    + responses[1][i] * responses[1][i])
                    .sqrt();
                if modulus > *best_v {
                    *best_v = modulus;
                }
            }
        }
    }
    best
}

/// Builds the (re, im) kernel pair for one bank member.
///
/// Evaluation sticks to expressions whose floating-point results are exactly
/// symmetric under coordinate negation (`|v|` for the even wave, an explicit
/// sign branch for the odd one), so members related by rotations or flips of
/// the tap grid produce bit-identical moduli.
fn gabor_pair(scale: f64, epsilon: f64, wave: f64, c: f64, s: f64, radius: usize) -> (Kernel, Kernel) {
    let r = radius as i64;
    let side = 2 * radius + 1;
    let mut envelope = vec![0.0f64; side * side];
    let mut cosine = vec![0.0f64; side * side];
    let mut sine = vec![0.0f64; side * side];

    let mut idx = 0;
    for dy in -r..=r {
        for dx in -r..=r {
            let x = dx as f64;
            let y = dy as f64;
            let u = (x * c + y * s) / scale;
            let v = (y * c - x * s) / scale;
            let env = (-(u * u / epsilon + v * v) / 2.0).exp();
            let phase = wave * v.abs();
            envelope[idx] = env;
            cosine[idx] = phase.cos() * env;
            sine[idx] = if v < 0.0 {
                -(phase.sin() * env)
            } else {
                phase.sin() * env
            };
            idx += 1;
        }
    }

    // zero-DC correction for the even part, plus envelope-mass normalisation;
    // exact sums keep the constants identical across symmetric members
    let mut env_sum = ExactSum::new();
    let mut cos_sum = ExactSum::new();
    for i in 0..envelope.len() {
        env_sum.add(envelope[i]);
        cos_sum.add(cosine[i]);
    }
    let mass = env_sum.value();
    let dc = cos_sum.value() / mass;

    let mut idx = 0;
    let re = Kernel::from_fn(radius, true, |_, _| {
        let t = (cosine[idx] - dc * envelope[idx]) / mass;
        idx += 1;
        t
    });
    let mut idx = 0;
    let im = Kernel::from_fn(radius, true, |_, _| {
        let t = sine[idx] / mass;
        idx += 1;
        t
    });
    (re, im)
}
