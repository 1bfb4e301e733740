//! Threshold binarisers.

use crate::enhance::OofParams;
use crate::imgio::{BinaryMask, GrayImage};

use super::BinariseError;

/// Local-mean adaptive threshold: pixel is vessel iff its intensity exceeds
/// `(1 - ratio)` times the mean over the `window` x `window` neighbourhood
/// (reflective borders, integral-image means).
///
/// The rule is multiplicative, so rescaling the image by a positive
/// constant leaves the mask unchanged. A constant positive image compares
/// `v > v (1 - ratio)` and comes out all vessel; a constant zero image is
/// all background.
pub fn adaptive_threshold(
    img: &GrayImage,
    window: usize,
    ratio: f64,
) -> Result<BinaryMask, BinariseError> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(BinariseError::BadWindow(window));
    }
    if !(0.0..1.0).contains(&ratio) {
        return Err(BinariseError::BadRatio(ratio));
    }
    let means = local_means(img, window);
    let scale = 1.0 - ratio;
    let data = img
        .data()
        .iter()
        .zip(&means)
        .map(|(&v, &m)| v > scale * m)
        .collect();
    Ok(BinaryMask::new(img.width(), img.height(), data).expect("adaptive mask"))
}

/// Window means via an integral image over the reflect-padded raster.
fn local_means(img: &GrayImage, window: usize) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let pad = window / 2;
    let (pw, ph) = (w + 2 * pad, h + 2 * pad);

    // padded integral image, one extra row/col of zeros at the front
    let mut integral = vec![0.0f64; (pw + 1) * (ph + 1)];
    for r in 0..ph {
        let src_r = crate::enhance::kernel::reflect(r as i64 - pad as i64, h as i64);
        let mut row_sum = 0.0;
        for c in 0..pw {
            let src_c = crate::enhance::kernel::reflect(c as i64 - pad as i64, w as i64);
            row_sum += img.get(src_r, src_c);
            integral[(r + 1) * (pw + 1) + (c + 1)] = integral[r * (pw + 1) + (c + 1)] + row_sum;
        }
    }

    let count = (window * window) as f64;
    let mut means = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            // window top-left in padded coords is exactly (r, c)
            let (r0, c0) = (r, c);
            let (r1, c1) = (r + window, c + window);
            let sum = integral[r1 * (pw + 1) + c1] - integral[r0 * (pw + 1) + c1]
                - integral[r1 * (pw + 1) + c0]
                + integral[r0 * (pw + 1) + c0];
            // cancellation in the corner differences can leave a tiny
            // negative residue on exactly-zero regions, which would make
            // the strict rule fire on v = 0; means of non-negative data
            // are non-negative
            means.push((sum / count).max(0.0));
        }
    }
    means
}

/// 256-bin histogram of display-range intensities.
fn histogram(img: &GrayImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in img.data() {
        let bin = (v * 255.0).round() as usize;
        hist[bin.min(255)] += 1;
    }
    hist
}

fn display_level(v: f64) -> u8 {
    ((v * 255.0).round() as usize).min(255) as u8
}

/// Otsu's threshold: the split of the 256-bin histogram maximising the
/// between-class variance; pixel is vessel iff its display level exceeds
/// the threshold. Ties resolve to the lowest threshold.
pub fn otsu_threshold(img: &GrayImage) -> Result<BinaryMask, BinariseError> {
    let hist = histogram(img);
    let threshold = otsu_level(&hist)?;
    Ok(BinaryMask::new(
        img.width(),
        img.height(),
        img.data()
            .iter()
            .map(|&v| display_level(v) > threshold)
            .collect(),
    )
    .expect("otsu mask"))
}

pub(crate) fn otsu_level(hist: &[u64; 256]) -> Result<u8, BinariseError> {
    if hist.iter().filter(|&&n| n > 0).count() < 2 {
        return Err(BinariseError::DegenerateHistogram);
    }
    let total: u64 = hist.iter().sum();
    let total_weighted: u64 = hist.iter().enumerate().map(|(i, &n)| i as u64 * n).sum();

    let mut best = (0u8, f64::NEG_INFINITY);
    let mut below_count = 0u64;
    let mut below_weighted = 0u64;
    for t in 0..255usize {
        below_count += hist[t];
        below_weighted += t as u64 * hist[t];
        let above_count = total - below_count;
        if below_count == 0 || above_count == 0 {
            continue;
        }
        let mean_below = below_weighted as f64 / below_count as f64;
        let mean_above = (total_weighted - below_weighted) as f64 / above_count as f64;
        let gap = mean_below - mean_above;
        let variance = below_count as f64 * above_count as f64 * gap * gap;
        if variance > best.1 {
            best = (t as u8, variance);
        }
    }
    Ok(best.0)
}

/// Triangle-method threshold: a line runs from the histogram peak to the
/// far end of its longer tail, and the threshold sits at the bin with the
/// largest perpendicular distance below that line. Pixel is vessel iff its
/// display level exceeds the threshold.
pub fn histogram_shape_threshold(img: &GrayImage) -> Result<BinaryMask, BinariseError> {
    let hist = histogram(img);
    let threshold = triangle_level(&hist)?;
    Ok(BinaryMask::new(
        img.width(),
        img.height(),
        img.data()
            .iter()
            .map(|&v| display_level(v) > threshold)
            .collect(),
    )
    .expect("triangle mask"))
}

pub(crate) fn triangle_level(hist: &[u64; 256]) -> Result<u8, BinariseError> {
    if hist.iter().filter(|&&n| n > 0).count() < 2 {
        return Err(BinariseError::DegenerateHistogram);
    }
    let peak = (0..256).max_by_key(|&i| (hist[i], std::cmp::Reverse(i))).expect("non-empty");
    let lo = (0..256).find(|&i| hist[i] > 0).expect("non-empty");
    let hi = (0..256).rev().find(|&i| hist[i] > 0).expect("non-empty");
    // walk toward the longer tail
    let end = if hi - peak >= peak - lo { hi } else { lo };

    let (x0, y0) = (peak as f64, hist[peak] as f64);
    let (x1, y1) = (end as f64, hist[end] as f64);
    let range: Box<dyn Iterator<Item = usize>> = if end > peak {
        Box::new(peak + 1..end)
    } else {
        Box::new(end + 1..peak)
    };
    let mut best = (peak.min(end), f64::NEG_INFINITY);
    for t in range {
        // unnormalised perpendicular distance from (t, hist[t]) to the line
        let d = ((y1 - y0) * t as f64 - (x1 - x0) * hist[t] as f64 + x1 * y0 - y1 * x0).abs();
        if d > best.1 {
            best = (t, d);
        }
    }
    Ok(best.0 as u8)
}

/// Two-step binarisation for oriented-flux responses: the union of a global
/// display-range threshold (`v * 255 > upthreshold`, large vessels) and the
/// adaptive threshold (small vessels).
pub fn two_step_binarise(
    img: &GrayImage,
    params: &OofParams,
    window: usize,
    ratio: f64,
) -> Result<BinaryMask, BinariseError> {
    params.validate()?;
    let adaptive = adaptive_threshold(img, window, ratio)?;
    let global = global_threshold(img, params.upthreshold);
    Ok(global.union(&adaptive))
}

/// The global half of [`two_step_binarise`], exposed for inspection.
pub(crate) fn global_threshold(img: &GrayImage, upthreshold: f64) -> BinaryMask {
    BinaryMask::new(
        img.width(),
        img.height(),
        img.data()
            .iter()
            .map(|&v| v * 255.0 > upthreshold)
            .collect(),
    )
    .expect("global mask")
}
