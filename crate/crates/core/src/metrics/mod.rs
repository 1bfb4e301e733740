//! Evaluation metrics comparing a segmentation against ground truth.
//!
//! Pixelwise scores (Dice, accuracy, precision, recall, Cohen's kappa) come
//! straight from the confusion counts. Network-structure scores look past
//! individual pixels: the connectivity/area/length triple (CAL), the
//! largest-connected-component ratio (LCC) of skeleton lengths, and the
//! topological similarity (TopS) of first Betti numbers. Clinical measures
//! cover vessel density and FAZ geometry.
//!
//! Ratios of pixel counts are computed in integer arithmetic and divided
//! once, so hand-derived fractions reproduce exactly.

use serde::Serialize;
use thiserror::Error;

use crate::imgio::BinaryMask;
use crate::netstruct::{
    betti_numbers, component_count, detect_faz, dilate_disc, largest_component_length,
    skeletonize, Connectivity, FazRegion,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("mask dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("ground truth mask is empty")]
    EmptyGroundTruth,
    #[error("ground truth has no holes; topological similarity undefined")]
    NoGroundTruthHoles,
    #[error("relative error against a zero truth value is undefined")]
    ZeroTruth,
    #[error("region area is zero")]
    ZeroArea,
}

fn check_dims(a: &BinaryMask, b: &BinaryMask) -> Result<(), MetricError> {
    if a.same_dimensions(b) {
        Ok(())
    } else {
        Err(MetricError::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ))
    }
}

/// Pixel tallies between a segmentation and ground truth; vessel is the
/// positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub true_positive: usize,
    pub false_positive: usize,
    pub true_negative: usize,
    pub false_negative: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_positive + self.false_positive + self.true_negative + self.false_negative
    }
}

pub fn confusion(seg: &BinaryMask, gt: &BinaryMask) -> Result<ConfusionCounts, MetricError> {
    check_dims(seg, gt)?;
    let mut counts = ConfusionCounts {
        true_positive: 0,
        false_positive: 0,
        true_negative: 0,
        false_negative: 0,
    };
    for (&s, &g) in seg.data().iter().zip(gt.data()) {
        match (s, g) {
            (true, true) => counts.true_positive += 1,
            (true, false) => counts.false_positive += 1,
            (false, false) => counts.true_negative += 1,
            (false, true) => counts.false_negative += 1,
        }
    }
    Ok(counts)
}

/// Dice, accuracy, precision and recall.
///
/// Conventions for empty denominators: the Dice score of two empty masks is
/// 1; precision is undefined (`None`) when the segmentation is empty and
/// recall when the ground truth is empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PixelMetrics {
    pub dice: f64,
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

pub fn pixel_metrics(c: &ConfusionCounts) -> PixelMetrics {
    let tp = c.true_positive as f64;
    let dice_denominator = 2 * c.true_positive + c.false_positive + c.false_negative;
    let dice = if dice_denominator == 0 {
        1.0
    } else {
        2.0 * tp / dice_denominator as f64
    };
    let accuracy = (c.true_positive + c.true_negative) as f64 / c.total() as f64;
    let precision = match c.true_positive + c.false_positive {
        0 => None,
        n => Some(tp / n as f64),
    };
    let recall = match c.true_positive + c.false_negative {
        0 => None,
        n => Some(tp / n as f64),
    };
    PixelMetrics {
        dice,
        accuracy,
        precision,
        recall,
    }
}

/// Cohen's kappa between two raters.
///
/// Computed in integer arithmetic as
/// `(n*agree - (|a||b| + |!a||!b|)) / (n^2 - (|a||b| + |!a||!b|))`.
/// When the chance agreement reaches 1 both raters are constant with the
/// same class, which forces identical masks: the defined sentinel is 1.
/// `None` is reserved for a degenerate disagreement, which cannot arise
/// from the formula but keeps the contract explicit.
pub fn cohens_kappa(a: &BinaryMask, b: &BinaryMask) -> Result<Option<f64>, MetricError> {
    check_dims(a, b)?;
    let n = a.len() as i128;
    let va = a.count_foreground() as i128;
    let vb = b.count_foreground() as i128;
    let agree = a
        .data()
        .iter()
        .zip(b.data())
        .filter(|(&x, &y)| x == y)
        .count() as i128;
    let chance = va * vb + (n - va) * (n - vb);
    let denominator = n * n - chance;
    if denominator == 0 {
        return Ok(if a == b { Some(1.0) } else { None });
    }
    let numerator = n * agree - chance;
    Ok(Some(numerator as f64 / denominator as f64))
}

/// Connectivity, area and length similarity terms and their product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalBreakdown {
    pub connectivity: f64,
    pub area: f64,
    pub length: f64,
    pub cal: f64,
}

/// The CAL triple: fragmentation (C), dilated overlap (A), and skeleton
/// coincidence (L), with dilation radii `alpha` (A) and `beta` (L).
pub fn cal_metric(
    seg: &BinaryMask,
    gt: &BinaryMask,
    alpha: f64,
    beta: f64,
) -> Result<CalBreakdown, MetricError> {
    check_dims(seg, gt)?;
    let gt_pixels = gt.count_foreground();
    if gt_pixels == 0 {
        return Err(MetricError::EmptyGroundTruth);
    }

    let seg_components = component_count(seg, Connectivity::Eight) as i64;
    let gt_components = component_count(gt, Connectivity::Eight) as i64;
    let connectivity =
        1.0 - f64::min(1.0, (gt_components - seg_components).unsigned_abs() as f64 / gt_pixels as f64);

    let seg_dilated = dilate_disc(seg, alpha);
    let gt_dilated = dilate_disc(gt, alpha);
    let area_numerator = seg_dilated
        .intersection(gt)
        .union(&seg.intersection(&gt_dilated))
        .count_foreground();
    let area_denominator = seg.union(gt).count_foreground();
    let area = area_numerator as f64 / area_denominator as f64;

    let seg_skeleton = skeletonize(seg).into_mask();
    let gt_skeleton = skeletonize(gt).into_mask();
    let seg_skel_dilated = dilate_disc(&seg_skeleton, beta);
    let gt_skel_dilated = dilate_disc(&gt_skeleton, beta);
    let length_numerator = seg_skeleton
        .intersection(&gt_skel_dilated)
        .union(&seg_skel_dilated.intersection(&gt_skeleton))
        .count_foreground();
    let length_denominator = seg_skeleton.union(&gt_skeleton).count_foreground();
    let length = length_numerator as f64 / length_denominator as f64;

    Ok(CalBreakdown {
        connectivity,
        area,
        length,
        cal: connectivity * area * length,
    })
}

/// Largest-connected-component ratio of skeleton lengths (pixel counts).
pub fn lcc_ratio(seg: &BinaryMask, gt: &BinaryMask) -> Result<f64, MetricError> {
    check_dims(seg, gt)?;
    let gt_length = largest_component_length(&skeletonize(gt));
    if gt_length == 0 {
        return Err(MetricError::EmptyGroundTruth);
    }
    let seg_length = largest_component_length(&skeletonize(seg));
    let diff = seg_length.abs_diff(gt_length) as f64;
    Ok(1.0 - f64::min(1.0, diff / gt_length as f64))
}

/// Topological similarity from first Betti numbers.
pub fn tops(seg: &BinaryMask, gt: &BinaryMask) -> Result<f64, MetricError> {
    check_dims(seg, gt)?;
    let gt_holes = betti_numbers(gt).b1;
    if gt_holes == 0 {
        return Err(MetricError::NoGroundTruthHoles);
    }
    let seg_holes = betti_numbers(seg).b1;
    let diff = seg_holes.abs_diff(gt_holes) as f64;
    Ok(1.0 - f64::min(1.0, diff / gt_holes as f64))
}

/// Fraction of foreground pixels.
pub fn vessel_density(mask: &BinaryMask) -> f64 {
    mask.count_foreground() as f64 / mask.len() as f64
}

/// Ratio of the region perimeter to the perimeter of the equal-area circle:
/// `perimeter / (2 sqrt(pi area))`. 1 for an ideal circle, larger for any
/// other shape.
pub fn acircularity(faz: &FazRegion) -> Result<f64, MetricError> {
    if faz.area == 0 {
        return Err(MetricError::ZeroArea);
    }
    Ok(faz.perimeter / (2.0 * (std::f64::consts::PI * faz.area as f64).sqrt()))
}

/// `|measured - truth| / |truth|`.
pub fn relative_error(measured: f64, truth: f64) -> Result<f64, MetricError> {
    if truth == 0.0 {
        return Err(MetricError::ZeroTruth);
    }
    Ok((measured - truth).abs() / truth.abs())
}

/// Every metric for one (segmentation, ground truth) pair.
///
/// Optional fields are absent when their defining quantity is degenerate:
/// `precision` for an empty segmentation, `kappa` for a degenerate
/// disagreement, `tops` when the ground truth has no holes, and the FAZ
/// errors when either mask lacks a bounded face.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub dice: f64,
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: f64,
    pub kappa: Option<f64>,
    pub connectivity: f64,
    pub area: f64,
    pub length: f64,
    pub cal: f64,
    pub lcc: f64,
    pub tops: Option<f64>,
    pub vessel_density_seg: f64,
    pub vessel_density_gt: f64,
    pub vd_rel_error: f64,
    pub faz_area_rel_error: Option<f64>,
    pub acircularity_rel_error: Option<f64>,
}

impl EvalReport {
    /// CSV header fragment matching [`EvalReport::csv_fields`].
    pub const CSV_COLUMNS: &'static str =
        "dice,acc,rec,pre,C,A,L,cal,lcc,tops,vd_seg,vd_gt,vd_err,faz_err,ai_err";

    /// Report values in CSV column order; absent metrics serialise as empty
    /// cells.
    pub fn csv_fields(&self) -> Vec<String> {
        fn cell(v: f64) -> String {
            format!("{v:.6}")
        }
        fn opt(v: Option<f64>) -> String {
            v.map(cell).unwrap_or_default()
        }
        vec![
            cell(self.dice),
            cell(self.accuracy),
            cell(self.recall),
            opt(self.precision),
            cell(self.connectivity),
            cell(self.area),
            cell(self.length),
            cell(self.cal),
            cell(self.lcc),
            opt(self.tops),
            cell(self.vessel_density_seg),
            cell(self.vessel_density_gt),
            cell(self.vd_rel_error),
            opt(self.faz_area_rel_error),
            opt(self.acircularity_rel_error),
        ]
    }
}

/// Runs the full metric battery with `alpha = beta = 1`.
pub fn evaluate(seg: &BinaryMask, gt: &BinaryMask) -> Result<EvalReport, MetricError> {
    check_dims(seg, gt)?;
    if gt.count_foreground() == 0 {
        return Err(MetricError::EmptyGroundTruth);
    }

    let counts = confusion(seg, gt)?;
    let pixels = pixel_metrics(&counts);
    let kappa = cohens_kappa(seg, gt)?;
    let cal = cal_metric(seg, gt, 1.0, 1.0)?;
    let lcc = lcc_ratio(seg, gt)?;
    let tops_score = tops(seg, gt).ok();

    let vd_seg = vessel_density(seg);
    let vd_gt = vessel_density(gt);
    let vd_rel_error = relative_error(vd_seg, vd_gt)?;

    let faz_seg = detect_faz(&skeletonize(seg)).ok();
    let faz_gt = detect_faz(&skeletonize(gt)).ok();
    let (faz_area_rel_error, acircularity_rel_error) = match (faz_seg, faz_gt) {
        (Some(fs), Some(fg)) => {
            let area_err = relative_error(fs.area as f64, fg.area as f64).ok();
            let ai_err = match (acircularity(&fs), acircularity(&fg)) {
                (Ok(a_s), Ok(a_g)) => relative_error(a_s, a_g).ok(),
                _ => None,
            };
            (area_err, ai_err)
        }
        _ => (None, None),
    };

    Ok(EvalReport {
        dice: pixels.dice,
        accuracy: pixels.accuracy,
        precision: pixels.precision,
        recall: pixels.recall.expect("non-empty ground truth"),
        kappa,
        connectivity: cal.connectivity,
        area: cal.area,
        length: cal.length,
        cal: cal.cal,
        lcc,
        tops: tops_score,
        vessel_density_seg: vd_seg,
        vessel_density_gt: vd_gt,
        vd_rel_error,
        faz_area_rel_error,
        acircularity_rel_error,
    })
}

#[cfg(test)]
mod tests;
