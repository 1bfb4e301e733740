//! Clinical region-of-interest extraction.
//!
//! Scans are sampled at five square windows: superior, nasal, inferior,
//! temporal and foveal. Window size and placement are configuration; the
//! defaults put a quarter-side window at each cardinal mid-region and at
//! the image centre.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::GrayImage;

/// The five clinical regions of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoiLabel {
    Superior,
    Nasal,
    Inferior,
    Temporal,
    Foveal,
}

impl RoiLabel {
    pub const ALL: [RoiLabel; 5] = [
        RoiLabel::Superior,
        RoiLabel::Nasal,
        RoiLabel::Inferior,
        RoiLabel::Temporal,
        RoiLabel::Foveal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RoiLabel::Superior => "superior",
            RoiLabel::Nasal => "nasal",
            RoiLabel::Inferior => "inferior",
            RoiLabel::Temporal => "temporal",
            RoiLabel::Foveal => "foveal",
        }
    }
}

impl std::fmt::Display for RoiLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Square ROI windows: one `(row, col)` origin per label plus a common size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoiSpec {
    pub roi_size: usize,
    pub superior: (usize, usize),
    pub nasal: (usize, usize),
    pub inferior: (usize, usize),
    pub temporal: (usize, usize),
    pub foveal: (usize, usize),
}

impl RoiSpec {
    /// Default placement for a `width` x `height` scan: windows of a quarter
    /// of the smaller side, centred on the four cardinal mid-regions and the
    /// image centre. Nasal is taken as the right-hand window and temporal as
    /// the left-hand one; swap the two offsets for left eyes.
    pub fn centered(width: usize, height: usize) -> Self {
        let size = width.min(height) / 4;
        let half = size / 2;
        let qr = height / 4;
        let qc = width / 4;
        let (cr, cc) = (height / 2, width / 2);
        let origin = |r: usize, c: usize| (r.saturating_sub(half), c.saturating_sub(half));
        Self {
            roi_size: size,
            superior: origin(qr, cc),
            nasal: origin(cr, width - qc),
            inferior: origin(height - qr, cc),
            temporal: origin(cr, qc),
            foveal: origin(cr, cc),
        }
    }

    pub fn offset(&self, label: RoiLabel) -> (usize, usize) {
        match label {
            RoiLabel::Superior => self.superior,
            RoiLabel::Nasal => self.nasal,
            RoiLabel::Inferior => self.inferior,
            RoiLabel::Temporal => self.temporal,
            RoiLabel::Foveal => self.foveal,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RoiError {
    #[error("{label} window at ({row}, {col}) size {size} exceeds {width}x{height} image")]
    OutOfBounds {
        label: RoiLabel,
        row: usize,
        col: usize,
        size: usize,
        width: usize,
        height: usize,
    },
}

/// Copies out the five ROI subimages described by `spec`.
///
/// Pixels are copied verbatim; crops never alias the source storage.
pub fn extract_rois(
    img: &GrayImage,
    spec: &RoiSpec,
) -> Result<Vec<(RoiLabel, GrayImage)>, RoiError> {
    let size = spec.roi_size;
    let mut out = Vec::with_capacity(RoiLabel::ALL.len());
    for label in RoiLabel::ALL {
        let (row, col) = spec.offset(label);
        if size == 0 || row + size > img.height() || col + size > img.width() {
            return Err(RoiError::OutOfBounds {
                label,
                row,
                col,
                size,
                width: img.width(),
                height: img.height(),
            });
        }
        let crop = GrayImage::from_fn(size, size, |r, c| img.get(row + r, col + c));
        out.push((label, crop));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(side: usize) -> GrayImage {
        let n = (side * side - 1) as f64;
        GrayImage::from_fn(side, side, |r, c| (r * side + c) as f64 / n)
    }

    #[test]
    fn foveal_crop_starts_at_offset() {
        let img = ramp(304);
        let spec = RoiSpec::centered(304, 304);
        assert_eq!(spec.roi_size, 76);
        let rois = extract_rois(&img, &spec).unwrap();
        let (_, foveal) = rois.iter().find(|(l, _)| *l == RoiLabel::Foveal).unwrap();
        assert_eq!(foveal.width(), 76);
        assert_eq!(foveal.height(), 76);
        let (or, oc) = spec.foveal;
        assert_eq!(foveal.get(0, 0), img.get(or, oc));
        assert_eq!(foveal.get(75, 75), img.get(or + 75, oc + 75));
    }

    #[test]
    fn out_of_bounds_names_label() {
        let img = ramp(304);
        let mut spec = RoiSpec::centered(304, 304);
        spec.nasal = (300, 300);
        let err = extract_rois(&img, &spec).unwrap_err();
        assert!(matches!(err, RoiError::OutOfBounds { label: RoiLabel::Nasal, .. }));
    }

    #[test]
    fn reassembled_crops_match_source() {
        // four non-overlapping quadrant crops of an 8x8 image cover it exactly
        let img = ramp(8);
        let spec = RoiSpec {
            roi_size: 4,
            superior: (0, 0),
            nasal: (0, 4),
            inferior: (4, 0),
            temporal: (4, 4),
            foveal: (2, 2),
        };
        let rois = extract_rois(&img, &spec).unwrap();
        for (label, crop) in &rois {
            if *label == RoiLabel::Foveal {
                continue;
            }
            let (or, oc) = spec.offset(*label);
            for r in 0..4 {
                for c in 0..4 {
                    assert_eq!(crop.get(r, c), img.get(or + r, oc + c));
                }
            }
        }
    }

    #[test]
    fn crops_do_not_alias_source() {
        // GrayImage is immutable, so aliasing would only show as shared data;
        // compare addresses to prove the copy.
        let img = ramp(16);
        let spec = RoiSpec {
            roi_size: 4,
            superior: (0, 0),
            nasal: (0, 4),
            inferior: (4, 0),
            temporal: (4, 4),
            foveal: (6, 6),
        };
        let rois = extract_rois(&img, &spec).unwrap();
        for (_, crop) in &rois {
            assert_ne!(crop.data().as_ptr(), img.data().as_ptr());
        }
    }

    #[test]
    fn all_defaults_fit_inside_source() {
        let img = ramp(304);
        let spec = RoiSpec::centered(304, 304);
        assert!(extract_rois(&img, &spec).is_ok());
    }
}
