//! Binarisation of grayscale images into vessel masks.
//!
//! Threshold routes: local-mean adaptive thresholding, Otsu's
//! between-class-variance criterion, the triangle (histogram-shape) rule,
//! and the two-step union of a global and an adaptive mask for oriented-flux
//! responses. Classifier route: per-pixel feature vectors fed through a
//! lazy k-nearest-neighbour rule. Cleanup: area opening that removes small
//! disconnected structures without touching 1-px-wide capillaries, plus an
//! optional structural disc opening.

mod features;
mod knn;
mod threshold;

pub use features::{pixel_features, FeatureField, FeatureVector, FEATURE_COUNT};
pub use knn::{knn_binarise, KnnError, TrainingSet};
pub use threshold::{
    adaptive_threshold, histogram_shape_threshold, otsu_threshold, two_step_binarise,
};

use thiserror::Error;

use crate::imgio::BinaryMask;
use crate::netstruct::{connected_components, dilate_disc, erode_disc, Connectivity};

#[derive(Debug, Error, PartialEq)]
pub enum BinariseError {
    #[error("window must be odd and at least 3, got {0}")]
    BadWindow(usize),
    #[error("ratio must lie in [0, 1), got {0}")]
    BadRatio(f64),
    #[error("histogram is degenerate: fewer than two occupied intensity levels")]
    DegenerateHistogram,
    #[error("image must be at least 3x3 for neighbourhood features")]
    TooSmall,
    #[error(transparent)]
    Params(#[from] crate::enhance::ParamError),
}

/// Removes every 8-connected foreground component smaller than `min_area`
/// pixels; all other components pass through untouched.
pub fn clean_small_structures(mask: &BinaryMask, min_area: usize) -> BinaryMask {
    let labels = connected_components(mask, Connectivity::Eight);
    let sizes = labels.sizes();
    BinaryMask::from_fn(mask.width(), mask.height(), |r, c| {
        let label = labels.label(r, c);
        label > 0 && sizes[(label - 1) as usize] >= min_area
    })
}

/// Structural opening with a disc: erosion then dilation. Deletes every
/// structure thinner than the disc, including 1-px capillaries, so it is
/// not the default cleanup.
pub fn open_disc(mask: &BinaryMask, radius: f64) -> BinaryMask {
    dilate_disc(&erode_disc(mask, radius), radius)
}
