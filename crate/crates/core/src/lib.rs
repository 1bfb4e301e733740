//! Segmentation and network-structure evaluation of microvascular angiograms.
//!
//! The crate is organised around a small raster data model and five
//! processing stages:
//!
//! * [`imgio`]: grayscale/binary rasters, PNG/PGM codecs, clinical ROI
//!   extraction.
//! * [`enhance`]: handcrafted vessel-enhancement filters (Frangi, Gabor,
//!   curved-ridge bank, oriented flux) producing vesselness maps.
//! * [`binarise`]: threshold and classifier binarisation plus small-structure
//!   cleanup.
//! * [`netstruct`]: skeletonization, connectivity, Betti numbers, vessel
//!   graphs and avascular-zone detection.
//! * [`metrics`]: pixelwise, network-structure and clinical evaluation
//!   metrics comparing a segmentation against ground truth.
//!
//! [`phantom`] generates synthetic vessel imagery (tubes, rings, grids,
//! trees) with analytic ground-truth masks so every pipeline can be
//! exercised without clinical data.
//!
//! All types are immutable after construction and all operations are pure,
//! so batches are safe to process from concurrent workers without locking.
//!
//! The enhancement filters accumulate convolution sums exactly (see
//! [`exact`]), which makes their outputs independent of evaluation order:
//! constant images map to identically zero responses and the filters are
//! bit-for-bit equivariant under axis-aligned rotations and flips.

pub mod binarise;
pub mod enhance;
pub mod exact;
pub mod imgio;
pub mod metrics;
pub mod netstruct;
pub mod phantom;

pub use imgio::{BinaryMask, GrayImage, RoiLabel, RoiSpec};
pub use metrics::EvalReport;
