//! Raster data model, file I/O and clinical ROI extraction.
//!
//! Two raster types underpin the whole crate: [`GrayImage`] holds row-major
//! intensities normalised to `[0, 1]`, [`BinaryMask`] holds row-major
//! booleans (`true` = vessel). Both are immutable after construction.

mod codec;
mod roi;

pub use codec::{load_gray, load_mask, save_gray, save_mask};
pub use roi::{extract_rois, RoiError, RoiLabel, RoiSpec};

use thiserror::Error;

/// Construction-time invariant violations for raster types.
#[derive(Debug, Error, PartialEq)]
pub enum RasterError {
    #[error("raster dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("data length {len} does not match {width}x{height}")]
    LengthMismatch {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("intensity {value} at index {index} outside [0, 1]")]
    ValueOutOfRange { index: usize, value: f64 },
}

/// 2D raster of normalised intensities in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    /// Builds an image from row-major data, validating the invariants.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyDimensions { width, height });
        }
        if data.len() != width * height {
            return Err(RasterError::LengthMismatch {
                width,
                height,
                len: data.len(),
            });
        }
        for (index, &value) in data.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(RasterError::ValueOutOfRange { index, value });
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    ///
    /// Panics if `f` produces a value outside `[0, 1]` or a dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self::new(width, height, data).expect("from_fn produced an invalid raster")
    }

    /// Constant-valued image.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("invalid fill")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Rotates 90 degrees counter-clockwise (pure resampling, bit-exact).
    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        Self::from_fn(h, w, |row, col| self.get(col, w - 1 - row))
    }

    /// Rotates 180 degrees.
    pub fn rotate180(&self) -> Self {
        let (w, h) = (self.width, self.height);
        Self::from_fn(w, h, |row, col| self.get(h - 1 - row, w - 1 - col))
    }

    /// Rotates 270 degrees counter-clockwise.
    pub fn rotate270(&self) -> Self {
        let (w, h) = (self.width, self.height);
        Self::from_fn(h, w, |row, col| self.get(h - 1 - col, row))
    }

    /// Mirrors left-right.
    pub fn flip_horizontal(&self) -> Self {
        let w = self.width;
        Self::from_fn(w, self.height, |row, col| self.get(row, w - 1 - col))
    }

    /// Mirrors top-bottom.
    pub fn flip_vertical(&self) -> Self {
        let h = self.height;
        Self::from_fn(self.width, h, |row, col| self.get(h - 1 - row, col))
    }

    /// Swaps rows and columns.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.height, self.width, |row, col| self.get(col, row))
    }
}

/// 2D boolean raster, row-major, `true` = vessel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyDimensions { width, height });
        }
        if data.len() != width * height {
            return Err(RasterError::LengthMismatch {
                width,
                height,
                len: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self::new(width, height, data).expect("from_fn produced an invalid mask")
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("invalid fill")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col]
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    /// Number of foreground pixels.
    pub fn count_foreground(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    /// True when the two masks have equal width and height.
    pub fn same_dimensions(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Pixelwise union. Panics on dimension mismatch.
    pub fn union(&self, other: &Self) -> Self {
        assert!(self.same_dimensions(other), "mask dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a || b)
            .collect();
        Self::new(self.width, self.height, data).expect("union")
    }

    /// Pixelwise intersection. Panics on dimension mismatch.
    pub fn intersection(&self, other: &Self) -> Self {
        assert!(self.same_dimensions(other), "mask dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a && b)
            .collect();
        Self::new(self.width, self.height, data).expect("intersection")
    }

    /// True iff `self` is a pixelwise subset of `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.same_dimensions(other)
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(&a, &b)| !a || b)
    }

    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        Self::from_fn(h, w, |row, col| self.get(col, w - 1 - row))
    }

    pub fn rotate180(&self) -> Self {
        let (w, h) = (self.width, self.height);
        Self::from_fn(w, h, |row, col| self.get(h - 1 - row, w - 1 - col))
    }

    pub fn flip_horizontal(&self) -> Self {
        let w = self.width;
        Self::from_fn(w, self.height, |row, col| self.get(row, w - 1 - col))
    }
}
