//! Enhance -> binarise -> clean composition.

use thiserror::Error;

use octaseg::binarise::{
    adaptive_threshold, clean_small_structures, histogram_shape_threshold, knn_binarise,
    otsu_threshold, two_step_binarise, BinariseError, KnnError, TrainingSet,
};
use octaseg::enhance::{frangi, gabor, oof, scird_ts, ParamError};
use octaseg::{BinaryMask, GrayImage};

use crate::config::{Binarisation, Enhancement, PipelineConfig};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Binarise(#[from] BinariseError),
    #[error(transparent)]
    Knn(#[from] KnnError),
    #[error("knn binarisation requires a training set")]
    MissingTraining,
}

/// A ready-to-run segmentation pipeline: the configuration plus any
/// training data it references, loaded once up front.
pub struct Pipeline {
    config: PipelineConfig,
    training: Option<TrainingSet>,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self, KnnError> {
        let training = match (&config.binarisation, &config.knn.training) {
            (Binarisation::Knn, Some(path)) => Some(TrainingSet::read_csv(path)?),
            _ => None,
        };
        Ok(Self { config, training })
    }

    /// Pipeline with an in-memory training set (used by tests and library
    /// callers; the CLI loads from the configured CSV).
    pub fn with_training(config: PipelineConfig, training: TrainingSet) -> Self {
        Self {
            config,
            training: Some(training),
        }
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    /// Vessel-enhancement stage ("none" passes the image through).
    pub fn enhance(&self, img: &GrayImage) -> Result<GrayImage, PipelineError> {
        Ok(match self.config.enhancement {
            Enhancement::None => img.clone(),
            Enhancement::Frangi => frangi(img, &(&self.config.frangi).into())?,
            Enhancement::Gabor => gabor(img, &(&self.config.gabor).into())?,
            Enhancement::ScirdTs => scird_ts(img, &(&self.config.scird_ts).into())?,
            Enhancement::Oof => oof(img, &(&self.config.oof).into())?,
        })
    }

    /// Full enhance -> binarise -> clean run.
    pub fn segment(&self, img: &GrayImage) -> Result<BinaryMask, PipelineError> {
        let enhanced = self.enhance(img)?;
        let adaptive = &self.config.adaptive;
        let mask = match self.config.binarisation {
            Binarisation::Adaptive => {
                adaptive_threshold(&enhanced, adaptive.window, adaptive.ratio)?
            }
            Binarisation::Otsu => otsu_threshold(&enhanced)?,
            Binarisation::Histogram => histogram_shape_threshold(&enhanced)?,
            Binarisation::TwoStep => two_step_binarise(
                &enhanced,
                &(&self.config.oof).into(),
                adaptive.window,
                adaptive.ratio,
            )?,
            Binarisation::Knn => {
                let training = self.training.as_ref().ok_or(PipelineError::MissingTraining)?;
                let k = self.config.knn.k.unwrap_or(5);
                knn_binarise(training, &enhanced, k)?
            }
        };
        Ok(clean_small_structures(&mask, self.config.cleanup.min_area))
    }
}
