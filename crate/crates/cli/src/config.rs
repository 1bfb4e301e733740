//! Pipeline configuration: JSON with the filter parameter key names kept
//! verbatim for auditability.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use octaseg::enhance::{FrangiParams, GaborParams, OofParams, ScirdParams};
use octaseg::RoiSpec;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse failure: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("knn binarisation requires a training csv path")]
    MissingTraining,
    #[error(transparent)]
    Params(#[from] octaseg::enhance::ParamError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Enhancement {
    None,
    Frangi,
    Gabor,
    ScirdTs,
    Oof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binarisation {
    Adaptive,
    Otsu,
    Histogram,
    TwoStep,
    Knn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrangiConfig {
    #[serde(rename = "FrangiScaleRange")]
    pub scale_range: (f64, f64),
    #[serde(rename = "FrangiScaleRatio")]
    pub scale_ratio: f64,
    #[serde(rename = "FrangiBetaOne")]
    pub beta_one: f64,
    #[serde(rename = "FrangiBetaTwo")]
    pub beta_two: f64,
}

impl Default for FrangiConfig {
    fn default() -> Self {
        let p = FrangiParams::default();
        Self {
            scale_range: p.scale_range,
            scale_ratio: p.scale_ratio,
            beta_one: p.beta_one,
            beta_two: p.beta_two,
        }
    }
}

impl From<&FrangiConfig> for FrangiParams {
    fn from(c: &FrangiConfig) -> Self {
        Self {
            scale_range: c.scale_range,
            scale_ratio: c.scale_ratio,
            beta_one: c.beta_one,
            beta_two: c.beta_two,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaborConfig {
    pub scales: Vec<f64>,
    pub epsilon: f64,
    pub k0: (f64, f64),
    pub n_orientations: usize,
}

impl Default for GaborConfig {
    fn default() -> Self {
        let p = GaborParams::default();
        Self {
            scales: p.scales,
            epsilon: p.epsilon,
            k0: p.k0,
            n_orientations: p.n_orientations,
        }
    }
}

impl From<&GaborConfig> for GaborParams {
    fn from(c: &GaborConfig) -> Self {
        Self {
            scales: c.scales.clone(),
            epsilon: c.epsilon,
            k0: c.k0,
            n_orientations: c.n_orientations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScirdConfig {
    #[serde(rename = "fb_parameters.sigma_1")]
    pub sigma1_range: (f64, f64),
    #[serde(rename = "fb_parameters.sigma_1_step")]
    pub sigma1_step: f64,
    #[serde(rename = "fb_parameters.sigma_2")]
    pub sigma2_range: (f64, f64),
    #[serde(rename = "fb_parameters.sigma_2_step")]
    pub sigma2_step: f64,
    #[serde(rename = "fb_parameters.k")]
    pub k_range: (f64, f64),
    #[serde(rename = "fb_parameters.k_step")]
    pub k_step: f64,
    #[serde(rename = "fb_parameters.angle_step")]
    pub angle_step: f64,
    #[serde(rename = "fb_parameters.filter_size")]
    pub filter_size: usize,
    pub alpha: f64,
}

impl Default for ScirdConfig {
    fn default() -> Self {
        let p = ScirdParams::default();
        Self {
            sigma1_range: p.sigma1_range,
            sigma1_step: p.sigma1_step,
            sigma2_range: p.sigma2_range,
            sigma2_step: p.sigma2_step,
            k_range: p.k_range,
            k_step: p.k_step,
            angle_step: p.angle_step,
            filter_size: p.filter_size,
            alpha: p.alpha,
        }
    }
}

impl From<&ScirdConfig> for ScirdParams {
    fn from(c: &ScirdConfig) -> Self {
        Self {
            sigma1_range: c.sigma1_range,
            sigma1_step: c.sigma1_step,
            sigma2_range: c.sigma2_range,
            sigma2_step: c.sigma2_step,
            k_range: c.k_range,
            k_step: c.k_step,
            angle_step: c.angle_step,
            filter_size: c.filter_size,
            alpha: c.alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OofConfig {
    pub range: (f64, f64),
    pub sigma: f64,
    pub upthreshold: f64,
}

impl Default for OofConfig {
    fn default() -> Self {
        let p = OofParams::default();
        Self {
            range: p.radius_range,
            sigma: p.sigma,
            upthreshold: p.upthreshold,
        }
    }
}

impl From<&OofConfig> for OofParams {
    fn from(c: &OofConfig) -> Self {
        Self {
            radius_range: c.range,
            sigma: c.sigma,
            upthreshold: c.upthreshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub window: usize,
    pub ratio: f64,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            window: 25,
            ratio: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct KnnConfig {
    pub k: Option<usize>,
    pub training: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanupConfig {
    pub min_area: usize,
}

impl Default for CleanupConfig {
    fn default() -> Self {
        Self { min_area: 10 }
    }
}

/// Whole-pipeline configuration; every block is optional in the JSON and
/// falls back to its documented default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub enhancement: Enhancement,
    pub binarisation: Binarisation,
    pub frangi: FrangiConfig,
    pub gabor: GaborConfig,
    pub scird_ts: ScirdConfig,
    pub oof: OofConfig,
    pub adaptive: AdaptiveConfig,
    pub knn: KnnConfig,
    pub cleanup: CleanupConfig,
    pub roi: Option<RoiSpec>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            enhancement: Enhancement::Oof,
            binarisation: Binarisation::TwoStep,
            frangi: FrangiConfig::default(),
            gabor: GaborConfig::default(),
            scird_ts: ScirdConfig::default(),
            oof: OofConfig::default(),
            adaptive: AdaptiveConfig::default(),
            knn: KnnConfig::default(),
            cleanup: CleanupConfig::default(),
            roi: None,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config: Self = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        FrangiParams::from(&self.frangi).validate()?;
        GaborParams::from(&self.gabor).validate()?;
        ScirdParams::from(&self.scird_ts).validate()?;
        OofParams::from(&self.oof).validate()?;
        if self.binarisation == Binarisation::Knn && self.knn.training.is_none() {
            return Err(ConfigError::MissingTraining);
        }
        Ok(())
    }

    /// FNV-1a hash of the canonical serialisation: stable across formatting
    /// differences, changed by any semantic field change.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serialises");
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in canonical.bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{hash:016x}")
    }
}
