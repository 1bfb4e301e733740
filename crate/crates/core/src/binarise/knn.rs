//! Lazy k-nearest-neighbour binarisation.

use std::io::{BufRead, Write};
use std::path::Path;

use thiserror::Error;

use crate::imgio::{BinaryMask, GrayImage};

use super::features::{pixel_features, FeatureVector, FEATURE_COUNT};
use super::BinariseError;

#[derive(Debug, Error)]
pub enum KnnError {
    #[error("training set must contain both classes")]
    OneClass,
    #[error("training set is empty")]
    Empty,
    #[error("k must be odd and at most the training size, got {0}")]
    BadK(usize),
    #[error("training csv malformed at line {0}")]
    BadCsv(usize),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Features(#[from] BinariseError),
}

/// Labelled feature vectors; immutable after construction, with both
/// classes guaranteed present.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    samples: Vec<(FeatureVector, bool)>,
}

impl TrainingSet {
    pub fn new(samples: Vec<(FeatureVector, bool)>) -> Result<Self, KnnError> {
        if samples.is_empty() {
            return Err(KnnError::Empty);
        }
        let vessels = samples.iter().filter(|(_, label)| *label).count();
        if vessels == 0 || vessels == samples.len() {
            return Err(KnnError::OneClass);
        }
        Ok(Self { samples })
    }

    /// Builds a set by sampling every pixel of an image against its mask.
    pub fn from_labelled_image(img: &GrayImage, mask: &BinaryMask) -> Result<Self, KnnError> {
        let field = pixel_features(img)?;
        let samples = field
            .features
            .iter()
            .zip(mask.data())
            .map(|(f, &label)| (*f, label))
            .collect();
        Self::new(samples)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[(FeatureVector, bool)] {
        &self.samples
    }

    /// Per-feature mean and standard deviation over the set.
    fn standardization(&self) -> ([f64; FEATURE_COUNT], [f64; FEATURE_COUNT]) {
        let n = self.samples.len() as f64;
        let mut mean = [0.0; FEATURE_COUNT];
        for (f, _) in &self.samples {
            for (m, v) in mean.iter_mut().zip(f) {
                *m += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= n;
        }
        let mut std = [0.0; FEATURE_COUNT];
        for (f, _) in &self.samples {
            for i in 0..FEATURE_COUNT {
                let d = f[i] - mean[i];
                std[i] += d * d;
            }
        }
        for s in std.iter_mut() {
            *s = (*s / n).sqrt();
        }
        (mean, std)
    }

    /// CSV rows `f1,...,f7,label` with label `vessel` or `background`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), KnnError> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(
            out,
            "intensity,range,mean,std,entropy,lambda1,lambda2,label"
        )?;
        for (f, label) in &self.samples {
            for v in f {
                write!(out, "{v},")?;
            }
            writeln!(out, "{}", if *label { "vessel" } else { "background" })?;
        }
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self, KnnError> {
        let reader = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut samples = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if lineno == 0 || line.trim().is_empty() {
                continue; // header
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != FEATURE_COUNT + 1 {
                return Err(KnnError::BadCsv(lineno + 1));
            }
            let mut f = [0.0; FEATURE_COUNT];
            for (slot, text) in f.iter_mut().zip(&fields[..FEATURE_COUNT]) {
                *slot = text.parse().map_err(|_| KnnError::BadCsv(lineno + 1))?;
            }
            let label = match fields[FEATURE_COUNT] {
                "vessel" | "1" => true,
                "background" | "0" => false,
                _ => return Err(KnnError::BadCsv(lineno + 1)),
            };
            samples.push((f, label));
        }
        Self::new(samples)
    }
}

/// Classifies every pixel by majority vote among its `k` nearest training
/// vectors (Euclidean distance in the training-standardized feature space).
/// `k` must be odd, so with two classes ties cannot occur. Distance ties
/// resolve by training order, keeping the result deterministic.
pub fn knn_binarise(
    train: &TrainingSet,
    img: &GrayImage,
    k: usize,
) -> Result<BinaryMask, KnnError> {
    if k == 0 || k.is_multiple_of(2) || k > train.len() {
        return Err(KnnError::BadK(k));
    }
    let (mean, std) = train.standardization();
    let standardize = |f: &FeatureVector| -> FeatureVector {
        let mut out = [0.0; FEATURE_COUNT];
        for i in 0..FEATURE_COUNT {
            // a zero-variance feature carries no information; its axis
            // collapses rather than dividing by zero
            out[i] = if std[i] > 0.0 {
                (f[i] - mean[i]) / std[i]
            } else {
                0.0
            };
        }
        out
    };

    let train_std: Vec<(FeatureVector, bool)> = train
        .samples
        .iter()
        .map(|(f, label)| (standardize(f), *label))
        .collect();

    let field = pixel_features(img)?;
    let data = field
        .features
        .iter()
        .map(|f| classify(&train_std, &standardize(f), k))
        .collect();
    Ok(BinaryMask::new(img.width(), img.height(), data).expect("knn mask"))
}

fn classify(train: &[(FeatureVector, bool)], query: &FeatureVector, k: usize) -> bool {
    // partial selection of the k smallest squared distances
    let mut best: Vec<(f64, bool)> = Vec::with_capacity(k + 1);
    for (f, label) in train {
        let mut d = 0.0;
        for i in 0..FEATURE_COUNT {
            let diff = f[i] - query[i];
            d += diff * diff;
        }
        let pos = best.partition_point(|&(bd, _)| bd <= d);
        if pos < k {
            best.insert(pos, (d, *label));
            best.truncate(k);
        }
    }
    let votes = best.iter().filter(|(_, label)| *label).count();
    votes * 2 > k
}
