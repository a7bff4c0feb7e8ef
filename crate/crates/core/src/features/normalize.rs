use serde::{Deserialize, Serialize};

use super::{FeatureError, FeatureVector};

/// Per-feature affine map `(x - mean) / std`; features with zero spread
/// map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalizer {
    /// Mean 0 and unit spread: leaves values unchanged.
    pub fn identity(dim: usize) -> Self {
        Self {
            mean: vec![0.0; dim],
            std: vec![1.0; dim],
        }
    }

    /// Population statistics of `rows`.
    pub fn fit(rows: &[FeatureVector]) -> Result<Self, FeatureError> {
        if rows.len() < 2 {
            return Err(FeatureError::InsufficientData(rows.len()));
        }
        let dim = rows[0].values.len();
        if let Some(r) = rows.iter().find(|r| r.values.len() != dim) {
            return Err(FeatureError::Schema(format!(
                "row {} has {} values, expected {dim}",
                r.source_id,
                r.values.len()
            )));
        }
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(&r.values) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(&r.values).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
        Ok(Self { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply_values(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { 0.0 })
            .collect()
    }

    pub fn apply(&self, row: &FeatureVector) -> FeatureVector {
        FeatureVector {
            values: self.apply_values(&row.values),
            label: row.label,
            source_id: row.source_id.clone(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.mean.len() == self.std.len()
            && self.mean.iter().all(|m| m.is_finite())
            && self.std.iter().all(|s| s.is_finite() && *s >= 0.0)
    }
}

/// How a normalizer is derived from training rows.
pub trait NormalizerFit: Sync {
    fn fit(&self, rows: &[FeatureVector]) -> Result<Normalizer, FeatureError>;
}

/// Z-score statistics of the training rows.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZScoreFit;

impl NormalizerFit for ZScoreFit {
    fn fit(&self, rows: &[FeatureVector]) -> Result<Normalizer, FeatureError> {
        Normalizer::fit(rows)
    }
}

/// Raw features.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityFit;

impl NormalizerFit for IdentityFit {
    fn fit(&self, rows: &[FeatureVector]) -> Result<Normalizer, FeatureError> {
        let dim = rows.first().map(|r| r.values.len()).unwrap_or(0);
        Ok(Normalizer::identity(dim))
    }
}
