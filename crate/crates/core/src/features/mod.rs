//! The 42-value feature vector: overall charge, largest patch size, and
//! two 20-residue composition blocks (whole protein and surface only).

mod composition;
mod csvio;
mod normalize;

pub use composition::{overall_composition, surface_composition, SurfaceComposition};
pub use csvio::{read_feature_csv, write_feature_csv};
pub use normalize::{Normalizer, NormalizerFit, ZScoreFit, IdentityFit};

use serde::{Deserialize, Serialize};

use crate::label::Label;
use crate::structure::STANDARD_RESIDUES;

pub const FEATURE_COUNT: usize = 42;
pub const COMPOSITION_LEN: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error("structure has no standard residues")]
    EmptyProtein,
    #[error("surface classification does not match the structure: {0}")]
    KeyMismatch(String),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("at least 2 rows are needed to fit a normalizer, got {0}")]
    InsufficientData(usize),
    #[error("feature CSV line {line}: {message}")]
    Csv { line: usize, message: String },
}

/// Ordered feature names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub names: Vec<String>,
}

impl FeatureSchema {
    pub fn standard() -> Self {
        let mut names = vec!["overall_charge".to_string(), "largest_patch_size".to_string()];
        names.extend(STANDARD_RESIDUES.iter().map(|r| format!("overall_comp_{r}")));
        names.extend(STANDARD_RESIDUES.iter().map(|r| format!("surface_comp_{r}")));
        Self { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// The standard schema, or a description of how `self` differs from it.
    pub fn check_standard(&self) -> Result<(), FeatureError> {
        let standard = Self::standard();
        if *self == standard {
            return Ok(());
        }
        if self.len() != standard.len() {
            return Err(FeatureError::Schema(format!(
                "expected {} features, found {}",
                standard.len(),
                self.len()
            )));
        }
        let (i, name) = self
            .names
            .iter()
            .enumerate()
            .find(|(i, n)| **n != standard.names[*i])
            .expect("schemas differ");
        Err(FeatureError::Schema(format!(
            "feature {i} is {name:?}, expected {:?}",
            standard.names[i]
        )))
    }
}

impl Default for FeatureSchema {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub label: Option<Label>,
    pub source_id: String,
}

/// Borrowed view of a feature vector's blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureParts<'a> {
    pub charge: f64,
    pub patch_size: f64,
    pub overall: &'a [f64],
    pub surface: &'a [f64],
}

impl FeatureVector {
    pub fn parts(&self) -> FeatureParts<'_> {
        FeatureParts {
            charge: self.values[0],
            patch_size: self.values[1],
            overall: &self.values[2..2 + COMPOSITION_LEN],
            surface: &self.values[2 + COMPOSITION_LEN..],
        }
    }
}

/// Concatenates the blocks in schema order.
pub fn assemble_features(
    charge: f64,
    patch_size: usize,
    overall: &[f64],
    surface: &[f64],
    label: Option<Label>,
    source_id: impl Into<String>,
) -> Result<FeatureVector, FeatureError> {
    for (name, block) in [("overall", overall), ("surface", surface)] {
        if block.len() != COMPOSITION_LEN {
            return Err(FeatureError::Schema(format!(
                "{name} composition has {} values, expected {COMPOSITION_LEN}",
                block.len()
            )));
        }
    }
    let mut values = Vec::with_capacity(FEATURE_COUNT);
    values.push(charge);
    values.push(patch_size as f64);
    values.extend_from_slice(overall);
    values.extend_from_slice(surface);
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(FeatureError::Schema(format!("feature {bad} is not finite")));
    }
    Ok(FeatureVector {
        values,
        label,
        source_id: source_id.into(),
    })
}
