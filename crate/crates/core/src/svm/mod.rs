//! Soft-margin kernel SVM trained by sequential minimal optimization.

mod kernel;
mod smo;

pub use kernel::KernelSpec;
pub use smo::{train_svm, train_svm_normalized, SvmFit, FULL_CACHE_LIMIT};

use serde::{Deserialize, Serialize};

use crate::features::{FeatureSchema, FeatureVector, Normalizer};
use crate::label::Label;

pub const MODEL_FORMAT: &str = "dbp-svm-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SvmError {
    #[error("training data contains a single class")]
    SingleClass,
    #[error("row {0:?} has no label")]
    MissingLabel(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid model file: {0}")]
    ModelFile(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub kernel: KernelSpec,
    /// Capacity constant bounding each multiplier.
    pub c: f64,
    pub kkt_tolerance: f64,
    /// Cap on sweeps over the training rows.
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            kernel: KernelSpec::default(),
            c: 1.0,
            kkt_tolerance: 1e-3,
            max_passes: 10_000,
            seed: 0,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<(), SvmError> {
        self.kernel.validate()?;
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(SvmError::InvalidConfig(format!("C must be positive, got {}", self.c)));
        }
        if !(self.kkt_tolerance > 0.0) {
            return Err(SvmError::InvalidConfig("kkt_tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// A trained classifier. Support vectors are stored already normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: KernelSpec,
    pub c: f64,
    /// αᵢ yᵢ for each support vector
    pub dual_coefficients: Vec<f64>,
    pub bias: f64,
    pub support_vectors: Vec<Vec<f64>>,
    pub normalizer: Normalizer,
    pub schema: FeatureSchema,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    c: f64,
    bias: f64,
    kernel: KernelSpec,
    schema: FeatureSchema,
    normalizer: Normalizer,
    support_vectors: Vec<SupportVector>,
}

#[derive(Serialize, Deserialize)]
struct SupportVector {
    coefficient: f64,
    values: Vec<f64>,
}

impl SvmModel {
    /// Σ αᵢ yᵢ k(svᵢ, x) + b on an already-normalized vector.
    pub fn decision_normalized(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coefficients)
            .map(|(sv, coef)| coef * self.kernel.eval_unchecked(sv, x))
            .sum::<f64>()
            + self.bias
    }

    pub fn decision(&self, values: &[f64]) -> Result<f64, SvmError> {
        if values.len() != self.schema.len() {
            return Err(SvmError::Schema(format!(
                "expected {} features, found {}",
                self.schema.len(),
                values.len()
            )));
        }
        Ok(self.decision_normalized(&self.normalizer.apply_values(values)))
    }

    /// Checks the structural and dual-feasibility invariants.
    pub fn validate(&self) -> Result<(), SvmError> {
        let bad = |m: String| Err(SvmError::ModelFile(m));
        self.kernel.validate()?;
        let dim = self.schema.len();
        if self.normalizer.dim() != dim || !self.normalizer.is_valid() {
            return bad("normalizer does not match the schema".into());
        }
        if self.support_vectors.len() != self.dual_coefficients.len() {
            return bad("support vector and coefficient counts differ".into());
        }
        if self.support_vectors.iter().any(|sv| sv.len() != dim || sv.iter().any(|v| !v.is_finite())) {
            return bad("support vector with wrong length or non-finite value".into());
        }
        let slack = 1e-9 * self.c.max(1.0);
        if let Some(a) = self
            .dual_coefficients
            .iter()
            .find(|a| !(a.abs() > 0.0 && a.abs() <= self.c + slack))
        {
            return bad(format!("coefficient {a} outside (0, C]"));
        }
        let balance: f64 = self.dual_coefficients.iter().sum();
        if balance.abs() > 1e-6 {
            return bad(format!("Σ αᵢyᵢ = {balance}, expected 0"));
        }
        if !self.bias.is_finite() {
            return bad("non-finite bias".into());
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            c: self.c,
            bias: self.bias,
            kernel: self.kernel,
            schema: self.schema.clone(),
            normalizer: self.normalizer.clone(),
            support_vectors: self
                .support_vectors
                .iter()
                .zip(&self.dual_coefficients)
                .map(|(v, c)| SupportVector {
                    coefficient: *c,
                    values: v.clone(),
                })
                .collect(),
        };
        toml::to_string(&file).expect("model serializes")
    }

    pub fn from_text(text: &str) -> Result<Self, SvmError> {
        let file: ModelFile = toml::from_str(text).map_err(|e| SvmError::ModelFile(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(SvmError::ModelFile(format!("format is {:?}, expected {MODEL_FORMAT:?}", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(SvmError::ModelFile(format!("unsupported version {}", file.version)));
        }
        let (dual_coefficients, support_vectors) = file
            .support_vectors
            .into_iter()
            .map(|sv| (sv.coefficient, sv.values))
            .unzip();
        let model = SvmModel {
            kernel: file.kernel,
            c: file.c,
            dual_coefficients,
            bias: file.bias,
            support_vectors,
            normalizer: file.normalizer,
            schema: file.schema,
        };
        model.validate()?;
        Ok(model)
    }
}

/// Label and decision value; a decision of exactly 0 counts as binding.
pub fn predict_svm(model: &SvmModel, x: &FeatureVector) -> Result<(Label, f64), SvmError> {
    let d = model.decision(&x.values)?;
    let label = if d >= 0.0 { Label::Binding } else { Label::NonBinding };
    Ok((label, d))
}

/// Dual objective Σαᵢ − ½ΣΣ αᵢαⱼyᵢyⱼk(xᵢ,xⱼ) at the model's multipliers.
/// Rows with αᵢ = 0 contribute nothing, so the support vectors suffice.
pub fn dual_objective(model: &SvmModel) -> f64 {
    let sv = &model.support_vectors;
    let coef = &model.dual_coefficients;
    let linear: f64 = coef.iter().map(|c| c.abs()).sum();
    let mut quad = 0.0;
    for i in 0..sv.len() {
        for j in 0..sv.len() {
            quad += coef[i] * coef[j] * model.kernel.eval_unchecked(&sv[i], &sv[j]);
        }
    }
    linear - 0.5 * quad
}
