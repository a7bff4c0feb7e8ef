//! Cascade-correlation network with a single sigmoid output.
//!
//! Training starts with direct input→output connections. Hidden units are
//! added one at a time: a pool of candidates is trained to maximize the
//! covariance between its output and the residual error, the best one is
//! installed with its incoming weights frozen, and the output weights are
//! retrained.

mod train;

pub use train::{
    candidate_score_and_gradient, output_loss_and_gradient, train_ccnn, train_ccnn_normalized,
    CcnnFit, PhaseKind, PhaseRecord,
};

use serde::{Deserialize, Serialize};

use crate::features::{FeatureSchema, FeatureVector, Normalizer};
use crate::label::Label;

pub const MODEL_FORMAT: &str = "dbp-ccnn-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CcnnError {
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

/// Which earlier units a new hidden unit sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Inputs, bias and every previously installed hidden unit.
    Cascade,
    /// Inputs and bias only: a single hidden layer.
    #[default]
    Flat,
}

impl Topology {
    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Cascade => "cascade",
            Topology::Flat => "flat",
        }
    }
}

impl std::str::FromStr for Topology {
    type Err = CcnnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cascade" => Ok(Topology::Cascade),
            "flat" => Ok(Topology::Flat),
            other => Err(CcnnError::InvalidConfig(format!("unknown topology {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CcnnConfig {
    pub max_hidden_units: usize,
    pub topology: Topology,
    pub candidate_pool: usize,
    pub output_epochs: usize,
    pub candidate_epochs: usize,
    pub learning_rate: f64,
    /// Mean squared error at which growth stops.
    pub target_error: f64,
    /// Growth also stops once every output is within this distance of its
    /// 0/1 target.
    pub score_threshold: f64,
    /// Epochs without improvement before a phase ends.
    pub patience: usize,
    pub seed: u64,
    pub weight_init_range: f64,
    /// Install exactly `max_hidden_units` units, ignoring the error targets.
    pub fixed_budget: bool,
}

impl Default for CcnnConfig {
    fn default() -> Self {
        Self {
            max_hidden_units: 5,
            topology: Topology::Flat,
            candidate_pool: 8,
            output_epochs: 2000,
            candidate_epochs: 400,
            learning_rate: 1.0,
            target_error: 0.01,
            score_threshold: 0.4,
            patience: 100,
            seed: 0,
            weight_init_range: 0.5,
            fixed_budget: false,
        }
    }
}

impl CcnnConfig {
    pub fn validate(&self) -> Result<(), CcnnError> {
        let bad = |m: &str| Err(CcnnError::InvalidConfig(m.to_string()));
        if self.candidate_pool == 0 {
            return bad("candidate_pool must be >= 1");
        }
        if !(self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if !(self.weight_init_range > 0.0) {
            return bad("weight_init_range must be positive");
        }
        if !(self.target_error >= 0.0) {
            return bad("target_error must be non-negative");
        }
        if self.patience == 0 {
            return bad("patience must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenUnit {
    /// inputs, bias, then earlier hidden outputs (cascade only)
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcnnModel {
    pub input_dim: usize,
    pub topology: Topology,
    /// Hidden-unit budget the model was trained with.
    pub max_hidden_units: usize,
    pub hidden_units: Vec<HiddenUnit>,
    /// inputs, bias, then every hidden output
    pub output_weights: Vec<f64>,
    pub normalizer: Normalizer,
    pub schema: FeatureSchema,
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub(crate) fn weighted_sum(weights: &[f64], inputs: &[f64]) -> f64 {
    weights.iter().zip(inputs).map(|(w, v)| w * v).sum()
}

impl CcnnModel {
    /// Incoming weight count of hidden unit `k` (0-based).
    pub fn unit_fan_in(input_dim: usize, topology: Topology, k: usize) -> usize {
        input_dim
            + 1
            + match topology {
                Topology::Cascade => k,
                Topology::Flat => 0,
            }
    }

    /// Network output for an already-normalized input.
    pub fn forward_normalized(&self, x: &[f64]) -> f64 {
        let mut activations = Vec::with_capacity(self.input_dim + 1 + self.hidden_units.len());
        activations.extend_from_slice(x);
        activations.push(1.0);
        for unit in &self.hidden_units {
            let h = weighted_sum(&unit.weights, &activations).tanh();
            activations.push(h);
        }
        sigmoid(weighted_sum(&self.output_weights, &activations))
    }

    pub fn output(&self, values: &[f64]) -> Result<f64, CcnnError> {
        if values.len() != self.input_dim {
            return Err(CcnnError::Schema(format!(
                "expected {} features, found {}",
                self.input_dim,
                values.len()
            )));
        }
        Ok(self.forward_normalized(&self.normalizer.apply_values(values)))
    }

    pub fn validate(&self) -> Result<(), CcnnError> {
        let bad = |m: String| Err(CcnnError::ModelFile(m));
        if self.schema.len() != self.input_dim || self.normalizer.dim() != self.input_dim || !self.normalizer.is_valid() {
            return bad("schema or normalizer does not match input_dim".into());
        }
        for (k, unit) in self.hidden_units.iter().enumerate() {
            let expected = Self::unit_fan_in(self.input_dim, self.topology, k);
            if unit.weights.len() != expected {
                return bad(format!("hidden unit {k} has {} weights, expected {expected}", unit.weights.len()));
            }
            if unit.weights.iter().any(|w| !w.is_finite()) {
                return bad(format!("hidden unit {k} has a non-finite weight"));
            }
        }
        let expected = self.input_dim + 1 + self.hidden_units.len();
        if self.output_weights.len() != expected {
            return bad(format!("output unit has {} weights, expected {expected}", self.output_weights.len()));
        }
        if self.output_weights.iter().any(|w| !w.is_finite()) {
            return bad("output unit has a non-finite weight".into());
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        toml::to_string(&file).expect("model serializes")
    }

    pub fn from_text(text: &str) -> Result<Self, CcnnError> {
        let file: ModelFile = toml::from_str(text).map_err(|e| CcnnError::ModelFile(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(CcnnError::ModelFile(format!("format is {:?}, expected {MODEL_FORMAT:?}", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(CcnnError::ModelFile(format!("unsupported version {}", file.version)));
        }
        file.model.validate()?;
        Ok(file.model)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    model: CcnnModel,
}

/// Label and network output; an output of exactly 0.5 counts as binding.
pub fn predict_ccnn(model: &CcnnModel, x: &FeatureVector) -> Result<(Label, f64), CcnnError> {
    let o = model.output(&x.values)?;
    let label = if o >= 0.5 { Label::Binding } else { Label::NonBinding };
    Ok((label, o))
}

/// |Σₚ (Vₚ − V̄)(Eₚ − Ē)| between candidate outputs and residual errors.
pub fn candidate_correlation(candidate_outputs: &[f64], residuals: &[f64]) -> Result<f64, CcnnError> {
    if candidate_outputs.len() != residuals.len() || candidate_outputs.len() < 2 {
        return Err(CcnnError::Dimension {
            expected: candidate_outputs.len().max(2),
            found: residuals.len(),
        });
    }
    let n = residuals.len() as f64;
    let v_mean = candidate_outputs.iter().sum::<f64>() / n;
    let e_mean = residuals.iter().sum::<f64>() / n;
    Ok(candidate_outputs
        .iter()
        .zip(residuals)
        .map(|(v, e)| (v - v_mean) * (e - e_mean))
        .sum::<f64>()
        .abs())
}
