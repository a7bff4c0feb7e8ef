use super::EvaluationError;
use crate::ccnn::{predict_ccnn, train_ccnn_normalized, CcnnConfig, CcnnModel};
use crate::features::{FeatureVector, Normalizer};
use crate::label::Label;
use crate::svm::{predict_svm, train_svm_normalized, SvmConfig, SvmModel};

/// A trained model as seen by the evaluation harness.
pub trait Classifier: Send {
    fn predict(&self, row: &FeatureVector) -> Result<Label, EvaluationError>;

    /// Whether training met its stopping criterion.
    fn converged(&self) -> bool {
        true
    }
}

/// Something that can be trained on rows with a given normalizer and seed.
pub trait Learner: Sync {
    fn fit(&self, train: &[FeatureVector], normalizer: Normalizer, seed: u64) -> Result<Box<dyn Classifier>, EvaluationError>;
}

#[derive(Debug, Clone, Default)]
pub struct SvmLearner {
    pub config: SvmConfig,
}

struct SvmClassifier {
    model: SvmModel,
    converged: bool,
}

impl Classifier for SvmClassifier {
    fn predict(&self, row: &FeatureVector) -> Result<Label, EvaluationError> {
        predict_svm(&self.model, row)
            .map(|(label, _)| label)
            .map_err(|e| EvaluationError::Training(e.to_string()))
    }

    fn converged(&self) -> bool {
        self.converged
    }
}

impl Learner for SvmLearner {
    fn fit(&self, train: &[FeatureVector], normalizer: Normalizer, seed: u64) -> Result<Box<dyn Classifier>, EvaluationError> {
        let config = SvmConfig { seed, ..self.config.clone() };
        let fit = train_svm_normalized(train, &config, normalizer).map_err(|e| EvaluationError::Training(e.to_string()))?;
        Ok(Box::new(SvmClassifier {
            model: fit.model,
            converged: fit.converged,
        }))
    }
}

#[derive(Debug, Clone, Default)]
pub struct CcnnLearner {
    pub config: CcnnConfig,
}

struct CcnnClassifier {
    model: CcnnModel,
    converged: bool,
}

impl Classifier for CcnnClassifier {
    fn predict(&self, row: &FeatureVector) -> Result<Label, EvaluationError> {
        predict_ccnn(&self.model, row)
            .map(|(label, _)| label)
            .map_err(|e| EvaluationError::Training(e.to_string()))
    }

    fn converged(&self) -> bool {
        self.converged
    }
}

impl Learner for CcnnLearner {
    fn fit(&self, train: &[FeatureVector], normalizer: Normalizer, seed: u64) -> Result<Box<dyn Classifier>, EvaluationError> {
        let config = CcnnConfig { seed, ..self.config.clone() };
        let fit = train_ccnn_normalized(train, &config, normalizer).map_err(|e| EvaluationError::Training(e.to_string()))?;
        Ok(Box::new(CcnnClassifier {
            model: fit.model,
            converged: fit.converged,
        }))
    }
}
