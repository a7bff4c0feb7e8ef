use serde::{Deserialize, Serialize};

use super::EvaluationError;
use crate::label::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Accuracy, sensitivity and specificity; a metric whose denominator is
/// zero is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub counts: ConfusionCounts,
    pub accuracy: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

pub fn confusion(predicted: &[Label], actual: &[Label]) -> Result<ConfusionCounts, EvaluationError> {
    if predicted.len() != actual.len() {
        return Err(EvaluationError::Dimension {
            predicted: predicted.len(),
            actual: actual.len(),
        });
    }
    if predicted.is_empty() {
        return Err(EvaluationError::EmptyEvaluation);
    }
    let mut c = ConfusionCounts::default();
    for (p, a) in predicted.iter().zip(actual) {
        match (p, a) {
            (Label::Binding, Label::Binding) => c.tp += 1,
            (Label::NonBinding, Label::NonBinding) => c.tn += 1,
            (Label::Binding, Label::NonBinding) => c.fp += 1,
            (Label::NonBinding, Label::Binding) => c.fn_ += 1,
        }
    }
    Ok(c)
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn metrics(counts: ConfusionCounts) -> Result<MetricsReport, EvaluationError> {
    if counts.total() == 0 {
        return Err(EvaluationError::EmptyEvaluation);
    }
    Ok(MetricsReport {
        counts,
        accuracy: ratio(counts.tp + counts.tn, counts.total()),
        sensitivity: ratio(counts.tp, counts.tp + counts.fn_),
        specificity: ratio(counts.tn, counts.tn + counts.fp),
    })
}
