//! Metrics, repeated random 80/20 evaluation and hyperparameter sweeps.

mod jackknife;
mod learner;
mod metrics;
mod sweep;

pub use jackknife::{jackknife_evaluate, jackknife_split, EvaluationReport, MeanMetrics, RepeatReport, MAX_REDRAWS};
pub use learner::{CcnnLearner, Classifier, Learner, SvmLearner};
pub use metrics::{confusion, metrics, ConfusionCounts, MetricsReport};
pub use sweep::{sweep_ccnn, sweep_svm, SweepReport, SweepRow, SWEEP_HEADER};

use crate::features::FeatureError;

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;
pub const DEFAULT_REPEATS: usize = 10;

#[derive(Debug, thiserror::Error)]
pub enum EvaluationError {
    #[error("dimension mismatch: {predicted} predictions for {actual} labels")]
    Dimension { predicted: usize, actual: usize },
    #[error("no rows to evaluate")]
    EmptyEvaluation,
    #[error("need at least 2 rows, got {0}")]
    InsufficientData(usize),
    #[error("evaluation impossible: {0}")]
    EvaluationImpossible(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("row {0:?} has no label")]
    MissingLabel(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("training failed: {0}")]
    Training(String),
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `seed` xor a stable hash of `parts`.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let hash = parts
        .iter()
        .fold(0x6A09_E667_F3BC_C908u64, |h, &p| splitmix64(h ^ splitmix64(p)));
    seed ^ hash
}
