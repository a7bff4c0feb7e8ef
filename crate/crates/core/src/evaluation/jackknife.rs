use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{confusion, derive_seed, metrics, EvaluationError, Learner, MetricsReport};
use crate::features::{FeatureVector, NormalizerFit};
use crate::label::Label;

/// Attempts per repeat at drawing a train split that holds both classes.
pub const MAX_REDRAWS: usize = 100;

fn train_size(n: usize, train_fraction: f64) -> usize {
    // guard against 0.8 * n landing a hair below an integer
    ((n as f64 * train_fraction) + 1e-9).floor() as usize
}

/// Random split with `floor(train_fraction * n)` training indices. Both
/// index lists are sorted.
pub fn jackknife_split(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>), EvaluationError> {
    if n < 2 {
        return Err(EvaluationError::InsufficientData(n));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(EvaluationError::InvalidConfig(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let k = train_size(n, train_fraction);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut train = order[..k].to_vec();
    let mut test = order[k..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepeatReport {
    pub repeat: usize,
    pub seed: u64,
    /// Splits discarded because the train part held a single class.
    pub redraws: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub converged: bool,
    pub metrics: MetricsReport,
}

/// Arithmetic means over repeats; undefined metrics are left out and the
/// number of repeats that contributed is kept alongside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanMetrics {
    pub accuracy: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub accuracy_count: usize,
    pub sensitivity_count: usize,
    pub specificity_count: usize,
    /// Sample standard deviations; need two defined values.
    pub sd_accuracy: Option<f64>,
    pub sd_sensitivity: Option<f64>,
    pub sd_specificity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub seed: u64,
    pub train_fraction: f64,
    pub repeats: Vec<RepeatReport>,
    pub mean: MeanMetrics,
    pub converged_fraction: f64,
}

fn mean_and_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.len() >= 2).then(|| (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt());
    (Some(mean), sd)
}

impl MeanMetrics {
    pub fn from_reports(reports: &[MetricsReport]) -> Self {
        let collect = |f: fn(&MetricsReport) -> Option<f64>| reports.iter().filter_map(f).collect::<Vec<f64>>();
        let acc = collect(|m| m.accuracy);
        let sens = collect(|m| m.sensitivity);
        let spec = collect(|m| m.specificity);
        let (accuracy, sd_accuracy) = mean_and_sd(&acc);
        let (sensitivity, sd_sensitivity) = mean_and_sd(&sens);
        let (specificity, sd_specificity) = mean_and_sd(&spec);
        Self {
            accuracy,
            sensitivity,
            specificity,
            accuracy_count: acc.len(),
            sensitivity_count: sens.len(),
            specificity_count: spec.len(),
            sd_accuracy,
            sd_sensitivity,
            sd_specificity,
        }
    }
}

/// Repeated random train/test evaluation. Each repeat draws its own split
/// from a seed derived from `seed` and the repeat index, fits the
/// normalizer on the training rows only, trains and scores the test rows.
/// Repeats run in parallel; the report is in repeat order.
pub fn jackknife_evaluate(
    learner: &dyn Learner,
    fitter: &dyn NormalizerFit,
    rows: &[FeatureVector],
    repeats: usize,
    train_fraction: f64,
    seed: u64,
) -> Result<EvaluationReport, EvaluationError> {
    if repeats == 0 {
        return Err(EvaluationError::InvalidConfig("repeats must be >= 1".into()));
    }
    if rows.len() < 2 {
        return Err(EvaluationError::InsufficientData(rows.len()));
    }
    let labels = rows
        .iter()
        .map(|r| r.label.ok_or_else(|| EvaluationError::MissingLabel(r.source_id.clone())))
        .collect::<Result<Vec<Label>, _>>()?;
    let k = train_size(rows.len(), train_fraction);
    if !labels.contains(&Label::Binding) || !labels.contains(&Label::NonBinding) {
        return Err(EvaluationError::EvaluationImpossible("rows hold a single class".into()));
    }
    if k < 2 || k == rows.len() {
        return Err(EvaluationError::EvaluationImpossible(format!(
            "a train split of {k} out of {} rows cannot hold both classes and a test set",
            rows.len()
        )));
    }

    let results: Vec<Result<RepeatReport, EvaluationError>> = (0..repeats)
        .into_par_iter()
        .map(|repeat| {
            let mut redraws = 0;
            let (split_seed, train_idx, test_idx) = loop {
                let s = derive_seed(seed, &[repeat as u64, redraws as u64]);
                let (train, test) = jackknife_split(rows.len(), train_fraction, s)?;
                let first = labels[train[0]];
                if train.iter().any(|&i| labels[i] != first) {
                    break (s, train, test);
                }
                redraws += 1;
                log::warn!("repeat {repeat}: single-class train split, redrawing");
                if redraws >= MAX_REDRAWS {
                    return Err(EvaluationError::EvaluationImpossible(format!(
                        "repeat {repeat}: no two-class train split in {MAX_REDRAWS} draws"
                    )));
                }
            };
            let train: Vec<FeatureVector> = train_idx.iter().map(|&i| rows[i].clone()).collect();
            let normalizer = fitter.fit(&train)?;
            let model = learner.fit(&train, normalizer, split_seed)?;
            let predicted = test_idx
                .iter()
                .map(|&i| model.predict(&rows[i]))
                .collect::<Result<Vec<_>, _>>()?;
            let actual: Vec<Label> = test_idx.iter().map(|&i| labels[i]).collect();
            Ok(RepeatReport {
                repeat,
                seed: split_seed,
                redraws,
                train_size: train_idx.len(),
                test_size: test_idx.len(),
                converged: model.converged(),
                metrics: metrics(confusion(&predicted, &actual)?)?,
            })
        })
        .collect();
    let repeats = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let reports: Vec<MetricsReport> = repeats.iter().map(|r| r.metrics).collect();
    let converged = repeats.iter().filter(|r| r.converged).count();
    Ok(EvaluationReport {
        seed,
        train_fraction,
        mean: MeanMetrics::from_reports(&reports),
        converged_fraction: converged as f64 / repeats.len() as f64,
        repeats,
    })
}
