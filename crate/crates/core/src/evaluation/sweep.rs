use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{derive_seed, jackknife_evaluate, CcnnLearner, EvaluationError, Learner, MeanMetrics, SvmLearner, DEFAULT_TRAIN_FRACTION};
use crate::ccnn::{CcnnConfig, Topology};
use crate::features::{FeatureVector, NormalizerFit};
use crate::svm::{KernelSpec, SvmConfig};

pub const SWEEP_HEADER: &str =
    "param_1,param_2,mean_accuracy,mean_sensitivity,mean_specificity,sd_accuracy,repeats,converged_fraction";

/// One grid cell. A cell whose evaluation failed keeps the error and has
/// no metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param_1: String,
    pub param_2: String,
    pub mean: Option<MeanMetrics>,
    pub repeats: usize,
    pub converged_fraction: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn mean_accuracy(&self) -> Option<f64> {
        self.mean.as_ref().and_then(|m| m.accuracy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub param_1_name: String,
    pub param_2_name: String,
    /// Grid order.
    pub rows: Vec<SweepRow>,
    /// Highest mean accuracy; the earliest cell wins ties.
    pub best: Option<usize>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SweepReport {
    fn from_rows(param_1_name: &str, param_2_name: &str, rows: Vec<SweepRow>) -> Self {
        let mut best: Option<usize> = None;
        for (i, row) in rows.iter().enumerate() {
            if let Some(acc) = row.mean_accuracy() {
                if best.map_or(true, |b| acc > rows[b].mean_accuracy().unwrap_or(f64::NEG_INFINITY)) {
                    best = Some(i);
                }
            }
        }
        Self {
            param_1_name: param_1_name.into(),
            param_2_name: param_2_name.into(),
            rows,
            best,
        }
    }

    pub fn best_row(&self) -> Option<&SweepRow> {
        self.best.map(|i| &self.rows[i])
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{SWEEP_HEADER}\n");
        for r in &self.rows {
            let m = r.mean.as_ref();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.param_1,
                r.param_2,
                opt(m.and_then(|m| m.accuracy)),
                opt(m.and_then(|m| m.sensitivity)),
                opt(m.and_then(|m| m.specificity)),
                opt(m.and_then(|m| m.sd_accuracy)),
                r.repeats,
                opt(r.converged_fraction)
            );
        }
        out
    }
}

struct Cell {
    param_1: String,
    param_2: String,
    seed: u64,
    learner: Box<dyn Learner + Send>,
}

fn run_cells(cells: Vec<Cell>, rows: &[FeatureVector], fitter: &dyn NormalizerFit, repeats: usize) -> Vec<SweepRow> {
    cells
        .into_par_iter()
        .map(|cell| match jackknife_evaluate(cell.learner.as_ref(), fitter, rows, repeats, DEFAULT_TRAIN_FRACTION, cell.seed) {
            Ok(report) => SweepRow {
                param_1: cell.param_1,
                param_2: cell.param_2,
                repeats: report.repeats.len(),
                converged_fraction: Some(report.converged_fraction),
                mean: Some(report.mean),
                error: None,
            },
            Err(e) => {
                log::warn!("cell ({}, {}) failed: {e}", cell.param_1, cell.param_2);
                SweepRow {
                    param_1: cell.param_1,
                    param_2: cell.param_2,
                    mean: None,
                    repeats: 0,
                    converged_fraction: None,
                    error: Some(e.to_string()),
                }
            }
        })
        .collect()
}

/// ANOVA-kernel grid over (γ, d), γ-major.
pub fn sweep_svm(
    rows: &[FeatureVector],
    gammas: &[f64],
    degrees: &[u32],
    base: &SvmConfig,
    fitter: &dyn NormalizerFit,
    repeats: usize,
    seed: u64,
) -> Result<SweepReport, EvaluationError> {
    if gammas.is_empty() || degrees.is_empty() {
        return Err(EvaluationError::InvalidConfig("sweep ranges must be non-empty".into()));
    }
    let mut cells = Vec::new();
    for &gamma in gammas {
        for &degree in degrees {
            let config = SvmConfig {
                kernel: KernelSpec::Anova { gamma, degree },
                ..base.clone()
            };
            cells.push(Cell {
                param_1: gamma.to_string(),
                param_2: degree.to_string(),
                seed: derive_seed(seed, &[gamma.to_bits(), degree as u64]),
                learner: Box::new(SvmLearner { config }),
            });
        }
    }
    Ok(SweepReport::from_rows("gamma", "degree", run_cells(cells, rows, fitter, repeats)))
}

/// Grid over (hidden-unit count, topology), count-major. Each cell installs
/// exactly its count of hidden units.
pub fn sweep_ccnn(
    rows: &[FeatureVector],
    hidden: &[usize],
    topologies: &[Topology],
    base: &CcnnConfig,
    fitter: &dyn NormalizerFit,
    repeats: usize,
    seed: u64,
) -> Result<SweepReport, EvaluationError> {
    if hidden.is_empty() || topologies.is_empty() {
        return Err(EvaluationError::InvalidConfig("sweep ranges must be non-empty".into()));
    }
    let mut cells = Vec::new();
    for &h in hidden {
        for &topology in topologies {
            let config = CcnnConfig {
                max_hidden_units: h,
                topology,
                fixed_budget: true,
                ..base.clone()
            };
            let topology_code = match topology {
                Topology::Flat => 0,
                Topology::Cascade => 1,
            };
            cells.push(Cell {
                param_1: h.to_string(),
                param_2: topology.as_str().to_string(),
                seed: derive_seed(seed, &[h as u64, topology_code]),
                learner: Box::new(CcnnLearner { config }),
            });
        }
    }
    Ok(SweepReport::from_rows("hidden_units", "topology", run_cells(cells, rows, fitter, repeats)))
}
