use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{sigmoid, weighted_sum, CcnnConfig, CcnnError, CcnnModel, HiddenUnit, Topology};
use crate::features::{FeatureSchema, FeatureVector, Normalizer, FEATURE_COUNT};
use crate::label::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseKind {
    Output,
    Candidate,
}

/// One training phase. `frozen` holds the incoming weights of every unit
/// installed so far, captured at the end of the phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecord {
    pub kind: PhaseKind,
    pub hidden_units: usize,
    pub epochs: usize,
    /// MSE after an output phase, best score after a candidate phase.
    pub value: f64,
    pub frozen: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcnnFit {
    pub model: CcnnModel,
    pub trace: Vec<PhaseRecord>,
    pub training_error: f64,
    /// The error target or the score threshold was reached.
    pub converged: bool,
}

/// Mean squared error of a sigmoid output over rows of `activations` and
/// its gradient with respect to `weights`.
pub fn output_loss_and_gradient(weights: &[f64], activations: &[Vec<f64>], targets: &[f64]) -> (f64, Vec<f64>) {
    let p = activations.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; weights.len()];
    for (z, &t) in activations.iter().zip(targets) {
        let o = sigmoid(weighted_sum(weights, z));
        let err = o - t;
        loss += err * err;
        let scale = 2.0 * err * o * (1.0 - o) / p;
        for (g, v) in grad.iter_mut().zip(z) {
            *g += scale * v;
        }
    }
    (loss / p, grad)
}

/// Candidate score |Σ(V−V̄)(E−Ē)| for a tanh unit with `weights` and its
/// gradient.
pub fn candidate_score_and_gradient(weights: &[f64], inputs: &[Vec<f64>], residuals: &[f64]) -> (f64, Vec<f64>) {
    let p = inputs.len() as f64;
    let v: Vec<f64> = inputs.iter().map(|z| weighted_sum(weights, z).tanh()).collect();
    let v_mean = v.iter().sum::<f64>() / p;
    let e_mean = residuals.iter().sum::<f64>() / p;
    let cov: f64 = v.iter().zip(residuals).map(|(a, e)| (a - v_mean) * (e - e_mean)).sum();
    let sign = if cov >= 0.0 { 1.0 } else { -1.0 };
    let mut grad = vec![0.0; weights.len()];
    for ((z, a), e) in inputs.iter().zip(&v).zip(residuals) {
        let scale = sign * (e - e_mean) * (1.0 - a * a);
        for (g, x) in grad.iter_mut().zip(z) {
            *g += scale * x;
        }
    }
    (cov.abs(), grad)
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize, range: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-range..=range)).collect()
}

struct Trainer<'a> {
    config: &'a CcnnConfig,
    targets: Vec<f64>,
    /// per pattern: inputs, bias, hidden outputs
    activations: Vec<Vec<f64>>,
    input_dim: usize,
}

impl Trainer<'_> {
    fn outputs(&self, w: &[f64]) -> Vec<f64> {
        self.activations.iter().map(|z| sigmoid(weighted_sum(w, z))).collect()
    }

    /// Gradient descent from `start`; returns the best weights seen.
    fn train_output(&self, start: Vec<f64>) -> (Vec<f64>, f64, usize) {
        let mut w = start;
        let (mut loss, mut grad) = output_loss_and_gradient(&w, &self.activations, &self.targets);
        let mut best = (w.clone(), loss);
        let mut stale = 0;
        let mut epochs = 0;
        while epochs < self.config.output_epochs {
            if loss <= self.config.target_error * 1e-3 {
                break;
            }
            for (wi, g) in w.iter_mut().zip(&grad) {
                *wi -= self.config.learning_rate * g;
            }
            (loss, grad) = output_loss_and_gradient(&w, &self.activations, &self.targets);
            epochs += 1;
            if loss < best.1 - 1e-12 {
                best = (w.clone(), loss);
                stale = 0;
            } else {
                stale += 1;
                if stale >= self.config.patience {
                    break;
                }
            }
        }
        (best.0, best.1, epochs)
    }

    fn candidate_inputs(&self) -> Vec<Vec<f64>> {
        match self.config.topology {
            Topology::Cascade => self.activations.clone(),
            Topology::Flat => self.activations.iter().map(|z| z[..=self.input_dim].to_vec()).collect(),
        }
    }

    /// Gradient ascent on the candidate score; returns the best weights.
    fn train_candidate(&self, start: Vec<f64>, inputs: &[Vec<f64>], residuals: &[f64]) -> (Vec<f64>, f64, usize) {
        // the score is a sum over patterns, so scale the step by 1/P
        let step = self.config.learning_rate / inputs.len() as f64;
        let mut w = start;
        let (mut score, mut grad) = candidate_score_and_gradient(&w, inputs, residuals);
        let mut best = (w.clone(), score);
        let mut stale = 0;
        let mut epochs = 0;
        while epochs < self.config.candidate_epochs {
            for (wi, g) in w.iter_mut().zip(&grad) {
                *wi += step * g;
            }
            (score, grad) = candidate_score_and_gradient(&w, inputs, residuals);
            epochs += 1;
            if score > best.1 + 1e-12 {
                best = (w.clone(), score);
                stale = 0;
            } else {
                stale += 1;
                if stale >= self.config.patience {
                    break;
                }
            }
        }
        (best.0, best.1, epochs)
    }

    fn done(&self, w: &[f64], loss: f64) -> bool {
        loss <= self.config.target_error
            || self
                .outputs(w)
                .iter()
                .zip(&self.targets)
                .all(|(o, t)| (o - t).abs() < self.config.score_threshold)
    }
}

fn schema_for(dim: usize) -> FeatureSchema {
    if dim == FEATURE_COUNT {
        FeatureSchema::standard()
    } else {
        FeatureSchema {
            names: (0..dim).map(|i| format!("feature_{i}")).collect(),
        }
    }
}

/// Trains on raw feature values.
pub fn train_ccnn(rows: &[FeatureVector], config: &CcnnConfig) -> Result<CcnnFit, CcnnError> {
    let dim = rows.first().map(|r| r.values.len()).unwrap_or(0);
    train_ccnn_normalized(rows, config, Normalizer::identity(dim))
}

/// Trains on rows mapped through `normalizer`, which is stored in the model.
pub fn train_ccnn_normalized(rows: &[FeatureVector], config: &CcnnConfig, normalizer: Normalizer) -> Result<CcnnFit, CcnnError> {
    config.validate()?;
    let labels = rows
        .iter()
        .map(|r| r.label.ok_or_else(|| CcnnError::MissingLabel(r.source_id.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    if !labels.contains(&Label::Binding) || !labels.contains(&Label::NonBinding) {
        return Err(CcnnError::SingleClass);
    }
    let dim = rows[0].values.len();
    if dim == 0 {
        return Err(CcnnError::Dimension { expected: 1, found: 0 });
    }
    if let Some(r) = rows.iter().find(|r| r.values.len() != dim) {
        return Err(CcnnError::Dimension {
            expected: dim,
            found: r.values.len(),
        });
    }
    if normalizer.dim() != dim {
        return Err(CcnnError::Dimension {
            expected: dim,
            found: normalizer.dim(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trainer = Trainer {
        config,
        targets: labels.iter().map(|l| l.target()).collect(),
        activations: rows
            .iter()
            .map(|r| {
                let mut z = normalizer.apply_values(&r.values);
                z.push(1.0);
                z
            })
            .collect(),
        input_dim: dim,
    };
    let mut hidden: Vec<HiddenUnit> = Vec::new();
    let mut trace = Vec::new();
    let frozen = |hidden: &[HiddenUnit]| hidden.iter().map(|u| u.weights.clone()).collect::<Vec<_>>();

    let start = random_weights(&mut rng, dim + 1, config.weight_init_range);
    let (mut w_out, mut loss, epochs) = trainer.train_output(start);
    trace.push(PhaseRecord {
        kind: PhaseKind::Output,
        hidden_units: 0,
        epochs,
        value: loss,
        frozen: vec![],
    });

    let mut converged = trainer.done(&w_out, loss);
    while hidden.len() < config.max_hidden_units && (config.fixed_budget || !converged) {
        let outputs = trainer.outputs(&w_out);
        let residuals: Vec<f64> = outputs.iter().zip(&trainer.targets).map(|(o, t)| o - t).collect();
        let inputs = trainer.candidate_inputs();
        let fan_in = CcnnModel::unit_fan_in(dim, config.topology, hidden.len());
        let starts: Vec<Vec<f64>> = (0..config.candidate_pool)
            .map(|_| random_weights(&mut rng, fan_in, config.weight_init_range))
            .collect();
        let trained: Vec<(Vec<f64>, f64, usize)> = starts
            .into_par_iter()
            .map(|s| trainer.train_candidate(s, &inputs, &residuals))
            .collect();
        // first best wins ties, so the pick does not depend on scheduling
        let mut best = 0;
        for (i, c) in trained.iter().enumerate() {
            if c.1 > trained[best].1 {
                best = i;
            }
        }
        let (weights, score, epochs) = trained.into_iter().nth(best).expect("pool is non-empty");
        for (z, input) in trainer.activations.iter_mut().zip(&inputs) {
            z.push(weighted_sum(&weights, input).tanh());
        }
        hidden.push(HiddenUnit { weights });
        trace.push(PhaseRecord {
            kind: PhaseKind::Candidate,
            hidden_units: hidden.len(),
            epochs,
            value: score,
            frozen: frozen(&hidden),
        });

        let mut start = w_out.clone();
        start.push(0.0);
        let (w, l, epochs) = trainer.train_output(start);
        w_out = w;
        loss = l;
        trace.push(PhaseRecord {
            kind: PhaseKind::Output,
            hidden_units: hidden.len(),
            epochs,
            value: loss,
            frozen: frozen(&hidden),
        });
        converged = trainer.done(&w_out, loss);
    }

    let model = CcnnModel {
        input_dim: dim,
        topology: config.topology,
        max_hidden_units: config.max_hidden_units,
        hidden_units: hidden,
        output_weights: w_out,
        normalizer,
        schema: schema_for(dim),
    };
    Ok(CcnnFit {
        model,
        trace,
        training_error: loss,
        converged,
    })
}
