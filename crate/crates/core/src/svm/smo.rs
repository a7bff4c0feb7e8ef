//! Sequential minimal optimization for the soft-margin classification dual
//!
//! ```text
//! maximize   Σ αᵢ − ½ Σᵢ Σⱼ αᵢ αⱼ yᵢ yⱼ k(xᵢ, xⱼ)
//! subject to 0 ≤ αᵢ ≤ C,  Σ αᵢ yᵢ = 0
//! ```
//!
//! The outer loop follows Platt: sweep all examples, then the non-bound
//! ones, and for each KKT violator pick the partner maximizing |E₁ − E₂|.
//! When a sweep finds nothing to do, the optimality gap between the most
//! violating pair is checked; if it still exceeds the tolerance that pair
//! is stepped directly and sweeping resumes.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{KernelSpec, SvmConfig, SvmError, SvmModel};
use crate::features::{FeatureSchema, FeatureVector, Normalizer};
use crate::label::Label;

/// Beyond this many rows the Gram matrix is cached row by row.
pub const FULL_CACHE_LIMIT: usize = 2000;
const LRU_ROWS: usize = 512;

enum GramCache<'a> {
    Full(Vec<f64>, usize),
    Lru {
        data: &'a [Vec<f64>],
        kernel: KernelSpec,
        rows: HashMap<usize, Vec<f64>>,
        order: VecDeque<usize>,
        diag: Vec<f64>,
    },
}

impl<'a> GramCache<'a> {
    fn new(data: &'a [Vec<f64>], kernel: KernelSpec) -> Self {
        let n = data.len();
        if n <= FULL_CACHE_LIMIT {
            let mut k = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let v = kernel.eval_unchecked(&data[i], &data[j]);
                    k[i * n + j] = v;
                    k[j * n + i] = v;
                }
            }
            GramCache::Full(k, n)
        } else {
            GramCache::Lru {
                data,
                kernel,
                rows: HashMap::new(),
                order: VecDeque::new(),
                diag: data.iter().map(|x| kernel.eval_unchecked(x, x)).collect(),
            }
        }
    }

    fn diag(&self, i: usize) -> f64 {
        match self {
            GramCache::Full(k, n) => k[i * n + i],
            GramCache::Lru { diag, .. } => diag[i],
        }
    }

    fn row(&mut self, i: usize) -> &[f64] {
        match self {
            GramCache::Full(k, n) => &k[i * *n..(i + 1) * *n],
            GramCache::Lru {
                data,
                kernel,
                rows,
                order,
                ..
            } => {
                if !rows.contains_key(&i) {
                    if order.len() >= LRU_ROWS {
                        if let Some(old) = order.pop_front() {
                            rows.remove(&old);
                        }
                    }
                    let r = data.iter().map(|x| kernel.eval_unchecked(&data[i], x)).collect();
                    rows.insert(i, r);
                } else if let Some(pos) = order.iter().position(|&k| k == i) {
                    order.remove(pos);
                }
                order.push_back(i);
                &rows[&i]
            }
        }
    }
}

struct Solver<'a> {
    y: Vec<f64>,
    alpha: Vec<f64>,
    /// Σⱼ αⱼ yⱼ k(xⱼ, xᵢ), without bias
    grad: Vec<f64>,
    bias: f64,
    c: f64,
    tol: f64,
    cache: GramCache<'a>,
    rng: ChaCha8Rng,
}

const STEP_EPS: f64 = 1e-12;
/// Multipliers this close to a box edge (relative to C) sit on it.
const BOUND_EPS: f64 = 1e-10;

impl Solver<'_> {
    fn n(&self) -> usize {
        self.y.len()
    }

    fn error(&self, i: usize) -> f64 {
        self.grad[i] + self.bias - self.y[i]
    }

    fn non_bound(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.c
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (e1, e2) = (self.error(i1), self.error(i2));
        let s = y1 * y2;
        let c = self.c;
        let (lo, hi) = if s < 0.0 {
            ((a2 - a1).max(0.0), (c + a2 - a1).min(c))
        } else {
            ((a1 + a2 - c).max(0.0), (a1 + a2).min(c))
        };
        if lo >= hi {
            return false;
        }
        let k11 = self.cache.diag(i1);
        let k22 = self.cache.diag(i2);
        let k12 = self.cache.row(i1)[i2];
        let eta = k11 + k22 - 2.0 * k12;
        let mut new_a2 = if eta > 0.0 {
            (a2 + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // objective is linear along the constraint line
            let f1 = y1 * (e1 - self.bias) - a1 * k11 - s * a2 * k12;
            let f2 = y2 * (e2 - self.bias) - s * a1 * k12 - a2 * k22;
            let objective_at = |a2_new: f64| {
                let a1_new = a1 + s * (a2 - a2_new);
                a1_new * f1 + a2_new * f2 + 0.5 * a1_new * a1_new * k11 + 0.5 * a2_new * a2_new * k22
                    + s * a1_new * a2_new * k12
            };
            let (lo_obj, hi_obj) = (objective_at(lo), objective_at(hi));
            if lo_obj < hi_obj - STEP_EPS {
                lo
            } else if lo_obj > hi_obj + STEP_EPS {
                hi
            } else {
                a2
            }
        };
        if (new_a2 - a2).abs() < STEP_EPS * (new_a2 + a2 + STEP_EPS) {
            return false;
        }
        let mut new_a1 = a1 + s * (a2 - new_a2);
        // snap round-off at the box edges
        if new_a1 < 0.0 {
            new_a2 += s * new_a1;
            new_a1 = 0.0;
        } else if new_a1 > c {
            new_a2 += s * (new_a1 - c);
            new_a1 = c;
        }
        new_a2 = new_a2.clamp(0.0, c);
        let snap = |a: f64| if a < BOUND_EPS * c { 0.0 } else if a > c * (1.0 - BOUND_EPS) { c } else { a };
        let (new_a1, new_a2) = (snap(new_a1), snap(new_a2));

        let d1 = y1 * (new_a1 - a1);
        let d2 = y2 * (new_a2 - a2);
        let b1 = self.bias - e1 - d1 * k11 - d2 * k12;
        let b2 = self.bias - e2 - d1 * k12 - d2 * k22;
        self.alpha[i1] = new_a1;
        self.alpha[i2] = new_a2;
        self.bias = if self.non_bound(i1) {
            b1
        } else if self.non_bound(i2) {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let n = self.n();
        let row1: Vec<f64> = self.cache.row(i1).to_vec();
        let row2 = self.cache.row(i2);
        for k in 0..n {
            self.grad[k] += d1 * row1[k] + d2 * row2[k];
        }
        true
    }

    fn examine(&mut self, i2: usize) -> bool {
        let e2 = self.error(i2);
        let r2 = e2 * self.y[i2];
        let a2 = self.alpha[i2];
        if !((r2 < -self.tol && a2 < self.c) || (r2 > self.tol && a2 > 0.0)) {
            return false;
        }
        let n = self.n();
        let non_bound: Vec<usize> = (0..n).filter(|&i| self.non_bound(i)).collect();
        if non_bound.len() > 1 {
            let best = non_bound
                .iter()
                .copied()
                .filter(|&i| i != i2)
                .max_by(|&a, &b| {
                    let da = (self.error(a) - e2).abs();
                    let db = (self.error(b) - e2).abs();
                    da.total_cmp(&db).then(b.cmp(&a))
                });
            if let Some(i1) = best {
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        if !non_bound.is_empty() {
            let start = self.rng.gen_range(0..non_bound.len());
            for k in 0..non_bound.len() {
                let i1 = non_bound[(start + k) % non_bound.len()];
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        let start = self.rng.gen_range(0..n);
        (0..n).any(|k| self.take_step((start + k) % n, i2))
    }

    /// (i_up, b_up, i_low, b_low) with F = grad − y.
    fn violating_pair(&self) -> (usize, f64, usize, f64) {
        let (mut i_up, mut b_up) = (usize::MAX, f64::INFINITY);
        let (mut i_low, mut b_low) = (usize::MAX, f64::NEG_INFINITY);
        for i in 0..self.n() {
            let f = self.grad[i] - self.y[i];
            let pos = self.y[i] > 0.0;
            let in_up = (pos && self.alpha[i] < self.c) || (!pos && self.alpha[i] > 0.0);
            let in_low = (!pos && self.alpha[i] < self.c) || (pos && self.alpha[i] > 0.0);
            if in_up && f < b_up {
                b_up = f;
                i_up = i;
            }
            if in_low && f > b_low {
                b_low = f;
                i_low = i;
            }
        }
        (i_up, b_up, i_low, b_low)
    }

    fn final_bias(&self) -> f64 {
        let nb: Vec<usize> = (0..self.n()).filter(|&i| self.non_bound(i)).collect();
        if !nb.is_empty() {
            let theta = nb.iter().map(|&i| self.grad[i] - self.y[i]).sum::<f64>() / nb.len() as f64;
            return -theta;
        }
        let (_, b_up, _, b_low) = self.violating_pair();
        -0.5 * (b_up + b_low)
    }
}

/// Result of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmFit {
    pub model: SvmModel,
    /// One multiplier per training row.
    pub alphas: Vec<f64>,
    /// All KKT conditions hold within the tolerance.
    pub converged: bool,
    pub passes: usize,
}

fn labeled(rows: &[FeatureVector]) -> Result<Vec<Label>, SvmError> {
    rows.iter()
        .map(|r| r.label.ok_or_else(|| SvmError::MissingLabel(r.source_id.clone())))
        .collect()
}

/// Trains on raw feature values.
pub fn train_svm(rows: &[FeatureVector], config: &SvmConfig) -> Result<SvmFit, SvmError> {
    let dim = rows.first().map(|r| r.values.len()).unwrap_or(0);
    train_svm_normalized(rows, config, Normalizer::identity(dim))
}

/// Trains on rows mapped through `normalizer`, which is stored in the model.
pub fn train_svm_normalized(rows: &[FeatureVector], config: &SvmConfig, normalizer: Normalizer) -> Result<SvmFit, SvmError> {
    config.validate()?;
    let labels = labeled(rows)?;
    if !labels.contains(&Label::Binding) || !labels.contains(&Label::NonBinding) {
        return Err(SvmError::SingleClass);
    }
    let dim = rows[0].values.len();
    if dim == 0 {
        return Err(SvmError::Dimension { expected: 1, found: 0 });
    }
    if let Some(r) = rows.iter().find(|r| r.values.len() != dim) {
        return Err(SvmError::Dimension {
            expected: dim,
            found: r.values.len(),
        });
    }
    if normalizer.dim() != dim {
        return Err(SvmError::Dimension {
            expected: dim,
            found: normalizer.dim(),
        });
    }
    let data: Vec<Vec<f64>> = rows.iter().map(|r| normalizer.apply_values(&r.values)).collect();
    let n = data.len();
    let mut solver = Solver {
        y: labels.iter().map(|l| l.sign()).collect(),
        alpha: vec![0.0; n],
        grad: vec![0.0; n],
        bias: 0.0,
        c: config.c,
        tol: config.kkt_tolerance,
        cache: GramCache::new(&data, config.kernel),
        rng: ChaCha8Rng::seed_from_u64(config.seed),
    };

    let mut passes = 0;
    let mut examine_all = true;
    let mut converged = false;
    while passes < config.max_passes {
        let changed = if examine_all {
            (0..n).filter(|&i| solver.examine(i)).count()
        } else {
            let mut count = 0;
            for i in 0..n {
                if solver.non_bound(i) && solver.examine(i) {
                    count += 1;
                }
            }
            count
        };
        passes += 1;
        if examine_all {
            examine_all = false;
        } else if changed == 0 {
            examine_all = true;
        }
        if changed > 0 || examine_all {
            continue;
        }
        // nothing moved in a full sweep: certify or push the worst pair
        let (i_up, b_up, i_low, b_low) = solver.violating_pair();
        if i_up == usize::MAX || i_low == usize::MAX || b_low - b_up <= config.kkt_tolerance {
            converged = true;
            break;
        }
        solver.bias = -0.5 * (b_up + b_low);
        if !solver.take_step(i_low, i_up) {
            break;
        }
        examine_all = true;
    }
    if !converged {
        let (i_up, b_up, i_low, b_low) = solver.violating_pair();
        converged = i_up == usize::MAX || i_low == usize::MAX || b_low - b_up <= config.kkt_tolerance;
    }

    let bias = solver.final_bias();
    let mut support_vectors = Vec::new();
    let mut dual_coefficients = Vec::new();
    for i in 0..n {
        if solver.alpha[i] > 0.0 {
            support_vectors.push(data[i].clone());
            dual_coefficients.push(solver.alpha[i] * solver.y[i]);
        }
    }
    let schema = if dim == crate::features::FEATURE_COUNT {
        FeatureSchema::standard()
    } else {
        FeatureSchema {
            names: (0..dim).map(|i| format!("feature_{i}")).collect(),
        }
    };
    let model = SvmModel {
        kernel: config.kernel,
        c: config.c,
        support_vectors,
        dual_coefficients,
        bias,
        normalizer,
        schema,
    };
    Ok(SvmFit {
        model,
        alphas: solver.alpha,
        converged,
        passes,
    })
}
