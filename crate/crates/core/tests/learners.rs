use dbp_core::ccnn::{train_ccnn, CcnnConfig, CcnnModel, Topology};
use dbp_core::features::FeatureVector;
use dbp_core::svm::{predict_svm, train_svm, KernelSpec, SvmConfig};
use dbp_core::Label;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn row(values: Vec<f64>, label: Label) -> FeatureVector {
    FeatureVector {
        values,
        label: Some(label),
        source_id: String::new(),
    }
}

fn noisy_blobs(seed: u64, n: usize) -> Vec<FeatureVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Binding } else { Label::NonBinding };
            let c = label.sign() * 0.8;
            row(vec![c + rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), c * 0.5 + rng.gen_range(-1.0..1.0)], label)
        })
        .collect()
}

/// Smallest eigenvalue bound via Gershgorin is too loose; check xᵀKx ≥ 0
/// on many random directions instead.
#[test]
fn radial_gram_is_positive_semidefinite() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let n = rng.gen_range(2..15);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let k = KernelSpec::Radial { gamma: rng.gen_range(0.1..3.0) };
        for _ in 0..20 {
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut q = 0.0;
            for i in 0..n {
                for j in 0..n {
                    q += c[i] * c[j] * k.eval(&xs[i], &xs[j]).unwrap();
                }
            }
            assert!(q >= -1e-10, "quadratic form {q}");
        }
    }
}

/// Duplicating every row with C halved leaves the optimal decision
/// function unchanged.
#[test]
fn duplicated_rows_with_half_cost_agree() {
    let rows = noisy_blobs(1, 24);
    let mut doubled = rows.clone();
    doubled.extend(rows.iter().cloned());
    let base = SvmConfig {
        kernel: KernelSpec::Radial { gamma: 0.5 },
        c: 2.0,
        kkt_tolerance: 1e-6,
        ..SvmConfig::default()
    };
    let a = train_svm(&rows, &base).unwrap();
    let b = train_svm(&doubled, &SvmConfig { c: 1.0, ..base.clone() }).unwrap();
    assert!(a.converged && b.converged);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let x = row((0..3).map(|_| rng.gen_range(-2.0..2.0)).collect(), Label::Binding);
        let (_, fa) = predict_svm(&a.model, &x).unwrap();
        let (_, fb) = predict_svm(&b.model, &x).unwrap();
        assert!((fa - fb).abs() < 1e-3, "{fa} vs {fb}");
    }
}

/// Swapping every label negates the decision function.
#[test]
fn label_swap_negates_decision() {
    let rows = noisy_blobs(4, 20);
    let swapped: Vec<FeatureVector> = rows
        .iter()
        .map(|r| {
            let flip = if r.label == Some(Label::Binding) { Label::NonBinding } else { Label::Binding };
            row(r.values.clone(), flip)
        })
        .collect();
    let cfg = SvmConfig {
        kernel: KernelSpec::Anova { gamma: 0.5, degree: 2 },
        kkt_tolerance: 1e-6,
        ..SvmConfig::default()
    };
    let a = train_svm(&rows, &cfg).unwrap();
    let b = train_svm(&swapped, &cfg).unwrap();
    for r in &rows {
        let (_, fa) = predict_svm(&a.model, r).unwrap();
        let (_, fb) = predict_svm(&b.model, r).unwrap();
        assert!((fa + fb).abs() < 1e-3, "{fa} vs {fb}");
    }
}

/// Forward pass written out from the unit definitions.
fn reference_forward(model: &CcnnModel, x: &[f64]) -> f64 {
    let z = model.normalizer.apply_values(x);
    let mut hidden: Vec<f64> = Vec::new();
    for unit in &model.hidden_units {
        let w = &unit.weights;
        let mut s: f64 = z.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + w[z.len()];
        if model.topology == Topology::Cascade {
            s += hidden.iter().zip(&w[z.len() + 1..]).map(|(a, b)| a * b).sum::<f64>();
        }
        hidden.push(s.tanh());
    }
    let w = &model.output_weights;
    let mut s: f64 = z.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + w[z.len()];
    s += hidden.iter().zip(&w[z.len() + 1..]).map(|(a, b)| a * b).sum::<f64>();
    1.0 / (1.0 + (-s).exp())
}

#[test]
fn ccnn_forward_matches_reference() {
    let rows = noisy_blobs(9, 30);
    for topology in [Topology::Flat, Topology::Cascade] {
        let cfg = CcnnConfig {
            max_hidden_units: 4,
            topology,
            fixed_budget: true,
            output_epochs: 200,
            candidate_epochs: 100,
            ..CcnnConfig::default()
        };
        let fit = train_ccnn(&rows, &cfg).unwrap();
        assert_eq!(fit.model.hidden_units.len(), 4);
        for r in &rows {
            let got = fit.model.output(&r.values).unwrap();
            assert!((got - reference_forward(&fit.model, &r.values)).abs() <= 1e-12);
        }
    }
}
