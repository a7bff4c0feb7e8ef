//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use dbp_core::ccnn::{
    candidate_score_and_gradient, output_loss_and_gradient, predict_ccnn, train_ccnn, CcnnConfig, PhaseKind, Topology,
};
use dbp_core::electrostatics::{
    potential_at_points, solve_potential, ChargedAtom, ChargedAtomSet, SolverConfig,
};
use dbp_core::evaluation::{confusion, jackknife_split, metrics, ConfusionCounts};
use dbp_core::features::{FeatureVector, COMPOSITION_LEN};
use dbp_core::pipeline::{extract_entry, ExtractionConfig, Tables};
use dbp_core::structure::{load_manifest, FetchOptions, ResidueKey, UreqTransport};
use dbp_core::surface::compute_sasa;
use dbp_core::svm::{dual_objective, predict_svm, train_svm, KernelSpec, SvmConfig};
use dbp_core::{Label, Vec3};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

fn row(values: Vec<f64>, label: Label) -> FeatureVector {
    FeatureVector {
        values,
        label: Some(label),
        source_id: "r".into(),
    }
}

// ---- SVM ---------------------------------------------------------------

fn gram(kernel: &KernelSpec, xs: &[Vec<f64>]) -> DMatrix<f64> {
    let n = xs.len();
    DMatrix::from_fn(n, n, |i, j| kernel.eval(&xs[i], &xs[j]).unwrap())
}

/// Euclidean projection onto {0 ≤ a ≤ C, yᵀa = 0} by bisection on the
/// multiplier of the equality constraint.
fn project(z: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |nu: f64| -> Vec<f64> { z.iter().zip(y).map(|(zi, yi)| (zi - nu * yi).clamp(0.0, c)).collect() };
    let balance = |a: &[f64]| -> f64 { a.iter().zip(y).map(|(ai, yi)| ai * yi).sum() };
    let (mut lo, mut hi) = (-1e6, 1e6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        // balance is non-increasing in nu
        if balance(&at(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

fn dual_value(alpha: &[f64], q: &DMatrix<f64>) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * q[(i, j)];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Accelerated projected gradient ascent on the classification dual.
fn qp_oracle(k: &DMatrix<f64>, y: &[f64], c: f64) -> f64 {
    let n = y.len();
    let q = DMatrix::from_fn(n, n, |i, j| y[i] * y[j] * k[(i, j)]);
    let lmax = SymmetricEigen::new(q.clone()).eigenvalues.max().max(1e-12);
    let step = 1.0 / lmax;
    let grad = |a: &[f64]| -> Vec<f64> { (0..n).map(|i| 1.0 - (0..n).map(|j| q[(i, j)] * a[j]).sum::<f64>()).collect() };
    let mut a = vec![0.0; n];
    let mut v = a.clone();
    let mut t = 1.0f64;
    let mut best = 0.0f64;
    for _ in 0..20_000 {
        let g = grad(&v);
        let z: Vec<f64> = v.iter().zip(&g).map(|(vi, gi)| vi + step * gi).collect();
        let next = project(&z, y, c);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        v = next.iter().zip(&a).map(|(n1, a0)| n1 + (t - 1.0) / t_next * (n1 - a0)).collect();
        a = next;
        t = t_next;
        best = best.max(dual_value(&a, &q));
    }
    best
}

fn criterion_qp_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_gap = 0.0f64;
    let mut worst_kkt = 0.0f64;
    let kernels = [
        KernelSpec::Dot,
        KernelSpec::Polynomial { degree: 2 },
        KernelSpec::Radial { gamma: 0.7 },
        KernelSpec::Anova { gamma: 0.7, degree: 2 },
    ];
    for case in 0..50 {
        let n = rng.gen_range(3..=8);
        let dim = rng.gen_range(1..=4);
        let kernel = kernels[case % 4];
        let c = rng.gen_range(0.5..5.0);
        let mut rows: Vec<FeatureVector> = (0..n)
            .map(|i| {
                let label = if i % 2 == 0 { Label::Binding } else { Label::NonBinding };
                row((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect(), label)
            })
            .collect();
        // shuffle labels, keeping both classes
        for i in 2..n {
            if rng.gen_bool(0.5) {
                rows[i].label = Some(if rows[i].label == Some(Label::Binding) { Label::NonBinding } else { Label::Binding });
            }
        }
        let cfg = SvmConfig {
            kernel,
            c,
            kkt_tolerance: 1e-5,
            max_passes: 100_000,
            seed: case as u64,
        };
        let fit = train_svm(&rows, &cfg).map_err(|e| e.to_string())?;
        let xs: Vec<Vec<f64>> = rows.iter().map(|r| r.values.clone()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.label.unwrap().sign()).collect();
        let k = gram(&kernel, &xs);
        let q = DMatrix::from_fn(n, n, |i, j| y[i] * y[j] * k[(i, j)]);
        let smo = dual_value(&fit.alphas, &q);
        let from_model = dual_objective(&fit.model);
        if (smo - from_model).abs() > 1e-9 {
            return Err(format!("case {case}: model objective {from_model} vs alphas {smo}"));
        }
        let oracle = qp_oracle(&k, &y, c);
        worst_gap = worst_gap.max((smo - oracle).abs());
        // independent KKT pass with the model's own bias
        for i in 0..n {
            let f: f64 = (0..n).map(|j| fit.alphas[j] * y[j] * k[(i, j)]).sum::<f64>() + fit.model.bias;
            let m = y[i] * f;
            let a = fit.alphas[i];
            let violation = if a <= 1e-12 {
                (1.0 - m).max(0.0)
            } else if a >= c - 1e-12 {
                (m - 1.0).max(0.0)
            } else {
                (m - 1.0).abs()
            };
            worst_kkt = worst_kkt.max(violation);
        }
    }
    let elapsed = start.elapsed();
    check(
        worst_gap <= 1e-4 && worst_kkt <= 1e-3 && elapsed < Duration::from_secs(60),
        format!("50 datasets: max |SMO - QP| = {worst_gap:.2e}, max KKT violation = {worst_kkt:.2e}, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn criterion_analytic_svm() -> Outcome {
    let rows = vec![row(vec![0.0], Label::NonBinding), row(vec![2.0], Label::Binding)];
    let cfg = SvmConfig {
        kernel: KernelSpec::Dot,
        c: 10.0,
        ..SvmConfig::default()
    };
    let fit = train_svm(&rows, &cfg).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for x in [-3.0, 0.0, 0.5, 1.0, 2.0, 7.25] {
        let (_, f) = predict_svm(&fit.model, &row(vec![x], Label::Binding)).map_err(|e| e.to_string())?;
        worst = worst.max((f - (x - 1.0)).abs());
    }
    let alpha_err = fit.alphas.iter().map(|a| (a - 0.5).abs()).fold(0.0, f64::max);
    let dual_err = (dual_objective(&fit.model) - 0.5).abs();
    check(
        worst <= 1e-6 && alpha_err <= 1e-6 && dual_err <= 1e-6,
        format!("max |f(x) - (x-1)| = {worst:.1e}, max |alpha - 0.5| = {alpha_err:.1e}, |W - 0.5| = {dual_err:.1e}"),
    )
}

fn criterion_anova() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let n = rng.gen_range(1..=42);
        let d = rng.gen_range(1..=6);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let k = KernelSpec::Anova {
            gamma: rng.gen_range(0.01..5.0),
            degree: d,
        };
        if k.eval(&x, &x).unwrap() != (n as f64).powi(d as i32) {
            return Err(format!("k(x,x) != {n}^{d}"));
        }
    }
    let mut min_eig = f64::INFINITY;
    for _ in 0..100 {
        let n = rng.gen_range(2..=20);
        let dim = rng.gen_range(1..=10);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let k = KernelSpec::Anova {
            gamma: rng.gen_range(0.1..3.0),
            degree: rng.gen_range(1..=5),
        };
        let g = gram(&k, &xs);
        // scale-free: compare against the largest entry
        let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        min_eig = min_eig.min(SymmetricEigen::new(g).eigenvalues.min() / scale);
    }
    let v = KernelSpec::Anova { gamma: 1.0, degree: 2 }.eval(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
    let case_err = (v - 4.0 * (-2.0f64).exp()).abs();
    check(
        min_eig >= -1e-8 && case_err <= 1e-12,
        format!("k(x,x) = n^d exact, min scaled eigenvalue over 100 Gram matrices = {min_eig:.2e}, |k - 4e^-2| = {case_err:.1e}"),
    )
}

// ---- Electrostatics ------------------------------------------------------

fn single_charge(q: f64) -> ChargedAtomSet {
    ChargedAtomSet {
        atoms: vec![ChargedAtom {
            position: Vec3::new(0.0, 0.0, 0.0),
            charge: q,
            radius: 1.5,
            residue: ResidueKey::new('A', 1),
            residue_name: "ION".into(),
            atom_name: "Q".into(),
        }],
        missing_charges: 0,
    }
}

/// Potential in kT/e of a unit charge in a uniform solvent at distance r.
fn reference_potential(r: f64, ionic_strength: f64, temperature: f64, dielectric: f64) -> f64 {
    let e = 1.602_176_634e-19;
    let eps0 = 8.854_187_812_8e-12;
    let kb = 1.380_649e-23;
    let na = 6.022_140_76e23;
    let bjerrum = e * e / (4.0 * PI * eps0 * kb * temperature) * 1e10;
    // κ² = 2 N_A e² I·1000 / (ε ε₀ k T), in Å⁻²
    let kappa_sq = 2.0 * na * e * e * ionic_strength * 1000.0 / (dielectric * eps0 * kb * temperature) * 1e-20;
    bjerrum * (-kappa_sq.sqrt() * r).exp() / (dielectric * r)
}

fn criterion_electrostatics() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut probes = Vec::new();
    for r in [8.0, 10.0, 12.0, 14.0, 16.0] {
        probes.push(Vec3::new(r, 0.0, 0.0));
        probes.push(Vec3::new(0.0, -r, 0.0));
        probes.push(Vec3::new(0.0, 0.0, r));
        let s = r / 3f64.sqrt();
        probes.push(Vec3::new(s, s, -s));
    }
    for ionic_strength in [0.0, 0.145] {
        let cfg = SolverConfig {
            ionic_strength,
            ..SolverConfig::default()
        };
        let grid = solve_potential(&single_charge(1.0), &cfg).map_err(|e| e.to_string())?;
        if !grid.converged {
            return Err(format!("solver did not converge at I = {ionic_strength}"));
        }
        let values = potential_at_points(&grid, &probes).map_err(|e| e.to_string())?;
        for (p, v) in probes.iter().zip(&values) {
            let expected = reference_potential(p.norm(), ionic_strength, cfg.temperature, cfg.solvent_dielectric);
            worst = worst.max((v - expected).abs() / expected.abs());
        }
    }
    let cfg = SolverConfig::default();
    let zero = solve_potential(&single_charge(0.0), &cfg).map_err(|e| e.to_string())?;
    let all_zero = zero.values.iter().all(|v| *v == 0.0);
    let plus = solve_potential(&single_charge(1.0), &cfg).map_err(|e| e.to_string())?;
    let minus = solve_potential(&single_charge(-1.0), &cfg).map_err(|e| e.to_string())?;
    let antisymmetric = plus.values.iter().zip(&minus.values).all(|(a, b)| *a == -*b);
    let elapsed = start.elapsed();
    check(
        worst <= 0.05 && all_zero && antisymmetric && elapsed < Duration::from_secs(120),
        format!(
            "max relative error over r in [8,16] = {:.2}%, zero grid exact = {all_zero}, sign flip exact = {antisymmetric}, {:.1}s",
            worst * 100.0,
            elapsed.as_secs_f64()
        ),
    )
}

// ---- Surface ------------------------------------------------------------

fn atom_at(p: Vec3, radius: f64) -> ChargedAtom {
    ChargedAtom {
        position: p,
        charge: 0.0,
        radius,
        residue: ResidueKey::new('A', 1),
        residue_name: "ALA".into(),
        atom_name: "CB".into(),
    }
}

fn monte_carlo_area(atoms: &[ChargedAtom], i: usize, probe: f64, samples: usize, rng: &mut ChaCha8Rng) -> f64 {
    let ri = atoms[i].radius + probe;
    let mut exposed = 0usize;
    for _ in 0..samples {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let s = (1.0 - z * z).sqrt();
        let p = atoms[i].position + Vec3::new(s * phi.cos(), s * phi.sin(), z) * ri;
        let buried = atoms.iter().enumerate().any(|(j, a)| {
            let rj = a.radius + probe;
            j != i && p.distance_sq(a.position) < rj * rj
        });
        if !buried {
            exposed += 1;
        }
    }
    4.0 * PI * ri * ri * exposed as f64 / samples as f64
}

fn criterion_sasa() -> Outcome {
    let probe = 1.4;
    let single = ChargedAtomSet {
        atoms: vec![atom_at(Vec3::ZERO, 1.8)],
        missing_charges: 0,
    };
    let area = compute_sasa(&single, probe, 960).map_err(|e| e.to_string())?.total();
    let exact = 4.0 * PI * (1.8f64 + probe).powi(2);
    let sphere_err = (area - exact).abs() / exact;

    let dimer = ChargedAtomSet {
        atoms: vec![atom_at(Vec3::ZERO, 1.8), atom_at(Vec3::new(3.0, 0.4, 0.0), 1.5)],
        missing_charges: 0,
    };
    let sasa = compute_sasa(&dimer, probe, 960).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut dimer_err = 0.0f64;
    for i in 0..2 {
        let mc = monte_carlo_area(&dimer.atoms, i, probe, 100_000, &mut rng);
        dimer_err = dimer_err.max((sasa.per_atom_area[i] - mc).abs() / mc);
    }

    let mut monotone = true;
    for _ in 0..30 {
        let n = rng.gen_range(2..12);
        let mut set = ChargedAtomSet::default();
        for _ in 0..n {
            let p = Vec3::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            set.atoms.push(atom_at(p, rng.gen_range(1.2..2.0)));
        }
        let before = compute_sasa(&set, probe, 240).map_err(|e| e.to_string())?;
        let mut grown = set.clone();
        grown.atoms.push(atom_at(
            Vec3::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)),
            rng.gen_range(1.2..2.0),
        ));
        let after = compute_sasa(&grown, probe, 240).map_err(|e| e.to_string())?;
        monotone &= before.per_atom_area.iter().zip(&after.per_atom_area).all(|(b, a)| a <= b);
    }
    check(
        sphere_err <= 0.02 && dimer_err <= 0.05 && monotone,
        format!(
            "sphere error {:.3}%, dimer vs 100k-point Monte Carlo {:.2}%, adding atoms never increases area = {monotone}",
            sphere_err * 100.0,
            dimer_err * 100.0
        ),
    )
}

// ---- CCNN ----------------------------------------------------------------

fn central_difference<F: Fn(&[f64]) -> f64>(f: F, w: &[f64]) -> Vec<f64> {
    let h = 1e-5;
    (0..w.len())
        .map(|i| {
            let mut a = w.to_vec();
            let mut b = w.to_vec();
            a[i] += h;
            b[i] -= h;
            (f(&a) - f(&b)) / (2.0 * h)
        })
        .collect()
}

/// Largest component error relative to the gradient's overall magnitude.
fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let scale = numeric.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-8);
    analytic.iter().zip(numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
}

fn criterion_gradients() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst_output = 0.0f64;
    let mut worst_candidate = 0.0f64;
    for _ in 0..20 {
        let p = rng.gen_range(3..12);
        let n = rng.gen_range(2..7);
        let acts: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect()).collect();
        let targets: Vec<f64> = (0..p).map(|_| if rng.gen_bool(0.5) { 1.0 } else { 0.0 }).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, g) = output_loss_and_gradient(&w, &acts, &targets);
        let fd = central_difference(|w| output_loss_and_gradient(w, &acts, &targets).0, &w);
        worst_output = worst_output.max(relative_error(&g, &fd));

        let residuals: Vec<f64> = (0..p).map(|_| rng.gen_range(-0.9..0.9)).collect();
        let (_, g) = candidate_score_and_gradient(&w, &acts, &residuals);
        let fd = central_difference(|w| candidate_score_and_gradient(w, &acts, &residuals).0, &w);
        worst_candidate = worst_candidate.max(relative_error(&g, &fd));
    }
    check(
        worst_output <= 1e-5 && worst_candidate <= 1e-5,
        format!("20 instances: output-loss rel err {worst_output:.1e}, candidate-score rel err {worst_candidate:.1e}"),
    )
}

fn training_accuracy(model: &dbp_core::ccnn::CcnnModel, rows: &[FeatureVector]) -> f64 {
    let hits = rows
        .iter()
        .filter(|r| predict_ccnn(model, r).unwrap().0 == r.label.unwrap())
        .count();
    hits as f64 / rows.len() as f64
}

fn criterion_ccnn() -> Outcome {
    let xor = vec![
        row(vec![0.0, 0.0], Label::NonBinding),
        row(vec![0.0, 1.0], Label::Binding),
        row(vec![1.0, 0.0], Label::Binding),
        row(vec![1.0, 1.0], Label::NonBinding),
    ];
    let mut solved = 0;
    for seed in 0..10 {
        let cfg = CcnnConfig {
            max_hidden_units: 8,
            seed,
            ..CcnnConfig::default()
        };
        let fit = train_ccnn(&xor, &cfg).map_err(|e| e.to_string())?;
        if training_accuracy(&fit.model, &xor) == 1.0 && fit.model.hidden_units.len() <= 8 {
            solved += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let blobs: Vec<FeatureVector> = (0..40)
        .map(|i| {
            let (cx, label) = if i % 2 == 0 { (2.0, Label::Binding) } else { (-2.0, Label::NonBinding) };
            row(vec![cx + rng.gen_range(-0.7..0.7), rng.gen_range(-1.0..1.0)], label)
        })
        .collect();
    let fit = train_ccnn(&blobs, &CcnnConfig { max_hidden_units: 10, ..CcnnConfig::default() }).map_err(|e| e.to_string())?;
    let blob_units = fit.model.hidden_units.len();
    let blob_acc = training_accuracy(&fit.model, &blobs);

    let mut frozen_ok = true;
    for topology in [Topology::Flat, Topology::Cascade] {
        let cfg = CcnnConfig {
            max_hidden_units: 5,
            topology,
            fixed_budget: true,
            seed: 3,
            ..CcnnConfig::default()
        };
        let fit = train_ccnn(&xor, &cfg).map_err(|e| e.to_string())?;
        let last = &fit.trace.last().unwrap().frozen;
        frozen_ok &= last.len() == 5;
        for (k, w) in last.iter().enumerate() {
            frozen_ok &= w.iter().map(|v| v.to_bits()).eq(fit.model.hidden_units[k].weights.iter().map(|v| v.to_bits()));
        }
        for phase in &fit.trace {
            for (k, w) in phase.frozen.iter().enumerate() {
                frozen_ok &= w.iter().map(|v| v.to_bits()).eq(last[k].iter().map(|v| v.to_bits()));
            }
        }
        let errors: Vec<f64> = fit.trace.iter().filter(|p| p.kind == PhaseKind::Output).map(|p| p.value).collect();
        frozen_ok &= errors.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    }
    check(
        solved >= 9 && blob_units == 0 && blob_acc == 1.0 && frozen_ok,
        format!(
            "XOR solved in {solved}/10 seeds, blobs: {blob_units} hidden units at {:.0}% accuracy, frozen weights bit-identical = {frozen_ok}",
            blob_acc * 100.0
        ),
    )
}

// ---- Worked arithmetic --------------------------------------------------

fn criterion_worked_arithmetic() -> Outcome {
    let (train, test) = jackknife_split(359, 0.8, 0).map_err(|e| e.to_string())?;
    let split_ok = (train.len(), test.len()) == (287, 72);
    let m = metrics(ConfusionCounts { tp: 2, tn: 3, fp: 1, fn_: 2 }).map_err(|e| e.to_string())?;
    let hand_ok = m.accuracy == Some(0.625) && m.sensitivity == Some(0.5) && m.specificity == Some(0.75);
    let labels = [Label::Binding, Label::Binding, Label::NonBinding, Label::NonBinding, Label::NonBinding];
    let c = confusion(&labels, &labels).map_err(|e| e.to_string())?;
    let perfect = metrics(c).map_err(|e| e.to_string())?;
    let perfect_ok = perfect.accuracy == Some(1.0) && perfect.sensitivity == Some(1.0) && perfect.specificity == Some(1.0);
    let undefined_ok = metrics(ConfusionCounts { tp: 3, tn: 0, fp: 0, fn_: 1 }).unwrap().specificity.is_none();
    let defaults_ok = SvmConfig::default().kernel == KernelSpec::Anova { gamma: 2.0, degree: 5 }
        && CcnnConfig::default().max_hidden_units == 5;
    check(
        split_ok && hand_ok && perfect_ok && undefined_ok && defaults_ok,
        format!(
            "split(359) = ({}, {}), (2,3,1,2) -> {:?}/{:?}/{:?}, defaults gamma=2 d=5 hidden=5: {defaults_ok}",
            train.len(),
            test.len(),
            m.accuracy.unwrap_or(f64::NAN),
            m.sensitivity.unwrap_or(f64::NAN),
            m.specificity.unwrap_or(f64::NAN)
        ),
    )
}

// ---- End to end ----------------------------------------------------------

fn dbp(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dbp"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("dbp {args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(())
}

fn pipeline_run(dir: &Path) -> Result<Vec<Vec<u8>>, String> {
    let data = data_dir();
    let manifest = data.join("sample/manifest.csv");
    let cache = data.join("sample");
    let synthetic = data.join("synthetic_separable.csv");
    let (m, c, s) = (manifest.to_str().unwrap(), cache.to_str().unwrap(), synthetic.to_str().unwrap());
    dbp(dir, &["--seed", "11", "--offline", "extract", "--manifest", m, "--cache", c, "--out", "features.csv"])?;
    for learner in ["svm", "ccnn"] {
        dbp(dir, &["--seed", "11", "train", "--learner", learner, "--features", "features.csv", "--out", &format!("{learner}.toml")])?;
        dbp(dir, &["--seed", "11", "evaluate", "--learner", learner, "--features", s, "--out", &format!("{learner}.json")])?;
    }
    ["features.csv", "svm.toml", "ccnn.toml", "svm.json", "ccnn.json"]
        .iter()
        .map(|f| std::fs::read(dir.join(f)).map_err(|e| e.to_string()))
        .collect()
}

fn criterion_end_to_end() -> Outcome {
    let start = Instant::now();
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = pipeline_run(a.path())?;
    let second = pipeline_run(b.path())?;
    let identical = first == second;
    let rows = String::from_utf8_lossy(&first[0]).lines().count() - 1;
    let mut accuracies = Vec::new();
    for learner in ["svm", "ccnn"] {
        let json: serde_json::Value =
            serde_json::from_slice(&std::fs::read(a.path().join(format!("{learner}.json"))).unwrap()).unwrap();
        accuracies.push(json["mean"]["accuracy"].as_f64().unwrap_or(f64::NAN));
    }
    let elapsed = start.elapsed();
    check(
        identical && rows >= 6 && accuracies.iter().all(|a| *a == 1.0) && elapsed < Duration::from_secs(300),
        format!(
            "{rows} structures, two runs byte-identical = {identical}, synthetic mean accuracy svm {} ccnn {}, {:.1}s",
            accuracies[0],
            accuracies[1],
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_composition() -> Outcome {
    let data = data_dir();
    let manifest = load_manifest(&std::fs::read_to_string(data.join("sample/manifest.csv")).unwrap()).map_err(|e| e.to_string())?;
    let fetch = FetchOptions {
        offline: true,
        ..FetchOptions::new(data.join("sample"))
    };
    let tables = Tables::bundled();
    let mut checked = 0;
    for entry in &manifest.entries {
        let x = extract_entry(entry, &fetch, &UreqTransport, &tables, &ExtractionConfig::default()).map_err(|e| e.to_string())?;
        let values = &x.features.values;
        let overall: f64 = values[2..2 + COMPOSITION_LEN].iter().sum();
        let surface: f64 = values[2 + COMPOSITION_LEN..].iter().sum();
        if (overall - 100.0).abs() > 1e-9 {
            return Err(format!("{}: overall composition sums to {overall}", entry.source_id()));
        }
        let surface_ok = (surface - 100.0).abs() <= 1e-9 || (x.surface_empty && surface == 0.0);
        if !surface_ok {
            return Err(format!("{}: surface composition sums to {surface}", entry.source_id()));
        }
        checked += 1;
    }
    check(checked >= 6, format!("{checked} sample rows, both blocks sum to 100 within 1e-9"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("qp-oracle-equivalence", criterion_qp_oracle),
        ("analytic-svm", criterion_analytic_svm),
        ("anova-kernel", criterion_anova),
        ("electrostatics-oracle", criterion_electrostatics),
        ("sasa", criterion_sasa),
        ("gradient-checks", criterion_gradients),
        ("ccnn-behavior", criterion_ccnn),
        ("worked-arithmetic", criterion_worked_arithmetic),
        ("end-to-end-determinism", criterion_end_to_end),
        ("composition", criterion_composition),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
