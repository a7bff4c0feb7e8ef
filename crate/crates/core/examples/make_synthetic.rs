//! Regenerates `data/synthetic_separable.csv`: 60 alternating rows whose
//! classes differ in charge, patch size and Lys/Arg vs Asp/Glu content.
//!
//!     cargo run -p dbp-core --example make_synthetic > crates/core/data/synthetic_separable.csv

use dbp_core::features::{assemble_features, write_feature_csv, COMPOSITION_LEN};
use dbp_core::structure::standard_index;
use dbp_core::Label;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn composition(rng: &mut ChaCha8Rng, enriched: &[&str], factor: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..COMPOSITION_LEN).map(|_| 1.0 + rng.gen_range(-0.15..0.15)).collect();
    for name in enriched {
        w[standard_index(name).unwrap()] *= factor;
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|v| 100.0 * v / total).collect()
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let rows: Vec<_> = (0..60)
        .map(|i| {
            let binding = i % 2 == 0;
            let (charge, patch, enriched, label): (f64, usize, [&str; 2], _) = if binding {
                (rng.gen_range(6.0..16.0), rng.gen_range(80..=160), ["LYS", "ARG"], Label::Binding)
            } else {
                (-rng.gen_range(6.0..16.0), rng.gen_range(0..=30), ["ASP", "GLU"], Label::NonBinding)
            };
            let overall = composition(&mut rng, &enriched, 4.0);
            let surface = composition(&mut rng, &enriched, 5.0);
            assemble_features(charge, patch, &overall, &surface, Some(label), format!("SYN{i:03}:A")).unwrap()
        })
        .collect();
    print!("{}", write_feature_csv(&rows));
}
