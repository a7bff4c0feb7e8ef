//! Per-class charge histograms and composition means.

use std::fmt::Write as _;

use dbp_core::features::{FeatureVector, COMPOSITION_LEN};
use dbp_core::structure::STANDARD_RESIDUES;
use dbp_core::Label;

pub const REPORT_HEADER: &str = "section,class,key,count,overall_mean,surface_mean";

pub struct DistributionReport {
    pub text: String,
    /// Classes with at least one row, binding first.
    pub classes: Vec<Label>,
}

/// Bins share edges across classes: multiples of `bin_width` covering the
/// observed charges, each bin half-open `[lo, hi)`.
pub fn distribution_report(rows: &[FeatureVector], bin_width: f64) -> DistributionReport {
    let mut text = format!("{REPORT_HEADER}\n");
    let classes: Vec<Label> = [Label::Binding, Label::NonBinding]
        .into_iter()
        .filter(|c| rows.iter().any(|r| r.label == Some(*c)))
        .collect();
    let charges: Vec<f64> = rows.iter().filter(|r| r.label.is_some()).map(|r| r.values[0]).collect();
    let (lo, hi) = charges
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &q| (a.min(q), b.max(q)));
    let (first, bins) = if charges.is_empty() {
        (0, 0)
    } else {
        let first = (lo / bin_width).floor() as i64;
        let last = (hi / bin_width).floor() as i64;
        (first, (last - first + 1) as usize)
    };

    for &class in &classes {
        let mut counts = vec![0usize; bins];
        for r in rows.iter().filter(|r| r.label == Some(class)) {
            let b = ((r.values[0] / bin_width).floor() as i64 - first) as usize;
            counts[b] += 1;
        }
        for (b, count) in counts.iter().enumerate() {
            let edge = (first + b as i64) as f64 * bin_width;
            let _ = writeln!(
                text,
                "charge_histogram,{},\"[{},{})\",{count},,",
                class.as_str(),
                edge,
                edge + bin_width
            );
        }
    }
    for &class in &classes {
        let members: Vec<&FeatureVector> = rows.iter().filter(|r| r.label == Some(class)).collect();
        let n = members.len() as f64;
        for (i, name) in STANDARD_RESIDUES.iter().enumerate() {
            let overall = members.iter().map(|r| r.values[2 + i]).sum::<f64>() / n;
            let surface = members.iter().map(|r| r.values[2 + COMPOSITION_LEN + i]).sum::<f64>() / n;
            let _ = writeln!(text, "composition,{},{name},,{overall},{surface}", class.as_str());
        }
    }
    DistributionReport { text, classes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dbp_core::features::FEATURE_COUNT;

    fn row(charge: f64, label: Label) -> FeatureVector {
        let mut values = vec![5.0; FEATURE_COUNT];
        values[0] = charge;
        FeatureVector {
            values,
            label: Some(label),
            source_id: "x".into(),
        }
    }

    #[test]
    fn bin_counts_match_class_sizes() {
        let rows = vec![
            row(-3.0, Label::NonBinding),
            row(-0.5, Label::NonBinding),
            row(0.0, Label::Binding),
            row(4.0, Label::Binding),
            row(7.9, Label::Binding),
        ];
        let report = distribution_report(&rows, 2.0);
        assert_eq!(report.classes.len(), 2);
        let total = |class: &str| -> usize {
            report
                .text
                .lines()
                .filter(|l| l.starts_with(&format!("charge_histogram,{class},")))
                .map(|l| l.rsplit(',').nth(2).unwrap().parse::<usize>().unwrap())
                .sum()
        };
        assert_eq!(total("binding"), 3);
        assert_eq!(total("non-binding"), 2);
        assert!(report.text.contains("charge_histogram,binding,\"[-4,-2)\",0,,"));
        assert!(report.text.contains("composition,non-binding,ALA,,5,5"));
    }
}
