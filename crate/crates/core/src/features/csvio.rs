use std::fmt::Write as _;

use super::{FeatureError, FeatureSchema, FeatureVector};
use crate::label::Label;

/// `source_id,label,<42 feature names>`, one row per vector. Values use
/// the shortest representation that parses back to the same `f64`.
pub fn write_feature_csv(rows: &[FeatureVector]) -> String {
    let schema = FeatureSchema::standard();
    let mut out = format!("source_id,label,{}\n", schema.names.join(","));
    for r in rows {
        let _ = write!(
            out,
            "{},{}",
            r.source_id,
            r.label.map(Label::as_str).unwrap_or("")
        );
        for v in &r.values {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

/// Reads a feature CSV. The `label` column may be absent or blank; the
/// feature columns must match the standard schema exactly.
pub fn read_feature_csv(text: &str) -> Result<Vec<FeatureVector>, FeatureError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| FeatureError::Csv {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    if header.first().map(String::as_str) != Some("source_id") {
        return Err(FeatureError::Schema("first column must be `source_id`".into()));
    }
    let has_label = header.get(1).map(String::as_str) == Some("label");
    let first_feature = if has_label { 2 } else { 1 };
    FeatureSchema {
        names: header[first_feature..].to_vec(),
    }
    .check_standard()?;

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| FeatureError::Csv {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let bad = |message: String| FeatureError::Csv { line, message };
        if record.len() != header.len() {
            return Err(bad(format!("expected {} fields, found {}", header.len(), record.len())));
        }
        let label = if has_label && !record[1].is_empty() {
            Some(record[1].parse::<Label>().map_err(|e| bad(e.to_string()))?)
        } else {
            None
        };
        let values = record
            .iter()
            .skip(first_feature)
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(format!("bad value {f:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(FeatureVector {
            values,
            label,
            source_id: record[0].to_string(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FEATURE_COUNT;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trip(
            values in proptest::collection::vec(-1e6f64..1e6, FEATURE_COUNT),
            labelled in any::<bool>()
        ) {
            let row = FeatureVector {
                values,
                label: labelled.then_some(Label::NonBinding),
                source_id: "1ABC:A".into(),
            };
            let back = read_feature_csv(&write_feature_csv(std::slice::from_ref(&row))).unwrap();
            prop_assert_eq!(back, vec![row]);
        }
    }

    #[test]
    fn unlabeled_header() {
        let schema = FeatureSchema::standard();
        let text = format!("source_id,{}\nX,{}\n", schema.names.join(","), vec!["1"; FEATURE_COUNT].join(","));
        let rows = read_feature_csv(&text).unwrap();
        assert_eq!(rows[0].label, None);
    }

    #[test]
    fn forty_one_columns() {
        let schema = FeatureSchema::standard();
        let names = &schema.names[..41];
        let text = format!("source_id,label,{}\nX,binding,{}\n", names.join(","), vec!["1"; 41].join(","));
        assert!(matches!(read_feature_csv(&text), Err(FeatureError::Schema(_))));
    }

    #[test]
    fn bundled_synthetic_fixture_parses() {
        let rows = read_feature_csv(include_str!("../../data/synthetic_separable.csv")).unwrap();
        assert_eq!(rows.len(), 60);
        assert!(rows.iter().all(|r| r.label.is_some()));
    }
}
