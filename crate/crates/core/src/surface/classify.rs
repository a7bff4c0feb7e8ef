use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{SasaResult, SurfaceError};
use crate::structure::ResidueKey;

const BUNDLED_MAX_SASA: &str = include_str!("../../data/max_sasa.csv");

/// Fraction of the reference area above which a residue is on the surface.
pub const DEFAULT_SURFACE_THRESHOLD: f64 = 0.40;

/// Maximum accessible area of each residue type, Å².
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceAreas {
    areas: HashMap<String, f64>,
}

impl ReferenceAreas {
    /// Reads a `residue,max_area_angstrom2` CSV.
    pub fn from_csv(text: &str) -> Result<Self, SurfaceError> {
        let bad = |m: String| SurfaceError::ReferenceTable(m);
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.iter().collect::<Vec<_>>() != ["residue", "max_area_angstrom2"] {
            return Err(bad("expected header `residue,max_area_angstrom2`".into()));
        }
        let mut areas = HashMap::new();
        for record in reader.records() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            if record.len() != 2 {
                return Err(bad(format!("expected 2 fields in {record:?}")));
            }
            let area: f64 = record[1]
                .parse()
                .ok()
                .filter(|a: &f64| *a > 0.0 && a.is_finite())
                .ok_or_else(|| bad(format!("bad area {:?}", &record[1])))?;
            areas.insert(record[0].to_ascii_uppercase(), area);
        }
        Ok(Self { areas })
    }

    pub fn bundled() -> Self {
        Self::from_csv(BUNDLED_MAX_SASA).expect("bundled reference areas are valid")
    }

    pub fn get(&self, residue_name: &str) -> Option<f64> {
        self.areas.get(residue_name).copied()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceClassification {
    pub surface: BTreeSet<ResidueKey>,
    pub buried: BTreeSet<ResidueKey>,
    pub relative_accessibility: BTreeMap<ResidueKey, f64>,
}

/// Surface iff area / reference is strictly greater than `threshold`.
pub fn classify_surface_residues(
    sasa: &SasaResult,
    reference: &ReferenceAreas,
    threshold: f64,
) -> Result<SurfaceClassification, SurfaceError> {
    let mut out = SurfaceClassification::default();
    for (key, area) in &sasa.per_residue_area {
        let name = sasa.residue_names.get(key).map(String::as_str).unwrap_or("");
        let max = reference
            .get(name)
            .ok_or_else(|| SurfaceError::ReferenceMiss(name.to_string()))?;
        let relative = area / max;
        out.relative_accessibility.insert(*key, relative);
        if relative > threshold {
            out.surface.insert(*key);
        } else {
            out.buried.insert(*key);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sasa_of(entries: &[(i32, &str, f64)]) -> SasaResult {
        SasaResult {
            per_atom_area: vec![],
            per_residue_area: entries.iter().map(|(s, _, a)| (ResidueKey::new('A', *s), *a)).collect(),
            residue_names: entries
                .iter()
                .map(|(s, n, _)| (ResidueKey::new('A', *s), n.to_string()))
                .collect(),
            probe_radius: 1.4,
            points_per_atom: 960,
        }
    }

    #[test]
    fn strict_threshold() {
        let reference = ReferenceAreas::from_csv("residue,max_area_angstrom2\nALA,100.0\n").unwrap();
        let c = classify_surface_residues(&sasa_of(&[(1, "ALA", 41.0), (2, "ALA", 40.0), (3, "ALA", 0.0)]), &reference, 0.40)
            .unwrap();
        assert!(c.surface.contains(&ResidueKey::new('A', 1)));
        assert!(c.buried.contains(&ResidueKey::new('A', 2)));
        assert!(c.buried.contains(&ResidueKey::new('A', 3)));
        assert_eq!(c.relative_accessibility[&ResidueKey::new('A', 3)], 0.0);
        assert!(c.surface.is_disjoint(&c.buried));
        assert_eq!(c.surface.len() + c.buried.len(), 3);
    }

    #[test]
    fn missing_reference() {
        let r = classify_surface_residues(&sasa_of(&[(1, "MSE", 10.0)]), &ReferenceAreas::bundled(), 0.4);
        assert!(matches!(r, Err(SurfaceError::ReferenceMiss(n)) if n == "MSE"));
    }

    #[test]
    fn bundled_covers_standard_residues() {
        let r = ReferenceAreas::bundled();
        for name in crate::structure::STANDARD_RESIDUES {
            assert!(r.get(name).is_some(), "{name}");
        }
    }
}
