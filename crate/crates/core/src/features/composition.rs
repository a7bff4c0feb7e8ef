use std::collections::BTreeSet;

use super::{FeatureError, COMPOSITION_LEN};
use crate::structure::{standard_index, ProteinStructure, ResidueKey};
use crate::surface::SurfaceClassification;

fn percentages(counts: &[usize; COMPOSITION_LEN]) -> [f64; COMPOSITION_LEN] {
    let total: usize = counts.iter().sum();
    let mut out = [0.0; COMPOSITION_LEN];
    if total > 0 {
        for (o, &c) in out.iter_mut().zip(counts) {
            *o = 100.0 * c as f64 / total as f64;
        }
    }
    out
}

/// Percentage of each standard residue over all standard residues.
pub fn overall_composition(structure: &ProteinStructure) -> Result<[f64; COMPOSITION_LEN], FeatureError> {
    let mut counts = [0usize; COMPOSITION_LEN];
    for (_, residue) in structure.residues() {
        if let Some(i) = standard_index(&residue.name) {
            counts[i] += 1;
        }
    }
    if counts.iter().all(|&c| c == 0) {
        return Err(FeatureError::EmptyProtein);
    }
    Ok(percentages(&counts))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceComposition {
    pub values: [f64; COMPOSITION_LEN],
    /// No standard residue is on the surface; `values` is all zero.
    pub empty: bool,
}

/// Composition restricted to surface residues.
///
/// Every standard residue of the structure must be classified, and every
/// classified key must belong to the structure.
pub fn surface_composition(
    structure: &ProteinStructure,
    classification: &SurfaceClassification,
) -> Result<SurfaceComposition, FeatureError> {
    let standard: BTreeSet<ResidueKey> = structure
        .residues()
        .filter(|(_, r)| r.is_standard())
        .map(|(k, _)| k)
        .collect();
    let all: BTreeSet<ResidueKey> = structure.residues().map(|(k, _)| k).collect();
    if let Some(k) = standard
        .iter()
        .find(|k| !classification.surface.contains(k) && !classification.buried.contains(k))
    {
        return Err(FeatureError::KeyMismatch(format!("residue {k} is not classified")));
    }
    if let Some(k) = classification
        .surface
        .iter()
        .chain(&classification.buried)
        .find(|k| !all.contains(k))
    {
        return Err(FeatureError::KeyMismatch(format!("residue {k} is not in the structure")));
    }
    let mut counts = [0usize; COMPOSITION_LEN];
    for (key, residue) in structure.residues() {
        if !classification.surface.contains(&key) {
            continue;
        }
        if let Some(i) = standard_index(&residue.name) {
            counts[i] += 1;
        }
    }
    Ok(SurfaceComposition {
        values: percentages(&counts),
        empty: counts.iter().all(|&c| c == 0),
    })
}
