use std::collections::BTreeSet;

use super::{AtomRecord, ResidueKey};

/// Heavy-atom contact distance (Å) defining a DNA-contacting residue.
pub const DEFAULT_CONTACT_CUTOFF: f64 = 4.5;

/// Residues with any atom within `cutoff` (inclusive) of any DNA atom.
pub fn label_binding_residues(
    protein_atoms: &[AtomRecord],
    dna_atoms: &[AtomRecord],
    cutoff: f64,
) -> BTreeSet<ResidueKey> {
    assert!(cutoff > 0.0, "contact cutoff must be positive");
    let cutoff_sq = cutoff * cutoff;
    protein_atoms
        .iter()
        .filter(|a| {
            dna_atoms
                .iter()
                .any(|d| a.position.distance_sq(d.position) <= cutoff_sq)
        })
        .map(AtomRecord::residue_key)
        .collect()
}
