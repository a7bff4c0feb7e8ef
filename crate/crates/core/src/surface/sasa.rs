use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SurfaceError;
use crate::electrostatics::ChargedAtomSet;
use crate::geom::Vec3;
use crate::structure::ResidueKey;

pub const DEFAULT_PROBE_RADIUS: f64 = 1.4;
pub const DEFAULT_POINTS_PER_ATOM: usize = 960;
pub const MIN_POINTS_PER_ATOM: usize = 92;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SasaResult {
    /// Å², indexed like the input atoms
    pub per_atom_area: Vec<f64>,
    pub per_residue_area: BTreeMap<ResidueKey, f64>,
    pub residue_names: BTreeMap<ResidueKey, String>,
    pub probe_radius: f64,
    pub points_per_atom: usize,
}

impl SasaResult {
    pub fn total(&self) -> f64 {
        self.per_atom_area.iter().sum()
    }

    /// Drops residues whose name fails `keep`; per-atom areas are untouched.
    pub fn retain_residues(&self, keep: impl Fn(&str) -> bool) -> SasaResult {
        let mut out = self.clone();
        out.residue_names.retain(|_, name| keep(name));
        let names = &out.residue_names;
        out.per_residue_area.retain(|k, _| names.contains_key(k));
        out
    }
}

/// Unit-sphere points on a golden-angle spiral.
pub fn sphere_points(count: usize) -> Vec<Vec3> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let y = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let r = (1.0 - y * y).max(0.0).sqrt();
            let phi = golden_angle * k as f64;
            Vec3::new(phi.cos() * r, y, phi.sin() * r)
        })
        .collect()
}

/// Shrake-Rupley solvent-accessible surface area.
pub fn compute_sasa(set: &ChargedAtomSet, probe_radius: f64, points_per_atom: usize) -> Result<SasaResult, SurfaceError> {
    if points_per_atom < MIN_POINTS_PER_ATOM {
        return Err(SurfaceError::TooFewPoints(points_per_atom));
    }
    let sphere = sphere_points(points_per_atom);
    let atoms = &set.atoms;
    let expanded: Vec<f64> = atoms.iter().map(|a| a.radius + probe_radius).collect();

    let per_atom_area: Vec<f64> = (0..atoms.len())
        .into_par_iter()
        .map(|i| {
            let center = atoms[i].position;
            let r_i = expanded[i];
            let neighbors: Vec<(Vec3, f64)> = (0..atoms.len())
                .filter(|&j| j != i)
                .filter_map(|j| {
                    let reach = r_i + expanded[j];
                    (atoms[j].position.distance_sq(center) < reach * reach)
                        .then(|| (atoms[j].position, expanded[j] * expanded[j]))
                })
                .collect();
            let mut last_hit = 0usize;
            let mut accessible = 0usize;
            for p in &sphere {
                let q = center + *p * r_i;
                let occluded = |(c, r2): &(Vec3, f64)| q.distance_sq(*c) < *r2;
                if neighbors.get(last_hit).is_some_and(occluded) {
                    continue;
                }
                match neighbors.iter().position(occluded) {
                    Some(hit) => last_hit = hit,
                    None => accessible += 1,
                }
            }
            4.0 * PI * r_i * r_i * accessible as f64 / points_per_atom as f64
        })
        .collect();

    let mut per_residue_area = BTreeMap::new();
    let mut residue_names = BTreeMap::new();
    for (atom, area) in atoms.iter().zip(&per_atom_area) {
        *per_residue_area.entry(atom.residue).or_insert(0.0) += area;
        residue_names
            .entry(atom.residue)
            .or_insert_with(|| atom.residue_name.clone());
    }
    Ok(SasaResult {
        per_atom_area,
        per_residue_area,
        residue_names,
        probe_radius,
        points_per_atom,
    })
}
