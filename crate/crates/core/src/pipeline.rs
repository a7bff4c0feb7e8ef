//! From a manifest entry to a feature vector.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::electrostatics::{
    assign_charges, net_charge, potential_at_points, solve_potential, ChargeMode, ChargeTable, ElectrostaticsError,
    RadiusTable, SolverConfig,
};
use crate::features::{assemble_features, overall_composition, surface_composition, FeatureError, FeatureVector};
use crate::structure::{
    fetch_structure, label_binding_residues, parse_structure, standard_index, DatasetEntry, FetchOptions, ProteinStructure,
    ResidueKey, StructureError, Transport, DEFAULT_CONTACT_CUTOFF,
};
use crate::surface::{
    classify_surface_residues, compute_sasa, detect_patches, largest_patch_size, Patch, ReferenceAreas, SurfaceError,
    DEFAULT_LINK_DISTANCE, DEFAULT_POINTS_PER_ATOM, DEFAULT_POTENTIAL_THRESHOLD, DEFAULT_PROBE_RADIUS,
    DEFAULT_SURFACE_THRESHOLD,
};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Electrostatics(#[from] ElectrostaticsError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionConfig {
    pub solver: SolverConfig,
    /// Coarsen the grid spacing when the structure does not fit.
    pub auto_spacing: bool,
    pub probe_radius: f64,
    pub points_per_atom: usize,
    pub surface_threshold: f64,
    pub patch_threshold: f64,
    pub link_distance: f64,
    pub contact_cutoff: f64,
    pub lenient_charges: bool,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            auto_spacing: true,
            probe_radius: DEFAULT_PROBE_RADIUS,
            points_per_atom: DEFAULT_POINTS_PER_ATOM,
            surface_threshold: DEFAULT_SURFACE_THRESHOLD,
            patch_threshold: DEFAULT_POTENTIAL_THRESHOLD,
            link_distance: DEFAULT_LINK_DISTANCE,
            contact_cutoff: DEFAULT_CONTACT_CUTOFF,
            lenient_charges: false,
        }
    }
}

/// Charge, radius and reference-area tables.
#[derive(Debug, Clone)]
pub struct Tables {
    pub charges: ChargeTable,
    pub radii: RadiusTable,
    pub reference: ReferenceAreas,
}

impl Tables {
    pub fn bundled() -> Self {
        Self {
            charges: ChargeTable::bundled(),
            radii: RadiusTable::bundled(),
            reference: ReferenceAreas::bundled(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub features: FeatureVector,
    pub patches: Vec<Patch>,
    /// No standard residue is on the surface; the surface block is zeros.
    pub surface_empty: bool,
    /// Residues within the contact cutoff of nucleic-acid atoms, if any.
    pub contact_residues: BTreeSet<ResidueKey>,
    pub spacing: f64,
    pub solver_converged: bool,
    pub solver_iterations: usize,
    pub missing_charges: usize,
}

/// Features of one entry from an already parsed structure.
pub fn extract_features(
    structure: &ProteinStructure,
    entry: &DatasetEntry,
    tables: &Tables,
    config: &ExtractionConfig,
) -> Result<Extraction, PipelineError> {
    // contacts may come from nucleic acid in any chain
    let (_, nucleic) = structure.split_nucleic();
    let (protein, _) = structure.select_chain(entry.chain_id)?.split_nucleic();
    if protein.residues().next().is_none() {
        return Err(StructureError::Empty.into());
    }
    let mode = if config.lenient_charges { ChargeMode::Lenient } else { ChargeMode::Strict };
    let set = assign_charges(&protein, &tables.charges, &tables.radii, mode)?;
    let contact_atoms: Vec<_> = protein.atoms().cloned().collect();
    let contact_residues = label_binding_residues(&contact_atoms, &nucleic, config.contact_cutoff);

    let mut solver = config.solver.clone();
    if config.auto_spacing {
        let needed = solver.min_spacing_for(&set);
        if needed > solver.spacing {
            log::info!("{}: spacing {} -> {needed} to fit the grid", entry.source_id(), solver.spacing);
            solver.spacing = needed;
        }
    }
    let grid = solve_potential(&set, &solver)?;
    let positions: Vec<_> = set.atoms.iter().map(|a| a.position).collect();
    let potentials = potential_at_points(&grid, &positions)?;

    let sasa = compute_sasa(&set, config.probe_radius, config.points_per_atom)?
        .retain_residues(|name| standard_index(name).is_some());
    let classification = classify_surface_residues(&sasa, &tables.reference, config.surface_threshold)?;
    let surface_atoms: BTreeSet<usize> = set
        .atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| classification.surface.contains(&a.residue))
        .map(|(i, _)| i)
        .collect();
    let patches = detect_patches(&set, &surface_atoms, &potentials, config.patch_threshold, config.link_distance)?;

    let overall = overall_composition(&protein)?;
    let surface = surface_composition(&protein, &classification)?;
    // table sums carry float noise at the 1e-15 level
    let charge = (net_charge(&set) * 1e6).round() / 1e6;
    let features = assemble_features(
        charge,
        largest_patch_size(&patches),
        &overall,
        &surface.values,
        Some(entry.label),
        entry.source_id(),
    )?;
    Ok(Extraction {
        features,
        patches,
        surface_empty: surface.empty,
        contact_residues,
        spacing: solver.spacing,
        solver_converged: grid.converged,
        solver_iterations: grid.iterations,
        missing_charges: set.missing_charges,
    })
}

/// Fetches (or reads from cache), parses and extracts one entry.
pub fn extract_entry(
    entry: &DatasetEntry,
    fetch: &FetchOptions,
    transport: &dyn Transport,
    tables: &Tables,
    config: &ExtractionConfig,
) -> Result<Extraction, PipelineError> {
    let text = fetch_structure(&entry.structure_id, fetch, transport)?;
    let structure = parse_structure(&text)?;
    extract_features(&structure, entry, tables, config)
}
