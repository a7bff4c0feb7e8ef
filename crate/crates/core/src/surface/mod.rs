//! Solvent-accessible surface, surface residues and positive patches.

mod classify;
mod patches;
mod sasa;

pub use classify::{classify_surface_residues, ReferenceAreas, SurfaceClassification, DEFAULT_SURFACE_THRESHOLD};
pub use patches::{
    detect_patches, largest_patch_size, write_patch_report, Patch, DEFAULT_LINK_DISTANCE,
    DEFAULT_POTENTIAL_THRESHOLD,
};
pub use sasa::{
    compute_sasa, sphere_points, SasaResult, DEFAULT_POINTS_PER_ATOM, DEFAULT_PROBE_RADIUS,
    MIN_POINTS_PER_ATOM,
};

#[derive(Debug, thiserror::Error)]
pub enum SurfaceError {
    #[error("at least 92 points per atom are required, got {0}")]
    TooFewPoints(usize),
    #[error("no reference area for residue {0:?}")]
    ReferenceMiss(String),
    #[error("reference area table: {0}")]
    ReferenceTable(String),
    #[error("{potentials} potentials supplied for {atoms} atoms")]
    PotentialCount { atoms: usize, potentials: usize },
    #[error("surface atom index {0} out of range")]
    AtomIndex(usize),
}
