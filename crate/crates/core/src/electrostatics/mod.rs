//! Partial charges, overall charge and the finite-difference linearized
//! Poisson-Boltzmann solver.
//!
//! Potentials are expressed in kT/e at the configured temperature. The
//! solver discretizes
//!
//! ```text
//! ∇·(ε ∇φ) − ε_s κ² φ = −4π ℓ ρ
//! ```
//!
//! where ℓ is the vacuum Bjerrum length (see [`units`]), ρ the charge
//! density in e/Å³, and the κ² term is present only at solvent nodes.

mod charges;
mod grid;
mod solver;
pub mod units;

pub use charges::{
    assign_charges, formal_charge, net_charge, ChargeMode, ChargeTable, ChargedAtom,
    ChargedAtomSet, RadiusTable, WILDCARD_RESIDUE,
};
pub use grid::{read_grid_dump, write_grid_dump, PotentialGrid};
pub use solver::{analytic_screened_coulomb, potential_at_points, solve_potential, SolverConfig};

#[derive(Debug, thiserror::Error)]
pub enum ElectrostaticsError {
    #[error("charge table line {line}: {message}")]
    Table { line: usize, message: String },
    #[error("no charge for atom {atom} of residue {residue}")]
    ChargeTableMiss { residue: String, atom: String },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("grid of {dim}³ nodes at {spacing} Å does not contain the atoms with a {margin} Å margin")]
    GridTooSmall {
        dim: usize,
        spacing: f64,
        margin: f64,
    },
    #[error("solver diverged: non-finite potential after {iterations} sweeps")]
    NonFiniteDivergence { iterations: usize },
    #[error("point {index} lies outside the grid")]
    OutOfGrid { index: usize },
    #[error("query point coincides with a charge")]
    SingularPoint,
    #[error("malformed grid dump: {0}")]
    GridDump(String),
}
