//! Structure-based prediction of DNA-binding proteins.
//!
//! The crate turns atomic structures into a 42-dimensional feature vector
//! (overall charge, largest positive electrostatic surface patch, overall
//! and surface amino-acid composition) and classifies it with either a
//! kernel SVM or a cascade-correlation network. Evaluation uses repeated
//! random 80/20 train/test splits.
//!
//! Modules follow the pipeline:
//!
//! * [`structure`]: fixed-column structure files, manifests, retrieval
//! * [`electrostatics`]: partial charges and the finite-difference solver
//! * [`surface`]: solvent-accessible area, surface residues, patches
//! * [`features`]: feature assembly and normalization
//! * [`svm`], [`ccnn`]: the two learners
//! * [`evaluation`]: metrics, repeated splits, hyperparameter sweeps
//! * [`pipeline`]: structure-to-features glue used by the command line

pub mod ccnn;
pub mod electrostatics;
pub mod evaluation;
pub mod features;
pub mod geom;
mod label;
pub mod pipeline;
pub mod structure;
pub mod surface;
pub mod svm;

pub use geom::Vec3;
pub use label::{Label, UnknownLabel};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/structures.md")]
    mod structures {}
    #[doc = include_str!("../../../book/src/electrostatics.md")]
    mod electrostatics {}
    #[doc = include_str!("../../../book/src/surface.md")]
    mod surface {}
    #[doc = include_str!("../../../book/src/features.md")]
    mod features {}
    #[doc = include_str!("../../../book/src/learners.md")]
    mod learners {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
