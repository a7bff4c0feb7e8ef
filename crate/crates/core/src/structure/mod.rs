//! Atomic structures: fixed-column parsing, chain selection, dataset
//! manifests, archive retrieval and DNA-contact labeling.

mod contacts;
mod fetch;
mod manifest;
mod pdb;

pub use contacts::{label_binding_residues, DEFAULT_CONTACT_CUTOFF};
pub use fetch::{
    fetch_structure, validate_structure_id, FetchOptions, Transport, UreqTransport,
    DEFAULT_ENDPOINT,
};
pub use manifest::{load_manifest, DatasetEntry, DatasetManifest};
pub use pdb::{parse_structure, write_structure};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geom::Vec3;

#[derive(Debug, thiserror::Error)]
pub enum StructureError {
    #[error("structure file is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("chain {0:?} not found")]
    ChainNotFound(char),
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("invalid structure id {0:?}: expected a digit followed by three alphanumerics")]
    Id(String),
    #[error("fetch failed for {id}: {message}")]
    Fetch { id: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The 20 standard amino acids, alphabetical by three-letter code.
pub const STANDARD_RESIDUES: [&str; 20] = [
    "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE", "LEU", "LYS", "MET",
    "PHE", "PRO", "SER", "THR", "TRP", "TYR", "VAL",
];

/// Index of a residue name in [`STANDARD_RESIDUES`].
pub fn standard_index(residue_name: &str) -> Option<usize> {
    STANDARD_RESIDUES.binary_search(&residue_name).ok()
}

const NUCLEOTIDES: [&str; 11] = ["A", "C", "DA", "DC", "DG", "DI", "DT", "DU", "G", "T", "U"];

pub fn is_nucleotide(residue_name: &str) -> bool {
    NUCLEOTIDES.contains(&residue_name)
}

pub fn is_water(residue_name: &str) -> bool {
    matches!(residue_name, "HOH" | "WAT" | "DOD" | "H2O")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub serial: i64,
    pub name: String,
    pub alt_loc: char,
    pub residue_name: String,
    pub chain_id: char,
    pub residue_seq: i32,
    pub insertion_code: char,
    pub position: Vec3,
    pub element: String,
    pub is_hetero: bool,
}

impl AtomRecord {
    pub fn residue_key(&self) -> ResidueKey {
        ResidueKey {
            chain: self.chain_id,
            seq: self.residue_seq,
            insertion: self.insertion_code,
        }
    }

    pub fn is_hydrogen(&self) -> bool {
        matches!(self.element.as_str(), "H" | "D")
    }
}

/// Chain, sequence number and insertion code of a residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueKey {
    pub chain: char,
    pub seq: i32,
    pub insertion: char,
}

impl ResidueKey {
    pub fn new(chain: char, seq: i32) -> Self {
        Self {
            chain,
            seq,
            insertion: ' ',
        }
    }
}

impl fmt::Display for ResidueKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.chain, self.seq)?;
        if self.insertion != ' ' {
            write!(f, "{}", self.insertion)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residue {
    pub seq: i32,
    pub insertion_code: char,
    pub name: String,
    pub atoms: Vec<AtomRecord>,
}

impl Residue {
    pub fn is_standard(&self) -> bool {
        standard_index(&self.name).is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub id: char,
    pub residues: Vec<Residue>,
}

impl Chain {
    pub fn key_of(&self, residue: &Residue) -> ResidueKey {
        ResidueKey {
            chain: self.id,
            seq: residue.seq,
            insertion: residue.insertion_code,
        }
    }
}

/// A parsed structure. `chains` holds `ATOM` records; `HETATM` records
/// are kept flat in `hetero_atoms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProteinStructure {
    pub id: String,
    pub chains: Vec<Chain>,
    pub hetero_atoms: Vec<AtomRecord>,
}

impl ProteinStructure {
    /// Chain atoms in traversal order (chains, residues, atoms).
    pub fn atoms(&self) -> impl Iterator<Item = &AtomRecord> {
        self.chains
            .iter()
            .flat_map(|c| c.residues.iter())
            .flat_map(|r| r.atoms.iter())
    }

    pub fn residues(&self) -> impl Iterator<Item = (ResidueKey, &Residue)> {
        self.chains
            .iter()
            .flat_map(|c| c.residues.iter().map(move |r| (c.key_of(r), r)))
    }

    /// Blank (`None` or `' '`) returns the whole structure.
    pub fn select_chain(&self, chain_id: Option<char>) -> Result<ProteinStructure, StructureError> {
        let Some(id) = chain_id.filter(|c| *c != ' ') else {
            return Ok(self.clone());
        };
        let chain = self
            .chains
            .iter()
            .find(|c| c.id == id)
            .ok_or(StructureError::ChainNotFound(id))?;
        Ok(ProteinStructure {
            id: self.id.clone(),
            chains: vec![chain.clone()],
            hetero_atoms: self
                .hetero_atoms
                .iter()
                .filter(|a| a.chain_id == id)
                .cloned()
                .collect(),
        })
    }

    /// Splits into (protein residues, nucleic-acid atoms). Protein chains
    /// keep every non-nucleotide residue.
    pub fn split_nucleic(&self) -> (ProteinStructure, Vec<AtomRecord>) {
        let mut nucleic = Vec::new();
        let mut chains = Vec::new();
        for chain in &self.chains {
            let mut residues = Vec::new();
            for r in &chain.residues {
                if is_nucleotide(&r.name) {
                    nucleic.extend(r.atoms.iter().cloned());
                } else {
                    residues.push(r.clone());
                }
            }
            if !residues.is_empty() {
                chains.push(Chain {
                    id: chain.id,
                    residues,
                });
            }
        }
        let protein = ProteinStructure {
            id: self.id.clone(),
            chains,
            hetero_atoms: self.hetero_atoms.clone(),
        };
        (protein, nucleic)
    }
}

/// Free-function form of [`ProteinStructure::select_chain`].
pub fn select_chain(
    structure: &ProteinStructure,
    chain_id: Option<char>,
) -> Result<ProteinStructure, StructureError> {
    structure.select_chain(chain_id)
}
