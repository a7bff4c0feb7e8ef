use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::ElectrostaticsError;
use crate::geom::Vec3;
use crate::structure::{is_water, ProteinStructure, ResidueKey, STANDARD_RESIDUES};

const BUNDLED_CHARGES: &str = include_str!("../../data/charges.csv");
const BUNDLED_RADII: &str = include_str!("../../data/radii.csv");

/// Entries under this residue name apply to any residue (terminal `OXT`).
pub const WILDCARD_RESIDUE: &str = "*";

/// Formal charge at pH 7 with neutral histidine.
pub fn formal_charge(residue_name: &str) -> f64 {
    match residue_name {
        "LYS" | "ARG" => 1.0,
        "ASP" | "GLU" => -1.0,
        _ => 0.0,
    }
}

type AtomKey = (String, String);

fn read_table(text: &str, value_column: &str) -> Result<HashMap<AtomKey, f64>, ElectrostaticsError> {
    let bad = |line: usize, message: String| ElectrostaticsError::Table { line, message };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    let expected = ["residue", "atom", value_column];
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(bad(1, format!("expected header `{}`", expected.join(","))));
    }
    let mut map = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(0, e.to_string()))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 3 {
            return Err(bad(line, "expected 3 fields".into()));
        }
        let value: f64 = record[2]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| bad(line, format!("bad value {:?}", &record[2])))?;
        let key = (record[0].to_ascii_uppercase(), record[1].to_ascii_uppercase());
        if map.insert(key, value).is_some() {
            return Err(bad(line, format!("duplicate entry {},{}", &record[0], &record[1])));
        }
    }
    Ok(map)
}

/// Heavy-atom partial charges keyed by (residue, atom).
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeTable {
    entries: HashMap<AtomKey, f64>,
}

impl ChargeTable {
    /// Loads a `residue,atom,charge_e` CSV. Every standard residue must be
    /// present and its entries must sum to its formal charge.
    pub fn from_csv(text: &str) -> Result<Self, ElectrostaticsError> {
        let entries = read_table(text, "charge_e")?;
        let mut sums: HashMap<&str, f64> = HashMap::new();
        for ((res, _), q) in &entries {
            *sums.entry(res.as_str()).or_default() += q;
        }
        for res in STANDARD_RESIDUES {
            let sum = sums.get(res).copied().ok_or_else(|| ElectrostaticsError::Table {
                line: 0,
                message: format!("no entries for residue {res}"),
            })?;
            let formal = formal_charge(res);
            if (sum - formal).abs() > 1e-9 {
                return Err(ElectrostaticsError::Table {
                    line: 0,
                    message: format!("charges of {res} sum to {sum}, expected {formal}"),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn bundled() -> Self {
        Self::from_csv(BUNDLED_CHARGES).expect("bundled charge table is valid")
    }

    pub fn get(&self, residue: &str, atom: &str) -> Option<f64> {
        self.entries
            .get(&(residue.to_string(), atom.to_string()))
            .or_else(|| {
                self.entries
                    .get(&(WILDCARD_RESIDUE.to_string(), atom.to_string()))
            })
            .copied()
    }

    /// Sum of the table entries of one residue (excluding wildcards).
    pub fn residue_sum(&self, residue: &str) -> f64 {
        self.entries
            .iter()
            .filter(|((r, _), _)| r == residue)
            .map(|(_, q)| q)
            .sum()
    }
}

/// van der Waals radii keyed by (residue, atom), with an element fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusTable {
    entries: HashMap<AtomKey, f64>,
}

impl RadiusTable {
    pub fn from_csv(text: &str) -> Result<Self, ElectrostaticsError> {
        let entries = read_table(text, "radius_angstrom")?;
        if let Some(((r, a), v)) = entries.iter().find(|(_, v)| **v <= 0.0) {
            return Err(ElectrostaticsError::Table {
                line: 0,
                message: format!("non-positive radius {v} for {r},{a}"),
            });
        }
        Ok(Self { entries })
    }

    pub fn bundled() -> Self {
        Self::from_csv(BUNDLED_RADII).expect("bundled radius table is valid")
    }

    pub fn element_radius(element: &str) -> f64 {
        match element {
            "C" => 1.70,
            "N" => 1.55,
            "O" => 1.52,
            "S" => 1.80,
            "P" => 1.80,
            "SE" => 1.90,
            "H" => 1.10,
            _ => 1.80,
        }
    }

    pub fn get(&self, residue: &str, atom: &str, element: &str) -> f64 {
        self.entries
            .get(&(residue.to_string(), atom.to_string()))
            .or_else(|| {
                self.entries
                    .get(&(WILDCARD_RESIDUE.to_string(), atom.to_string()))
            })
            .copied()
            .unwrap_or_else(|| Self::element_radius(element))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChargeMode {
    /// Missing (residue, atom) entries are an error.
    #[default]
    Strict,
    /// Missing entries get zero charge and are counted.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargedAtom {
    pub position: Vec3,
    pub charge: f64,
    pub radius: f64,
    pub residue: ResidueKey,
    pub residue_name: String,
    pub atom_name: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChargedAtomSet {
    pub atoms: Vec<ChargedAtom>,
    /// Atoms that fell back to zero charge in lenient mode.
    pub missing_charges: usize,
}

impl ChargedAtomSet {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn negated(&self) -> ChargedAtomSet {
        let mut out = self.clone();
        for a in &mut out.atoms {
            a.charge = -a.charge;
        }
        out
    }
}

/// Charges and radii for every heavy atom, in traversal order. Chain
/// atoms come first, then non-water `HETATM` atoms with zero charge.
pub fn assign_charges(
    structure: &ProteinStructure,
    charges: &ChargeTable,
    radii: &RadiusTable,
    mode: ChargeMode,
) -> Result<ChargedAtomSet, ElectrostaticsError> {
    let mut set = ChargedAtomSet::default();
    for atom in structure.atoms().filter(|a| !a.is_hydrogen()) {
        let charge = match charges.get(&atom.residue_name, &atom.name) {
            Some(q) => q,
            None if mode == ChargeMode::Lenient => {
                set.missing_charges += 1;
                0.0
            }
            None => {
                return Err(ElectrostaticsError::ChargeTableMiss {
                    residue: atom.residue_name.clone(),
                    atom: atom.name.clone(),
                })
            }
        };
        set.atoms.push(ChargedAtom {
            position: atom.position,
            charge,
            radius: radii.get(&atom.residue_name, &atom.name, &atom.element),
            residue: atom.residue_key(),
            residue_name: atom.residue_name.clone(),
            atom_name: atom.name.clone(),
        });
    }
    for atom in structure
        .hetero_atoms
        .iter()
        .filter(|a| !a.is_hydrogen() && !is_water(&a.residue_name))
    {
        set.atoms.push(ChargedAtom {
            position: atom.position,
            charge: 0.0,
            radius: radii.get(&atom.residue_name, &atom.name, &atom.element),
            residue: atom.residue_key(),
            residue_name: atom.residue_name.clone(),
            atom_name: atom.name.clone(),
        });
    }
    Ok(set)
}

/// Overall charge in e.
pub fn net_charge(set: &ChargedAtomSet) -> f64 {
    set.atoms.iter().map(|a| a.charge).sum()
}
