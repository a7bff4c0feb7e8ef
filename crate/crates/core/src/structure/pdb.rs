use std::fmt::Write as _;

use super::{AtomRecord, Chain, ProteinStructure, Residue, StructureError};
use crate::geom::Vec3;

/// Columns `start..=end` (1-indexed, inclusive); short lines yield the
/// available prefix.
fn col(line: &str, start: usize, end: usize) -> &str {
    let len = line.len();
    if start > len {
        return "";
    }
    line.get(start - 1..end.min(len)).unwrap_or("")
}

fn col_char(line: &str, at: usize) -> char {
    col(line, at, at).chars().next().unwrap_or(' ')
}

fn parse_err(line: usize, message: impl Into<String>) -> StructureError {
    StructureError::Parse {
        line,
        message: message.into(),
    }
}

fn infer_element(name: &str) -> String {
    name.chars()
        .find(|c| c.is_ascii_alphabetic())
        .map(|c| c.to_ascii_uppercase().to_string())
        .unwrap_or_default()
}

fn parse_atom_line(line: &str, lineno: usize, is_hetero: bool) -> Result<AtomRecord, StructureError> {
    let coord = |start, end, axis: &str| -> Result<f64, StructureError> {
        let field = col(line, start, end).trim();
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(parse_err(lineno, format!("malformed {axis} coordinate {field:?}"))),
        }
    };
    let serial_field = col(line, 7, 11).trim();
    let serial = serial_field
        .parse::<i64>()
        .map_err(|_| parse_err(lineno, format!("malformed serial {serial_field:?}")))?;
    let name = col(line, 13, 16).trim().to_string();
    if name.is_empty() {
        return Err(parse_err(lineno, "empty atom name"));
    }
    let residue_name = col(line, 18, 20).trim().to_string();
    if residue_name.is_empty() {
        return Err(parse_err(lineno, "empty residue name"));
    }
    let seq_field = col(line, 23, 26).trim();
    let residue_seq = seq_field
        .parse::<i32>()
        .map_err(|_| parse_err(lineno, format!("malformed residue number {seq_field:?}")))?;
    let position = Vec3::new(coord(31, 38, "x")?, coord(39, 46, "y")?, coord(47, 54, "z")?);
    let mut element = col(line, 77, 78).trim().to_ascii_uppercase();
    if element.is_empty() {
        element = infer_element(&name);
    }
    Ok(AtomRecord {
        serial,
        name,
        alt_loc: col_char(line, 17),
        residue_name,
        chain_id: col_char(line, 22),
        residue_seq,
        insertion_code: col_char(line, 27),
        position,
        element,
        is_hetero,
    })
}

/// Parses `ATOM`/`HETATM` records of the first model.
///
/// Only the first alternate location of each atom name is kept. Residues
/// within a chain must appear in increasing sequence order.
pub fn parse_structure(text: &str) -> Result<ProteinStructure, StructureError> {
    if text.trim().is_empty() {
        return Err(StructureError::Empty);
    }
    let mut id = String::new();
    let mut chains: Vec<Chain> = Vec::new();
    let mut hetero_atoms: Vec<AtomRecord> = Vec::new();
    let mut saw_atoms = false;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let record = col(line, 1, 6);
        match record {
            "HEADER" => id = col(line, 63, 66).trim().to_string(),
            "ENDMDL" => break,
            "ATOM  " | "ATOM" | "HETATM" => {
                let atom = parse_atom_line(line, lineno, record == "HETATM")?;
                saw_atoms = true;
                if atom.is_hetero {
                    let dup = atom.alt_loc != ' '
                        && hetero_atoms.iter().rev().any(|a| {
                            a.residue_key() == atom.residue_key() && a.name == atom.name
                        });
                    if !dup {
                        hetero_atoms.push(atom);
                    }
                    continue;
                }
                insert_chain_atom(&mut chains, atom, lineno)?;
            }
            _ => {}
        }
    }
    if !saw_atoms {
        return Err(parse_err(0, "no ATOM or HETATM records"));
    }
    Ok(ProteinStructure {
        id,
        chains,
        hetero_atoms,
    })
}

fn insert_chain_atom(chains: &mut Vec<Chain>, atom: AtomRecord, lineno: usize) -> Result<(), StructureError> {
    let chain = match chains.iter().position(|c| c.id == atom.chain_id) {
        Some(i) => &mut chains[i],
        None => {
            chains.push(Chain {
                id: atom.chain_id,
                residues: Vec::new(),
            });
            chains.last_mut().expect("just pushed")
        }
    };
    let duplicate = chain
        .residues
        .iter()
        .rev()
        .skip(1)
        .any(|r| r.seq == atom.residue_seq && r.insertion_code == atom.insertion_code);
    if let Some(last) = chain.residues.last_mut() {
        if last.seq == atom.residue_seq && last.insertion_code == atom.insertion_code {
            if last.name != atom.residue_name {
                // point mutation alternates share a key; keep the first
                if atom.alt_loc != ' ' {
                    return Ok(());
                }
                return Err(parse_err(
                    lineno,
                    format!(
                        "residue {}{} changes name from {} to {}",
                        atom.residue_seq, atom.insertion_code, last.name, atom.residue_name
                    ),
                ));
            }
            if atom.alt_loc != ' ' && last.atoms.iter().any(|a| a.name == atom.name) {
                return Ok(());
            }
            last.atoms.push(atom);
            return Ok(());
        }
        if atom.residue_seq < last.seq || duplicate {
            return Err(parse_err(
                lineno,
                format!(
                    "residue {}{} of chain {:?} out of order",
                    atom.residue_seq, atom.insertion_code, atom.chain_id
                ),
            ));
        }
    }
    chain.residues.push(Residue {
        seq: atom.residue_seq,
        insertion_code: atom.insertion_code,
        name: atom.residue_name.clone(),
        atoms: vec![atom],
    });
    Ok(())
}

fn write_atom(out: &mut String, atom: &AtomRecord) {
    let record = if atom.is_hetero { "HETATM" } else { "ATOM" };
    let name = if atom.name.len() >= 4 {
        atom.name.clone()
    } else {
        format!(" {:<3}", atom.name)
    };
    let _ = writeln!(
        out,
        "{:<6}{:>5} {}{}{:>3} {}{:>4}{}   {:>8.3}{:>8.3}{:>8.3}{:>6.2}{:>6.2}          {:>2}",
        record,
        atom.serial,
        name,
        atom.alt_loc,
        atom.residue_name,
        atom.chain_id,
        atom.residue_seq,
        atom.insertion_code,
        atom.position.x,
        atom.position.y,
        atom.position.z,
        1.0,
        0.0,
        atom.element
    );
}

/// Serializes to the fixed-column format read by [`parse_structure`].
pub fn write_structure(structure: &ProteinStructure) -> String {
    let mut out = String::new();
    if !structure.id.is_empty() {
        let _ = writeln!(out, "{:<62}{}", "HEADER", structure.id);
    }
    for atom in structure.atoms() {
        write_atom(&mut out, atom);
    }
    for atom in &structure.hetero_atoms {
        write_atom(&mut out, atom);
    }
    out.push_str("END\n");
    out
}
