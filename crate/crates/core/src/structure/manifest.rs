use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{validate_structure_id, StructureError};
use crate::label::Label;

pub const MANIFEST_HEADER: [&str; 3] = ["structure_id", "chain_id", "label"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub structure_id: String,
    /// `None` selects the whole structure.
    pub chain_id: Option<char>,
    pub label: Label,
}

impl DatasetEntry {
    /// `1SHA:A`, or `1SHA` when the whole structure is used.
    pub fn source_id(&self) -> String {
        match self.chain_id {
            Some(c) => format!("{}:{}", self.structure_id, c),
            None => self.structure_id.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub entries: Vec<DatasetEntry>,
}

/// Reads a `structure_id,chain_id,label` CSV.
pub fn load_manifest(text: &str) -> Result<DatasetManifest, StructureError> {
    let err = |line: usize, message: String| StructureError::Manifest { line, message };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| err(1, e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != MANIFEST_HEADER {
        return Err(err(1, format!("expected header `{}`", MANIFEST_HEADER.join(","))));
    }

    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 3 {
            return Err(err(line, format!("expected 3 fields, found {}", record.len())));
        }
        let structure_id = record[0].to_ascii_uppercase();
        validate_structure_id(&structure_id).map_err(|e| err(line, e.to_string()))?;
        let chain_id = match record[1].chars().collect::<Vec<_>>().as_slice() {
            [] => None,
            [c] => Some(*c),
            _ => return Err(err(line, format!("chain id {:?} is not a single character", &record[1]))),
        };
        let label: Label = record[2].parse().map_err(|e: crate::label::UnknownLabel| err(line, e.to_string()))?;
        if !seen.insert((structure_id.clone(), chain_id)) {
            return Err(err(
                line,
                format!("duplicate entry {} chain {:?}", structure_id, chain_id.unwrap_or(' ')),
            ));
        }
        entries.push(DatasetEntry {
            structure_id,
            chain_id,
            label,
        });
    }
    Ok(DatasetManifest { entries })
}
