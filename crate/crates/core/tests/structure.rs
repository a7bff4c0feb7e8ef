use dbp_core::structure::{
    label_binding_residues, parse_structure, select_chain, write_structure, AtomRecord, Chain, ProteinStructure, Residue,
};
use dbp_core::Vec3;
use proptest::prelude::*;

const RESIDUES: [&str; 6] = ["ALA", "LYS", "ASP", "GLY", "ARG", "SER"];
const ATOMS: [(&str, &str); 4] = [("N", "N"), ("CA", "C"), ("C", "C"), ("O", "O")];

fn coord() -> impl Strategy<Value = f64> {
    // three decimals survive the fixed-width columns exactly
    (-99_999i32..99_999).prop_map(|v| v as f64 / 1000.0)
}

fn structure_strategy() -> impl Strategy<Value = ProteinStructure> {
    let residue = (0usize..RESIDUES.len(), 1usize..=ATOMS.len(), prop::collection::vec((coord(), coord(), coord()), 4));
    let chain = prop::collection::vec(residue, 1..6);
    prop::collection::vec(chain, 1..4).prop_map(|chains| {
        let mut serial = 1;
        let chains = chains
            .into_iter()
            .enumerate()
            .map(|(ci, residues)| {
                let id = (b'A' + ci as u8) as char;
                let residues = residues
                    .into_iter()
                    .enumerate()
                    .map(|(ri, (name, n_atoms, coords))| {
                        let seq = ri as i32 * 2 + 1;
                        let atoms = ATOMS[..n_atoms]
                            .iter()
                            .zip(&coords)
                            .map(|((atom, element), (x, y, z))| {
                                serial += 1;
                                AtomRecord {
                                    serial: serial - 1,
                                    name: atom.to_string(),
                                    alt_loc: ' ',
                                    residue_name: RESIDUES[name].to_string(),
                                    chain_id: id,
                                    residue_seq: seq,
                                    insertion_code: ' ',
                                    position: Vec3::new(*x, *y, *z),
                                    element: element.to_string(),
                                    is_hetero: false,
                                }
                            })
                            .collect();
                        Residue {
                            seq,
                            insertion_code: ' ',
                            name: RESIDUES[name].to_string(),
                            atoms,
                        }
                    })
                    .collect();
                Chain { id, residues }
            })
            .collect();
        ProteinStructure {
            id: "1ABC".into(),
            chains,
            hetero_atoms: vec![],
        }
    })
}

proptest! {
    #[test]
    fn write_then_parse_is_identity(s in structure_strategy()) {
        let parsed = parse_structure(&write_structure(&s)).unwrap();
        prop_assert_eq!(parsed, s);
    }

    #[test]
    fn selected_chain_keeps_exactly_its_atoms(s in structure_strategy()) {
        for chain in &s.chains {
            let picked = select_chain(&s, Some(chain.id)).unwrap();
            let expected: usize = chain.residues.iter().map(|r| r.atoms.len()).sum();
            prop_assert_eq!(picked.atoms().count(), expected);
            prop_assert!(picked.atoms().all(|a| a.chain_id == chain.id));
        }
        prop_assert_eq!(select_chain(&s, None).unwrap(), s.clone());
        prop_assert!(select_chain(&s, Some('Z')).is_err());
    }

    #[test]
    fn contacts_grow_with_cutoff(s in structure_strategy(), dna in prop::collection::vec((coord(), coord(), coord()), 1..5)) {
        let protein: Vec<AtomRecord> = s.atoms().cloned().collect();
        let dna: Vec<AtomRecord> = dna
            .into_iter()
            .map(|(x, y, z)| AtomRecord {
                serial: 0,
                name: "P".into(),
                alt_loc: ' ',
                residue_name: "DA".into(),
                chain_id: 'X',
                residue_seq: 1,
                insertion_code: ' ',
                position: Vec3::new(x, y, z),
                element: "P".into(),
                is_hetero: false,
            })
            .collect();
        let mut previous = label_binding_residues(&protein, &dna, 0.5);
        for cutoff in [1.0, 4.5, 10.0, 50.0, 500.0] {
            let next = label_binding_residues(&protein, &dna, cutoff);
            prop_assert!(previous.is_subset(&next));
            previous = next;
        }
        // every residue touches something at a cutoff beyond the box diagonal
        prop_assert_eq!(previous.len(), s.residues().count());
    }
}

#[test]
fn contact_at_exact_cutoff_counts() {
    let text = "\
ATOM      1  CA  LYS A   1       0.000   0.000   0.000  1.00  0.00           C
ATOM      2  CA  ASP A   2      20.000   0.000   0.000  1.00  0.00           C
ATOM      3  P    DA B   1       4.500   0.000   0.000  1.00  0.00           P
";
    let s = parse_structure(text).unwrap();
    let (protein, nucleic) = s.split_nucleic();
    let protein_atoms: Vec<AtomRecord> = protein.atoms().cloned().collect();
    let hits = label_binding_residues(&protein_atoms, &nucleic, 4.5);
    assert_eq!(hits.len(), 1);
    assert_eq!(hits.iter().next().unwrap().seq, 1);
}
