use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::SurfaceError;
use crate::electrostatics::ChargedAtomSet;

pub const DEFAULT_POTENTIAL_THRESHOLD: f64 = 0.0;
pub const DEFAULT_LINK_DISTANCE: f64 = 4.5;

/// Connected set of surface atoms above the potential threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub atom_indices: BTreeSet<usize>,
    /// kT/e
    pub mean_potential: f64,
}

impl Patch {
    pub fn size(&self) -> usize {
        self.atom_indices.len()
    }
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Groups surface atoms whose potential is strictly above `threshold`
/// into patches linked by centre distance ≤ `link_distance`.
///
/// `potentials` is indexed like `set.atoms`. Patches are sorted by size,
/// largest first, ties broken by smallest member index.
pub fn detect_patches(
    set: &ChargedAtomSet,
    surface_atom_indices: &BTreeSet<usize>,
    potentials: &[f64],
    threshold: f64,
    link_distance: f64,
) -> Result<Vec<Patch>, SurfaceError> {
    if potentials.len() != set.atoms.len() {
        return Err(SurfaceError::PotentialCount {
            atoms: set.atoms.len(),
            potentials: potentials.len(),
        });
    }
    if let Some(&bad) = surface_atom_indices.iter().find(|&&i| i >= set.atoms.len()) {
        return Err(SurfaceError::AtomIndex(bad));
    }
    let nodes: Vec<usize> = surface_atom_indices
        .iter()
        .copied()
        .filter(|&i| potentials[i] > threshold)
        .collect();
    let link_sq = link_distance * link_distance;
    let mut dsu = DisjointSet::new(nodes.len());
    for a in 0..nodes.len() {
        let pa = set.atoms[nodes[a]].position;
        for b in a + 1..nodes.len() {
            if pa.distance_sq(set.atoms[nodes[b]].position) <= link_sq {
                dsu.union(a, b);
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (slot, &atom) in nodes.iter().enumerate() {
        let root = dsu.find(slot);
        groups.entry(root).or_default().insert(atom);
    }
    let mut patches: Vec<Patch> = groups
        .into_values()
        .map(|atom_indices| {
            let mean_potential =
                atom_indices.iter().map(|&i| potentials[i]).sum::<f64>() / atom_indices.len() as f64;
            Patch {
                atom_indices,
                mean_potential,
            }
        })
        .collect();
    patches.sort_by(|a, b| {
        b.size()
            .cmp(&a.size())
            .then_with(|| a.atom_indices.first().cmp(&b.atom_indices.first()))
    });
    Ok(patches)
}

/// Atom count of the largest patch; 0 when there are none.
pub fn largest_patch_size(patches: &[Patch]) -> usize {
    patches.iter().map(Patch::size).max().unwrap_or(0)
}

/// `patch_rank,size,mean_potential` CSV, rank starting at 1.
pub fn write_patch_report(patches: &[Patch]) -> String {
    let mut out = String::from("patch_rank,size,mean_potential\n");
    for (rank, p) in patches.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", rank + 1, p.size(), p.mean_potential);
    }
    out
}
