use serde::{Deserialize, Serialize};

/// Qubit counts for a lattice problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableCounts {
    pub points: usize,
    pub bonds: usize,
    /// One-hot sites, bonds and ancillas.
    pub annealer: usize,
    /// Bonds plus a binary-encoded family register per site.
    pub gate_based: usize,
}

/// Nearest-neighbour bonds of a full `lx × ly × lz` box.
pub fn box_bonds(dims: [usize; 3]) -> usize {
    let [x, y, z] = dims;
    if x == 0 || y == 0 || z == 0 {
        return 0;
    }
    (x - 1) * y * z + x * (y - 1) * z + x * y * (z - 1)
}

/// Counts for an arbitrary (possibly pruned) lattice.
pub fn count_for_lattice(points: usize, bonds: usize, families: usize) -> VariableCounts {
    let register = (usize::BITS - families.leading_zeros()) as usize; // ceil(log2(D + 1))
    VariableCounts {
        points,
        bonds,
        annealer: bonds * (families + 1) + families * points,
        gate_based: bonds + register * points,
    }
}

pub fn count_variables(dims: [usize; 3], families: usize) -> VariableCounts {
    count_for_lattice(dims.iter().product(), box_bonds(dims), families)
}
