//! Small synthetic structures for tests, benchmarks and smoke runs.

use crate::chem_model::AminoAcid;
use crate::geometry::Vec3;
use crate::pocket::{ProteinStructure, Residue};

const HELIX_SEQUENCE: &str = "LKFEAVSDIRGWTYNQMHPC";

/// Ideal alpha-helix C-alpha trace along +z starting near `start`
/// (radius 2.3 Å, rise 1.5 Å, 100° per residue). The first C-alpha sits at
/// `start`.
pub fn helix_protein(n: usize, start: Vec3) -> ProteinStructure {
    let codes: Vec<char> = HELIX_SEQUENCE.chars().collect();
    let residues = (0..n)
        .map(|i| {
            let phi = (100.0f64 * i as f64).to_radians();
            let ca = [start[0] + 2.3 * (phi.cos() - 1.0), start[1] + 2.3 * phi.sin(), start[2] + 1.5 * i as f64];
            Residue {
                aa: AminoAcid::from_code(codes[i % codes.len()]).expect("valid code"),
                ca,
                chain: 'A',
                number: i as i32 + 1,
                insertion: ' ',
            }
        })
        .collect();
    ProteinStructure { residues }
}

/// A groove-shaped receptor: two walls and a floor of C-alpha beads lining a
/// channel along z through the origin, plus the channel's seed points.
#[derive(Debug, Clone)]
pub struct ToyPocket {
    pub protein: ProteinStructure,
    /// Reference C-alpha trace of a bound peptide along the channel.
    pub seeds: Vec<Vec3>,
}

pub fn toy_pocket() -> ToyPocket {
    // hydrophobic floor, mixed walls
    let floor = "LIFVLMWFIL";
    let left = "KLEAFSVDLT";
    let right = "RIYQLNFGVE";
    let mut residues = Vec::new();
    let mut push = |code: char, ca: Vec3| {
        let number = residues.len() as i32 + 1;
        residues.push(Residue {
            aa: AminoAcid::from_code(code).expect("valid code"),
            ca,
            chain: 'A',
            number,
            insertion: ' ',
        });
    };
    for (i, ((f, l), r)) in floor.chars().zip(left.chars()).zip(right.chars()).enumerate() {
        let z = -5.7 + 2.85 * i as f64;
        push(f, [0.3, -6.2, z]);
        push(l, [-6.4, -0.5, z + 0.7]);
        push(r, [6.3, 0.4, z - 0.6]);
    }
    let seeds = (0..4).map(|i| [0.0, 0.0, 3.8 * i as f64]).collect();
    ToyPocket {
        protein: ProteinStructure { residues },
        seeds,
    }
}
