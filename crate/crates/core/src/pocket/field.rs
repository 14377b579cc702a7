//! Protein-peptide interaction energy on each grid site.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lattice::PocketLattice;
use super::pdb::ProteinStructure;
use crate::chem_model::InteractionModel;
use crate::error::{Error, Result};
use crate::geometry::dist;

/// Distances are floored here so a coincident C-alpha gives a huge but
/// finite repulsion.
const MIN_DISTANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalField {
    /// `energy[i][k]`: family `k` placed on point `i` (k_B T).
    pub energy: Vec<Vec<f64>>,
    /// Mean-field sequence free energy per family (k_B T).
    pub offset: Vec<f64>,
    /// Average protein contacts per peptide residue.
    pub nc: f64,
}

impl ExternalField {
    pub fn zeros(points: usize, families: usize) -> Self {
        ExternalField {
            energy: vec![vec![0.0; families]; points],
            offset: vec![0.0; families],
            nc: 0.0,
        }
    }

    pub fn families(&self) -> usize {
        self.offset.len()
    }

    /// `E[i][k] - E0[k]`, the linear site coefficient.
    #[inline]
    pub fn shifted(&self, i: usize, k: usize) -> f64 {
        self.energy[i][k] - self.offset[k]
    }
}

/// `E0[k] = Nc * sum_j f_j eps[k][j]` over the model's families.
pub fn mean_field_offset(model: &InteractionModel, nc: f64) -> Vec<f64> {
    (0..model.families)
        // adding 0.0 turns -0.0 into 0.0 for display
        .map(|k| nc * (0..model.families).map(|j| model.surface_freq[j] * model.epsilon.get(k, j)).sum::<f64>() + 0.0)
        .collect()
}

pub fn compute_external_field(
    lattice: &PocketLattice,
    protein: &ProteinStructure,
    model: &InteractionModel,
    nc: f64,
) -> Result<ExternalField> {
    if !(nc >= 0.0) || !nc.is_finite() {
        return Err(Error::InvalidParameter(format!("contact number must be non-negative, got {nc}")));
    }
    let d = model.families;
    let residues: Vec<(usize, [f64; 3])> = protein.residues.iter().map(|r| (model.family_of(r.aa), r.ca)).collect();
    let energy = lattice
        .points
        .par_iter()
        .map(|&p| {
            let mut row = vec![0.0; d];
            for &(fam, ca) in &residues {
                let r = dist(p, ca);
                if r > model.cutoff {
                    continue;
                }
                let r = r.max(MIN_DISTANCE);
                for (k, e) in row.iter_mut().enumerate() {
                    *e += model.pair_energy(k, fam, r);
                }
            }
            row
        })
        .collect();
    Ok(ExternalField {
        energy,
        offset: mean_field_offset(model, nc),
        nc,
    })
}
