//! Self-consistent estimate of the average contact number.

use serde::{Deserialize, Serialize};

use super::pdb::ProteinStructure;
use crate::chem_model::InteractionModel;
use crate::error::{Error, Result};
use crate::geometry::{dist, Vec3};

/// A peptide bead: position and family index in the model's alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosedResidue {
    pub position: Vec3,
    pub family: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactOptions {
    /// Relative change below which the estimate is accepted.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ContactOptions {
    fn default() -> Self {
        ContactOptions {
            tolerance: 0.10,
            max_iterations: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactEstimate {
    pub nc: f64,
    /// Contact numbers in the order they were used, starting at 0.
    pub trace: Vec<f64>,
    pub iterations: usize,
}

/// Sum of `u/eps` over attractive peptide-protein pairs, each clamped to
/// `[0, 1]`. A pair at the LJ minimum counts as exactly one contact.
pub fn partial_contacts(peptide: &[PosedResidue], protein: &ProteinStructure, model: &InteractionModel) -> f64 {
    let mut total = 0.0;
    for bead in peptide {
        for res in &protein.residues {
            let fam = model.family_of(res.aa);
            let eps = model.epsilon.get(bead.family, fam);
            if eps >= 0.0 {
                continue;
            }
            let r = dist(bead.position, res.ca);
            if r > model.cutoff || r <= 0.0 {
                continue;
            }
            total += (model.pair_energy(bead.family, fam, r) / eps).clamp(0.0, 1.0);
        }
    }
    total
}

/// Partial contacts divided by peptide length.
pub fn contacts_per_residue(peptide: &[PosedResidue], protein: &ProteinStructure, model: &InteractionModel) -> f64 {
    if peptide.is_empty() {
        return 0.0;
    }
    partial_contacts(peptide, protein, model) / peptide.len() as f64
}

fn relative_change(old: f64, new: f64) -> f64 {
    let scale = old.abs().max(new.abs());
    if scale == 0.0 {
        0.0
    } else {
        (new - old).abs() / scale
    }
}

/// Iterates `Nc -> design(Nc) -> contacts` from `Nc = 0` until the
/// relative change drops to `tolerance`.
pub fn estimate_contacts<F>(
    protein: &ProteinStructure,
    model: &InteractionModel,
    options: &ContactOptions,
    mut design: F,
) -> Result<ContactEstimate>
where
    F: FnMut(f64) -> Result<Vec<PosedResidue>>,
{
    if !(options.tolerance > 0.0 && options.tolerance < 1.0) {
        return Err(Error::InvalidParameter(format!("tolerance must lie in (0, 1), got {}", options.tolerance)));
    }
    if options.max_iterations == 0 {
        return Err(Error::InvalidParameter("max_iterations must be positive".into()));
    }
    let mut nc = 0.0;
    let mut trace = vec![nc];
    for iteration in 1..=options.max_iterations {
        let pose = design(nc)?;
        let next = contacts_per_residue(&pose, protein, model);
        log::info!("contact iteration {iteration}: Nc {nc:.4} -> {next:.4}");
        trace.push(next);
        if relative_change(nc, next) <= options.tolerance {
            return Ok(ContactEstimate {
                nc: next,
                trace,
                iterations: iteration,
            });
        }
        nc = next;
    }
    Err(Error::NotConverged {
        iterations: options.max_iterations,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem_model::{AminoAcid, ModelParams, RawTables, LJ_MIN_FACTOR};
    use crate::synthetic;
    use approx::assert_abs_diff_eq;

    fn full() -> InteractionModel {
        InteractionModel::full(&RawTables::builtin(), &ModelParams::default()).unwrap()
    }

    fn single(aa: AminoAcid, at: Vec3) -> ProteinStructure {
        let mut p = synthetic::helix_protein(1, at);
        p.residues[0].aa = aa;
        p
    }

    #[test]
    fn pair_at_minimum_is_one_contact() {
        let m = full();
        let (l, f) = (AminoAcid::Leu.index(), AminoAcid::Phe.index());
        assert!(m.epsilon.get(l, f) < 0.0);
        let r = LJ_MIN_FACTOR * m.sigma_pair.get(l, f);
        let protein = single(AminoAcid::Phe, [r, 0.0, 0.0]);
        let bead = PosedResidue {
            position: [0.0; 3],
            family: l,
        };
        assert_abs_diff_eq!(partial_contacts(&[bead], &protein, &m), 1.0, epsilon = 1e-12);
        // inside the core the ratio is negative and clamps to zero
        let close = single(AminoAcid::Phe, [0.8 * m.sigma_pair.get(l, f), 0.0, 0.0]);
        assert_eq!(partial_contacts(&[bead], &close, &m), 0.0);
    }

    #[test]
    fn repulsive_pairs_are_ignored() {
        let m = full();
        let (k, e) = (AminoAcid::Lys.index(), AminoAcid::Lys.index());
        assert!(m.epsilon.get(k, e) > 0.0);
        let protein = single(AminoAcid::Lys, [6.0, 0.0, 0.0]);
        let bead = PosedResidue {
            position: [0.0; 3],
            family: k,
        };
        assert_eq!(partial_contacts(&[bead], &protein, &m), 0.0);
    }

    #[test]
    fn no_contacts_converges_immediately() {
        let m = full();
        let protein = synthetic::helix_protein(5, [100.0, 0.0, 0.0]);
        let mut calls = Vec::new();
        let est = estimate_contacts(&protein, &m, &ContactOptions::default(), |nc| {
            calls.push(nc);
            Ok(vec![PosedResidue {
                position: [0.0; 3],
                family: 0,
            }])
        })
        .unwrap();
        assert_eq!(est.nc, 0.0);
        assert_eq!(est.iterations, 1);
        assert_eq!(calls, vec![0.0]);
    }

    #[test]
    fn first_run_uses_zero_then_updates() {
        let m = full();
        let protein = synthetic::helix_protein(20, [0.0, 0.0, 0.0]);
        let pose: Vec<PosedResidue> = (0..4)
            .map(|i| PosedResidue {
                position: [6.0, 0.0, 3.8 * i as f64],
                family: AminoAcid::Leu.index(),
            })
            .collect();
        let mut calls = Vec::new();
        let est = estimate_contacts(&protein, &m, &ContactOptions::default(), |nc| {
            calls.push(nc);
            Ok(pose.clone())
        })
        .unwrap();
        assert_eq!(calls[0], 0.0);
        assert_eq!(est.iterations, 2);
        assert!(est.nc > 0.0);
        assert_eq!(est.trace, vec![0.0, est.nc, est.nc]);
    }

    #[test]
    fn oscillation_is_reported() {
        let m = full();
        let protein = synthetic::helix_protein(20, [0.0, 0.0, 0.0]);
        let mut flip = false;
        let err = estimate_contacts(
            &protein,
            &m,
            &ContactOptions {
                tolerance: 0.1,
                max_iterations: 4,
            },
            |_| {
                flip = !flip;
                let x = if flip { 7.0 } else { 60.0 };
                Ok(vec![PosedResidue {
                    position: [x, 0.0, 0.0],
                    family: AminoAcid::Leu.index(),
                }])
            },
        )
        .unwrap_err();
        match err {
            Error::NotConverged { iterations, trace } => {
                assert_eq!(iterations, 4);
                assert_eq!(trace.len(), 5);
            }
            other => panic!("unexpected {other}"),
        }
    }
}
