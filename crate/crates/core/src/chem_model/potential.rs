use serde::{Deserialize, Serialize};

use super::clustering::ClusteringResult;
use super::{AminoAcid, PairTable, RawTables, NUM_RESIDUES};
use crate::error::{Error, Result};

/// Overall energy scale applied to the MJ contact energies.
pub const DEFAULT_LAMBDA: f64 = 0.159;
/// Energy offset subtracted from the MJ contact energies (k_B T).
pub const DEFAULT_E0: f64 = -2.27;
/// Pair interactions vanish beyond this C-alpha distance (Å).
pub const DEFAULT_CUTOFF: f64 = 8.5;

/// `2^(1/6)`, the ratio between the LJ minimum and `sigma`.
pub const LJ_MIN_FACTOR: f64 = 1.122_462_048_309_373;

/// Scalar parameters of the pair potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda: f64,
    pub e0: f64,
    pub cutoff: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            lambda: DEFAULT_LAMBDA,
            e0: DEFAULT_E0,
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

impl ModelParams {
    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.cutoff > 0.0) {
            return Err(Error::InvalidParameter(format!("cutoff must be positive, got {}", self.cutoff)));
        }
        Ok(())
    }
}

/// `epsilon[i][j] = lambda * (e[i][j] - e0)` over the full alphabet.
pub fn transform_epsilon(raw: &RawTables, lambda: f64, e0: f64) -> Result<PairTable> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok(PairTable::from_fn(NUM_RESIDUES, |i, j| lambda * (raw.e.get(i, j) - e0)))
}

/// Three-branch Lennard-Jones pair energy with a hard cutoff.
///
/// Attractive pairs (`eps < 0`) use the plain LJ form with well depth `|eps|`.
/// Repulsive pairs use the LJ core shifted up by `2 eps` inside
/// `r0 = 2^(1/6) sigma` and the sign-flipped LJ tail beyond it, so the
/// potential equals `+eps` at `r0` from both sides. Returns exactly 0 for
/// `r > cutoff`. The caller guarantees `r > 0`.
#[inline]
pub fn lj(eps: f64, sigma: f64, r: f64, cutoff: f64) -> f64 {
    if r > cutoff || eps == 0.0 {
        return 0.0;
    }
    let sr6 = (sigma / r).powi(6);
    let core = sr6 * sr6 - sr6;
    if eps < 0.0 {
        4.0 * eps.abs() * core
    } else if r < LJ_MIN_FACTOR * sigma {
        4.0 * eps * core + 2.0 * eps
    } else {
        -4.0 * eps * core
    }
}

/// Pair tables over an alphabet of `D` families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionModel {
    pub families: usize,
    pub epsilon: PairTable,
    pub sigma_family: Vec<f64>,
    pub sigma_pair: PairTable,
    pub cutoff: f64,
    pub lambda: f64,
    pub e0: f64,
    /// Family index of each residue, addressed by `AminoAcid::index`.
    pub cluster_map: Vec<usize>,
    /// Surface frequency of each family (sum over member residues).
    pub surface_freq: Vec<f64>,
}

impl InteractionModel {
    /// Full 20-letter model, one family per residue.
    pub fn full(raw: &RawTables, params: &ModelParams) -> Result<Self> {
        reduce_model(raw, &ClusteringResult::identity(raw), params)
    }

    #[inline]
    pub fn family_of(&self, aa: AminoAcid) -> usize {
        self.cluster_map[aa.index()]
    }

    /// Unchecked pair energy for hot loops; `r` must be positive.
    #[inline]
    pub fn pair_energy(&self, k: usize, l: usize, r: f64) -> f64 {
        lj(self.epsilon.get(k, l), self.sigma_pair.get(k, l), r, self.cutoff)
    }

    /// Residues belonging to family `k`.
    pub fn members(&self, k: usize) -> Vec<AminoAcid> {
        AminoAcid::ALL
            .iter()
            .copied()
            .filter(|aa| self.cluster_map[aa.index()] == k)
            .collect()
    }

    /// Short label such as `FILMV` for a family.
    pub fn family_label(&self, k: usize) -> String {
        self.members(k).iter().map(|aa| aa.code()).collect()
    }
}

/// Pair energy between families `i` and `j` at distance `r` (Å).
pub fn lj_energy(model: &InteractionModel, i: usize, j: usize, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("pair distance must be positive, got {r}")));
    }
    if i >= model.families || j >= model.families {
        return Err(Error::Domain(format!("family index out of range ({i}, {j}) for D={}", model.families)));
    }
    Ok(model.pair_energy(i, j, r))
}

/// Builds the `D`-family model from a clustering of the full tables.
pub fn reduce_model(raw: &RawTables, clustering: &ClusteringResult, params: &ModelParams) -> Result<InteractionModel> {
    params.validate()?;
    let d = clustering.families;
    if clustering.assignment.len() != NUM_RESIDUES || clustering.e_prime.dim() != d || clustering.sigma_prime.len() != d {
        return Err(Error::InvalidParameter("clustering is inconsistent with the raw tables".into()));
    }
    let epsilon = PairTable::from_fn(d, |i, j| params.lambda * (clustering.e_prime.get(i, j) - params.e0));
    let sigma_family = clustering.sigma_prime.clone();
    let sigma_pair = PairTable::from_fn(d, |i, j| 0.5 * (sigma_family[i] + sigma_family[j]));
    let mut surface_freq = vec![0.0; d];
    for (r, &k) in clustering.assignment.iter().enumerate() {
        surface_freq[k] += raw.f_surface[r];
    }
    Ok(InteractionModel {
        families: d,
        epsilon,
        sigma_family,
        sigma_pair,
        cutoff: params.cutoff,
        lambda: params.lambda,
        e0: params.e0,
        cluster_map: clustering.assignment.clone(),
        surface_freq,
    })
}
