//! Residue alphabet, contact-energy tables, the coarse-grained pair potential
//! and reduced-alphabet clustering.

mod clustering;
mod potential;
mod tables;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use clustering::{cluster_alphabet, clustering_loss, exhaustive_bipartition, local_search, ClusteringResult};
pub use potential::{
    lj, lj_energy, reduce_model, transform_epsilon, InteractionModel, ModelParams, DEFAULT_CUTOFF, DEFAULT_E0, DEFAULT_LAMBDA,
    LJ_MIN_FACTOR,
};
pub use tables::{load_raw_tables, RawTables, DATA_DIR_ENV};

/// Number of canonical amino acids.
pub const NUM_RESIDUES: usize = 20;

/// The 20 canonical amino acids, indexed alphabetically by one-letter code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AminoAcid {
    Ala,
    Cys,
    Asp,
    Glu,
    Phe,
    Gly,
    His,
    Ile,
    Lys,
    Leu,
    Met,
    Asn,
    Pro,
    Gln,
    Arg,
    Ser,
    Thr,
    Val,
    Trp,
    Tyr,
}

impl AminoAcid {
    pub const ALL: [AminoAcid; NUM_RESIDUES] = [
        AminoAcid::Ala,
        AminoAcid::Cys,
        AminoAcid::Asp,
        AminoAcid::Glu,
        AminoAcid::Phe,
        AminoAcid::Gly,
        AminoAcid::His,
        AminoAcid::Ile,
        AminoAcid::Lys,
        AminoAcid::Leu,
        AminoAcid::Met,
        AminoAcid::Asn,
        AminoAcid::Pro,
        AminoAcid::Gln,
        AminoAcid::Arg,
        AminoAcid::Ser,
        AminoAcid::Thr,
        AminoAcid::Val,
        AminoAcid::Trp,
        AminoAcid::Tyr,
    ];

    const CODES: &'static [u8; NUM_RESIDUES] = b"ACDEFGHIKLMNPQRSTVWY";

    const THREE: [&'static str; NUM_RESIDUES] = [
        "ALA", "CYS", "ASP", "GLU", "PHE", "GLY", "HIS", "ILE", "LYS", "LEU", "MET", "ASN", "PRO",
        "GLN", "ARG", "SER", "THR", "VAL", "TRP", "TYR",
    ];

    /// Stable matrix index in `0..20`.
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<AminoAcid> {
        Self::ALL.get(i).copied()
    }

    pub fn code(self) -> char {
        Self::CODES[self.index()] as char
    }

    pub fn three_letter(self) -> &'static str {
        Self::THREE[self.index()]
    }

    pub fn from_code(c: char) -> Result<AminoAcid> {
        let u = c.to_ascii_uppercase();
        Self::CODES
            .iter()
            .position(|&b| b as char == u)
            .map(|i| Self::ALL[i])
            .ok_or_else(|| Error::UnknownResidue(c.to_string()))
    }

    /// Accepts the standard three-letter names plus common force-field
    /// protonation variants (HID/HIE/HIP/HSD/HSE/HSP, CYX, ASH, GLH, LYN).
    pub fn from_three_letter(name: &str) -> Result<AminoAcid> {
        let upper = name.trim().to_ascii_uppercase();
        let canonical = match upper.as_str() {
            "HID" | "HIE" | "HIP" | "HSD" | "HSE" | "HSP" => "HIS",
            "CYX" | "CYM" => "CYS",
            "ASH" => "ASP",
            "GLH" => "GLU",
            "LYN" => "LYS",
            other => other,
        };
        Self::THREE
            .iter()
            .position(|&t| t == canonical)
            .map(|i| Self::ALL[i])
            .ok_or(Error::UnknownResidue(upper))
    }
}

impl fmt::Display for AminoAcid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// Parse a one-letter sequence string into residues.
pub fn parse_sequence(seq: &str) -> Result<Vec<AminoAcid>> {
    seq.trim().chars().map(AminoAcid::from_code).collect()
}

/// Dense square matrix indexed by family or residue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTable {
    n: usize,
    data: Vec<f64>,
}

impl PairTable {
    pub fn zeros(n: usize) -> Self {
        PairTable {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        PairTable { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}
