//! C-alpha extraction from PDB-format text.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chem_model::AminoAcid;
use crate::error::{read_to_string, Error, Result};
use crate::geometry::{is_finite, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residue {
    pub aa: AminoAcid,
    pub ca: Vec3,
    pub chain: char,
    pub number: i32,
    #[serde(default = "blank")]
    pub insertion: char,
}

fn blank() -> char {
    ' '
}

/// Protein (or peptide) as one bead per residue at its C-alpha.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProteinStructure {
    pub residues: Vec<Residue>,
}

impl ProteinStructure {
    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn ca_positions(&self) -> Vec<Vec3> {
        self.residues.iter().map(|r| r.ca).collect()
    }

    pub fn sequence(&self) -> String {
        self.residues.iter().map(|r| r.aa.code()).collect()
    }
}

/// Reads the first model of a PDB file.
pub fn parse_structure(path: &Path) -> Result<ProteinStructure> {
    parse_pdb_str(&read_to_string(path)?)
}

/// First model only; see [`parse_models`] for multi-model files.
pub fn parse_pdb_str(text: &str) -> Result<ProteinStructure> {
    let mut models = parse_models_inner(text, true)?;
    let model = models.pop().unwrap_or_default();
    if model.is_empty() {
        return Err(Error::NoCAlpha);
    }
    Ok(model)
}

/// Every MODEL block in order. A file without MODEL records is one model.
pub fn parse_models(text: &str) -> Result<Vec<ProteinStructure>> {
    let models = parse_models_inner(text, false)?;
    if models.iter().all(|m| m.is_empty()) {
        return Err(Error::NoCAlpha);
    }
    Ok(models.into_iter().filter(|m| !m.is_empty()).collect())
}

fn field(line: &str, start: usize, end: usize) -> &str {
    line.get(start..end.min(line.len())).unwrap_or("")
}

fn parse_models_inner(text: &str, first_only: bool) -> Result<Vec<ProteinStructure>> {
    let mut models = Vec::new();
    let mut current = ProteinStructure::default();
    let mut seen: std::collections::HashSet<(char, i32, char)> = Default::default();
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let record = field(line, 0, 6).trim_end();
        match record {
            "MODEL" => {
                if !current.is_empty() {
                    models.push(std::mem::take(&mut current));
                    if first_only {
                        return Ok(models);
                    }
                }
                seen.clear();
            }
            "ENDMDL" => {
                models.push(std::mem::take(&mut current));
                seen.clear();
                if first_only {
                    return Ok(models);
                }
            }
            "ATOM" => {
                if field(line, 12, 16).trim() != "CA" {
                    continue;
                }
                if line.len() < 54 {
                    return Err(Error::parse(lineno, "truncated ATOM record"));
                }
                let chain = field(line, 21, 22).chars().next().unwrap_or(' ');
                let number: i32 = field(line, 22, 26)
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(lineno, "bad residue number"))?;
                let insertion = field(line, 26, 27).chars().next().unwrap_or(' ');
                if !seen.insert((chain, number, insertion)) {
                    // alternate location of an already recorded C-alpha
                    continue;
                }
                let aa = AminoAcid::from_three_letter(field(line, 17, 20))?;
                let mut ca = [0.0; 3];
                for (slot, (a, b)) in ca.iter_mut().zip([(30, 38), (38, 46), (46, 54)]) {
                    *slot = field(line, a, b)
                        .trim()
                        .parse()
                        .map_err(|_| Error::parse(lineno, "bad coordinate"))?;
                }
                if !is_finite(ca) {
                    return Err(Error::parse(lineno, "non-finite coordinate"));
                }
                current.residues.push(Residue {
                    aa,
                    ca,
                    chain,
                    number,
                    insertion,
                });
            }
            _ => {}
        }
    }
    if !current.is_empty() || models.is_empty() {
        models.push(current);
    }
    Ok(models)
}

/// One C-alpha ATOM record per bead. `labels` are 3-character residue names.
pub fn format_ca_records(beads: &[(String, Vec3)], chain: char) -> String {
    let mut out = String::new();
    for (i, (label, p)) in beads.iter().enumerate() {
        out.push_str(&format!(
            "ATOM  {:>5}  CA  {:>3} {}{:>4}    {:>8.3}{:>8.3}{:>8.3}  1.00  0.00           C\n",
            i + 1,
            label,
            chain,
            i + 1,
            p[0],
            p[1],
            p[2]
        ));
    }
    out
}
