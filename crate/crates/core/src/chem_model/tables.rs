//! Plain-text residue tables.
//!
//! Energy table: `#` starts a comment; the first data line is a header of the
//! 20 one-letter codes; it is followed by 20 rows of 20 energies. Rows may be
//! prefixed with their one-letter code, otherwise they follow header order.
//!
//! Per-residue tables (diameters, surface frequencies): one `code value` pair
//! per line.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AminoAcid, PairTable, NUM_RESIDUES};
use crate::error::{read_to_string, Error, Result};

/// Environment variable naming a directory with replacement table files.
pub const DATA_DIR_ENV: &str = "PEPQUBO_DATA_DIR";

pub const ENERGY_FILE: &str = "mj1996.txt";
pub const DIAMETER_FILE: &str = "vdw_diameter.txt";
pub const FREQUENCY_FILE: &str = "surface_frequency.txt";

const BUILTIN_ENERGY: &str = include_str!("../../data/mj1996.txt");
const BUILTIN_DIAMETER: &str = include_str!("../../data/vdw_diameter.txt");
const BUILTIN_FREQUENCY: &str = include_str!("../../data/surface_frequency.txt");

const SYMMETRY_TOL: f64 = 1e-9;
const NORMALIZATION_TOL: f64 = 1e-9;

/// Contact energies (k_B T), vdW diameters (Å) and surface frequencies for
/// the full 20-letter alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTables {
    pub e: PairTable,
    pub sigma: Vec<f64>,
    pub f_surface: Vec<f64>,
}

impl RawTables {
    /// Validates and wraps already-parsed tables.
    pub fn new(e: PairTable, sigma: Vec<f64>, f_surface: Vec<f64>) -> Result<Self> {
        let t = RawTables { e, sigma, f_surface };
        t.validate()?;
        Ok(t)
    }

    /// Tables shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_ENERGY, BUILTIN_DIAMETER, BUILTIN_FREQUENCY)
            .expect("bundled residue tables are valid")
    }

    /// Tables from `$PEPQUBO_DATA_DIR` when set, the bundled ones otherwise.
    pub fn from_env_or_builtin() -> Result<Self> {
        match std::env::var_os(DATA_DIR_ENV) {
            Some(dir) => load_raw_tables(Path::new(&dir)),
            None => Ok(Self::builtin()),
        }
    }

    pub fn parse(energy: &str, diameter: &str, frequency: &str) -> Result<Self> {
        let e = parse_energy_table(energy)?;
        let sigma = parse_residue_vector(diameter)?;
        let f_surface = parse_residue_vector(frequency)?;
        Self::new(e, sigma, f_surface)
    }

    pub fn validate(&self) -> Result<()> {
        if self.e.dim() != NUM_RESIDUES || self.sigma.len() != NUM_RESIDUES || self.f_surface.len() != NUM_RESIDUES {
            return Err(Error::InvalidTable("tables must cover exactly 20 residues".into()));
        }
        for i in 0..NUM_RESIDUES {
            for j in 0..i {
                let (a, b) = (self.e.get(i, j), self.e.get(j, i));
                if (a - b).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidTable(format!(
                        "energy matrix is asymmetric at {}/{}: {a} vs {b}",
                        AminoAcid::ALL[i],
                        AminoAcid::ALL[j]
                    )));
                }
            }
        }
        for (aa, &s) in AminoAcid::ALL.iter().zip(&self.sigma) {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InvalidTable(format!("diameter of {aa} must be positive, got {s}")));
            }
        }
        for (aa, &f) in AminoAcid::ALL.iter().zip(&self.f_surface) {
            if !(f >= 0.0) || !f.is_finite() {
                return Err(Error::InvalidTable(format!("surface frequency of {aa} must be non-negative, got {f}")));
            }
        }
        let total: f64 = self.f_surface.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidTable(format!("surface frequencies sum to {total}, expected 1")));
        }
        Ok(())
    }

    pub fn min_sigma(&self) -> f64 {
        self.sigma.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Reads `mj1996.txt`, `vdw_diameter.txt` and `surface_frequency.txt` from `dir`.
pub fn load_raw_tables(dir: &Path) -> Result<RawTables> {
    let energy = read_to_string(&dir.join(ENERGY_FILE))?;
    let diameter = read_to_string(&dir.join(DIAMETER_FILE))?;
    let frequency = read_to_string(&dir.join(FREQUENCY_FILE))?;
    RawTables::parse(&energy, &diameter, &frequency)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(n, line)| {
        let body = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((n + 1, tokens))
    })
}

fn single_code(token: &str, line: usize) -> Result<AminoAcid> {
    let mut chars = token.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => AminoAcid::from_code(c),
        _ => Err(Error::parse(line, format!("expected a one-letter residue code, got {token:?}"))),
    }
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| Error::parse(line, format!("not a number: {token:?}")))
}

fn parse_energy_table(text: &str) -> Result<PairTable> {
    let mut lines = data_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::InvalidTable("energy table is empty".into()))?;
    if header.len() != NUM_RESIDUES {
        return Err(Error::parse(hline, format!("header must list 20 codes, found {}", header.len())));
    }
    let columns: Vec<AminoAcid> = header
        .iter()
        .map(|t| single_code(t, hline))
        .collect::<Result<_>>()?;
    let mut seen = [false; NUM_RESIDUES];
    for aa in &columns {
        if std::mem::replace(&mut seen[aa.index()], true) {
            return Err(Error::parse(hline, format!("duplicate column {aa}")));
        }
    }

    let mut table = PairTable::zeros(NUM_RESIDUES);
    let mut have_row = [false; NUM_RESIDUES];
    for (row_no, (line, tokens)) in lines.enumerate() {
        let (row_aa, values) = match tokens.len() {
            n if n == NUM_RESIDUES + 1 => (single_code(tokens[0], line)?, &tokens[1..]),
            n if n == NUM_RESIDUES => {
                let aa = *columns
                    .get(row_no)
                    .ok_or_else(|| Error::parse(line, "more than 20 rows"))?;
                (aa, &tokens[..])
            }
            n => return Err(Error::parse(line, format!("expected 20 energies, found {n} fields"))),
        };
        if std::mem::replace(&mut have_row[row_aa.index()], true) {
            return Err(Error::parse(line, format!("duplicate row {row_aa}")));
        }
        for (col, tok) in columns.iter().zip(values) {
            table.set(row_aa.index(), col.index(), parse_value(tok, line)?);
        }
    }
    if let Some(missing) = have_row.iter().position(|h| !h) {
        return Err(Error::InvalidTable(format!("missing residue row {}", AminoAcid::ALL[missing])));
    }
    Ok(table)
}

fn parse_residue_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = vec![f64::NAN; NUM_RESIDUES];
    let mut have = [false; NUM_RESIDUES];
    for (line, tokens) in data_lines(text) {
        if tokens.len() != 2 {
            return Err(Error::parse(line, "expected `code value`"));
        }
        let aa = single_code(tokens[0], line)?;
        if std::mem::replace(&mut have[aa.index()], true) {
            return Err(Error::parse(line, format!("duplicate entry {aa}")));
        }
        out[aa.index()] = parse_value(tokens[1], line)?;
    }
    if let Some(missing) = have.iter().position(|h| !h) {
        return Err(Error::InvalidTable(format!("missing residue row {}", AminoAcid::ALL[missing])));
    }
    Ok(out)
}
