//! Bit assignments to peptides, feasibility checks and direct scoring.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chem_model::{AminoAcid, InteractionModel};
use crate::error::{Error, Result};
use crate::geometry::dist;
use crate::pocket::{format_ca_records, ExternalField, PocketLattice, PosedResidue};
use crate::qubo::{Layout, QuboProblem, VariableRegistry};

/// A self-avoiding lattice chain from `s` to `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedPeptide {
    /// Lattice point indices, `s` first.
    pub path: Vec<usize>,
    /// Family (stage 1) or residue index (stage 2) per position.
    pub families: Vec<usize>,
    /// Number of bonds.
    pub length: usize,
}

impl DecodedPeptide {
    pub fn posed(&self, lattice: &PocketLattice) -> Vec<PosedResidue> {
        self.path
            .iter()
            .zip(&self.families)
            .map(|(&p, &family)| PosedResidue {
                position: lattice.points[p],
                family,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// No site holds more than one family.
    pub occupancy: bool,
    /// Every ancilla equals `site AND bond`.
    pub ancillas: bool,
    /// Endpoints have one bond, other occupied sites two, empty sites none.
    pub degrees: bool,
    /// Both endpoints are occupied.
    pub endpoints: bool,
    /// The chain from `s` reaches `t`.
    pub connected: bool,
    /// Chain length within `[L0 (1 - p), L0 (1 + p)]`.
    pub length: bool,
    pub chain_length: usize,
    pub total_bonds: usize,
    /// Closed loops detached from the chain, as point lists.
    pub ring_components: Vec<Vec<usize>>,
    pub violations: Vec<String>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.occupancy
            && self.ancillas
            && self.degrees
            && self.endpoints
            && self.connected
            && self.length
            && self.ring_components.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decoded {
    /// Present when every constraint except ring freedom holds.
    pub peptide: Option<DecodedPeptide>,
    pub report: FeasibilityReport,
}

/// Direct energy of a decoded peptide.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub external: f64,
    pub internal: f64,
    pub total: f64,
}

fn stage1_shape(problem: &QuboProblem) -> Result<(usize, usize, &[(usize, usize)])> {
    match &problem.registry.layout {
        Layout::Stage1 { points, families, bonds } => Ok((*points, *families, bonds)),
        _ => Err(Error::ShapeMismatch("not a stage-1 problem".into())),
    }
}

fn length_window(l0: usize, p: f64) -> (f64, f64) {
    let l0 = l0 as f64;
    (l0 * (1.0 - p) - 1e-9, l0 * (1.0 + p) + 1e-9)
}

/// Reads a stage-1 assignment back into a chain.
pub fn decode_bits(bits: &[u8], problem: &QuboProblem, lattice: &PocketLattice) -> Result<Decoded> {
    problem.check_bits(bits)?;
    let (points, d, bonds) = stage1_shape(problem)?;
    if points != lattice.len() || bonds != lattice.adjacency.as_slice() {
        return Err(Error::ShapeMismatch("problem was not built on this lattice".into()));
    }
    let reg = &problem.registry;
    let (s, t) = match (problem.meta.s, problem.meta.t) {
        (Some(s), Some(t)) => (s, t),
        _ => lattice.endpoints()?,
    };
    let mut rep = FeasibilityReport {
        occupancy: true,
        ancillas: true,
        degrees: true,
        endpoints: true,
        connected: false,
        length: false,
        ..Default::default()
    };

    let mut family = vec![None; points];
    for (i, slot) in family.iter_mut().enumerate() {
        let present: Vec<usize> = (0..d).filter(|&k| bits[reg.site(i, k)] == 1).collect();
        if present.len() > 1 {
            rep.occupancy = false;
            rep.violations.push(format!("point {i} holds {} families", present.len()));
        }
        *slot = present.first().copied();
    }

    let mut nbrs = vec![Vec::new(); points];
    for (bp, &(i, j)) in bonds.iter().enumerate() {
        let on = bits[reg.bond(bp)] == 1;
        if on {
            nbrs[i].push(j);
            nbrs[j].push(i);
            rep.total_bonds += 1;
        }
        for k in 0..d {
            let want = u8::from(on && bits[reg.site(i, k)] == 1);
            if bits[reg.ancilla(bp, k)] != want {
                rep.ancillas = false;
                rep.violations.push(format!("ancilla for bond {i}-{j}, family {k} is inconsistent"));
            }
        }
    }

    for e in [s, t] {
        if family[e].is_none() {
            rep.endpoints = false;
            rep.violations.push(format!("endpoint {e} is unoccupied"));
        }
    }
    for i in 0..points {
        let deg = nbrs[i].len();
        let want = match (i == s || i == t, family[i].is_some()) {
            (true, _) => 1,
            (false, true) => 2,
            (false, false) => 0,
        };
        if deg != want {
            rep.degrees = false;
            rep.violations.push(format!("point {i} has {deg} bonds, expected {want}"));
        }
    }

    // walk the chain from s
    let mut path = vec![s];
    let mut on_path = vec![false; points];
    on_path[s] = true;
    let mut prev = usize::MAX;
    let mut cur = s;
    while cur != t {
        let next: Vec<usize> = nbrs[cur].iter().copied().filter(|&j| j != prev && !on_path[j]).collect();
        if next.len() != 1 {
            break;
        }
        prev = cur;
        cur = next[0];
        on_path[cur] = true;
        path.push(cur);
    }
    rep.connected = cur == t;
    if !rep.connected {
        rep.violations.push("chain from s does not reach t".into());
    }
    rep.chain_length = path.len() - 1;
    let (lo, hi) = length_window(problem.meta.l0, problem.meta.p);
    let l = rep.chain_length as f64;
    rep.length = rep.connected && l >= lo && l <= hi;
    if rep.connected && !rep.length {
        rep.violations.push(format!("chain length {} outside the target window", rep.chain_length));
    }

    // leftover structure: rings or fragments
    let mut seen = on_path.clone();
    for start in 0..points {
        if seen[start] || (nbrs[start].is_empty() && family[start].is_none()) {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &v in &nbrs[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        let is_ring = comp.len() >= 3 && comp.iter().all(|&u| nbrs[u].len() == 2);
        if is_ring {
            rep.violations.push(format!("detached ring over points {comp:?}"));
            rep.ring_components.push(comp);
        } else {
            rep.violations.push(format!("detached fragment over points {comp:?}"));
        }
    }

    let ok = rep.occupancy && rep.ancillas && rep.degrees && rep.endpoints && rep.connected && rep.length;
    let peptide = ok.then(|| DecodedPeptide {
        families: path.iter().map(|&p| family[p].expect("chain sites are occupied")).collect(),
        length: path.len() - 1,
        path,
    });
    Ok(Decoded { peptide, report: rep })
}

/// Bits that encode `peptide` on a stage-1 registry, ancillas consistent.
pub fn encode_chain(peptide: &DecodedPeptide, registry: &VariableRegistry) -> Result<Vec<u8>> {
    let mut bits = vec![0u8; registry.total()];
    let d = registry.families();
    for (&p, &k) in peptide.path.iter().zip(&peptide.families) {
        if k >= d || p >= registry.points() {
            return Err(Error::ShapeMismatch(format!("site ({p}, {k}) outside the registry")));
        }
        bits[registry.site(p, k)] = 1;
    }
    for w in peptide.path.windows(2) {
        let bp = registry
            .bond_position(w[0], w[1])
            .ok_or_else(|| Error::InvalidPath(format!("points {} and {} are not adjacent", w[0], w[1])))?;
        bits[registry.bond(bp)] = 1;
    }
    for (bp, &(i, _)) in registry.bonds().iter().enumerate() {
        for k in 0..d {
            bits[registry.ancilla(bp, k)] = bits[registry.bond(bp)] & bits[registry.site(i, k)];
        }
    }
    Ok(bits)
}

/// Residue per position of a stage-2 assignment, or the violated positions.
pub fn decode_stage2(bits: &[u8], problem: &QuboProblem) -> Result<std::result::Result<Vec<AminoAcid>, Vec<usize>>> {
    problem.check_bits(bits)?;
    let (positions, residues) = match problem.registry.layout {
        Layout::Stage2 { positions, residues } => (positions, residues),
        _ => return Err(Error::ShapeMismatch("not a stage-2 problem".into())),
    };
    let mut seq = Vec::with_capacity(positions);
    let mut bad = Vec::new();
    for n in 0..positions {
        let on: Vec<usize> = (0..residues).filter(|&k| bits[problem.registry.site(n, k)] == 1).collect();
        if on.len() == 1 {
            seq.push(AminoAcid::from_index(on[0]).ok_or_else(|| Error::ShapeMismatch("residue index above 20".into()))?);
        } else {
            bad.push(n);
        }
    }
    Ok(if bad.is_empty() { Ok(seq) } else { Err(bad) })
}

/// Field plus non-bonded pair energy of a chain, without penalties.
pub fn energy_direct(
    peptide: &DecodedPeptide,
    lattice: &PocketLattice,
    field: &ExternalField,
    model: &InteractionModel,
) -> Result<EnergyBreakdown> {
    crate::qubo::validate_path(lattice, &peptide.path)?;
    if peptide.families.len() != peptide.path.len() || peptide.families.iter().any(|&k| k >= model.families) {
        return Err(Error::ShapeMismatch("families do not match the path or model".into()));
    }
    let mut e = EnergyBreakdown::default();
    for (&p, &k) in peptide.path.iter().zip(&peptide.families) {
        e.external += field.shifted(p, k);
    }
    let n = peptide.path.len();
    for a in 0..n {
        for b in a + 2..n {
            let r = dist(lattice.points[peptide.path[a]], lattice.points[peptide.path[b]]);
            if r <= model.cutoff {
                e.internal += model.pair_energy(peptide.families[a], peptide.families[b], r);
            }
        }
    }
    e.total = e.external + e.internal;
    Ok(e)
}

/// `n` uniform random sequences of `length` residues.
pub fn random_peptides(length: usize, n: usize, seed: u64) -> Result<Vec<Vec<AminoAcid>>> {
    if length == 0 {
        return Err(Error::InvalidParameter("peptide length must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| (0..length).map(|_| AminoAcid::ALL[rng.random_range(0..AminoAcid::ALL.len())]).collect())
        .collect())
}

pub fn sequence_string(seq: &[AminoAcid]) -> String {
    seq.iter().map(|a| a.code()).collect()
}

/// FASTA text, sequences wrapped at 60 columns.
pub fn to_fasta(records: &[(String, String)]) -> String {
    let mut out = String::new();
    for (name, seq) in records {
        out.push('>');
        out.push_str(name);
        out.push('\n');
        let bytes = seq.as_bytes();
        for chunk in bytes.chunks(60) {
            out.push_str(std::str::from_utf8(chunk).expect("ascii sequence"));
            out.push('\n');
        }
    }
    out
}

/// C-alpha records for a pose. Residue names are three-letter codes in the
/// full alphabet, or `F01`, `F02`, ... for reduced families.
pub fn pose_pdb(peptide: &DecodedPeptide, lattice: &PocketLattice, full_alphabet: bool) -> String {
    let beads: Vec<(String, [f64; 3])> = peptide
        .path
        .iter()
        .zip(&peptide.families)
        .map(|(&p, &k)| {
            let label = match (full_alphabet, AminoAcid::from_index(k)) {
                (true, Some(aa)) => aa.three_letter().to_string(),
                _ => format!("F{:02}", k + 1),
            };
            (label, lattice.points[p])
        })
        .collect();
    format_ca_records(&beads, 'P')
}
