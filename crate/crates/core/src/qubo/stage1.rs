//! Joint sequence and pose Hamiltonian on the pocket lattice.

use serde::{Deserialize, Serialize};

use super::problem::{QuboBuilder, QuboMeta, QuboProblem};
use super::registry::VariableRegistry;
use crate::chem_model::InteractionModel;
use crate::error::{Error, Result};
use crate::geometry::dist;
use crate::pocket::{ExternalField, PocketLattice};

/// How the constraint penalty `A` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "value")]
pub enum PenaltyPolicy {
    /// `10 * max |physical coefficient| * L0`, the maximum floored at 1.
    Auto,
    Fixed(f64),
}

/// How the chain-length weight `w` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "value")]
pub enum LengthWeight {
    /// `w = A`: the length is a hard constraint.
    Hard,
    /// `w = A / (L0^2 p^2)`: lengths fluctuate by about a fraction `p`.
    Soft,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage1Params {
    /// Target number of bonds.
    pub l0: usize,
    /// Relative length tolerance, used by the soft weight and by decoding.
    pub p: f64,
    pub penalty: PenaltyPolicy,
    pub length_weight: LengthWeight,
    /// Use the endpoint term with the printed negative sign.
    pub literal_signs: bool,
}

impl Stage1Params {
    pub fn new(l0: usize) -> Self {
        Stage1Params {
            l0,
            p: 0.0,
            penalty: PenaltyPolicy::Auto,
            length_weight: LengthWeight::Hard,
            literal_signs: false,
        }
    }
}

/// Energies of the six Hamiltonian terms for one assignment.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TermEnergies {
    pub external: f64,
    pub internal: f64,
    pub ancilla: f64,
    pub occupancy: f64,
    pub path: f64,
    pub length: f64,
}

impl TermEnergies {
    pub fn total(&self) -> f64 {
        self.external + self.internal + self.ancilla + self.occupancy + self.path + self.length
    }

    pub fn penalties(&self) -> f64 {
        self.ancilla + self.occupancy + self.path + self.length
    }
}

/// Non-bonded candidate pairs `(i, j, r)` with `i < j` and `0 < r <= cutoff`.
pub(crate) fn interacting_pairs(lattice: &PocketLattice, cutoff: f64) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..lattice.len() {
        for j in i + 1..lattice.len() {
            let r = dist(lattice.points[i], lattice.points[j]);
            if r > 0.0 && r <= cutoff {
                out.push((i, j, r));
            }
        }
    }
    out
}

/// Largest |coefficient| of H_ext and H_int, floored at 1.
pub fn physical_scale(lattice: &PocketLattice, field: &ExternalField, model: &InteractionModel) -> f64 {
    let d = model.families;
    let mut m: f64 = 1.0;
    for i in 0..lattice.len() {
        for k in 0..d {
            m = m.max(field.shifted(i, k).abs());
        }
    }
    for (_, _, r) in interacting_pairs(lattice, model.cutoff) {
        for k in 0..d {
            for l in 0..d {
                m = m.max(model.pair_energy(k, l, r).abs());
            }
        }
    }
    m
}

pub(crate) fn resolve_weights(params: &Stage1Params, scale: f64) -> Result<(f64, f64)> {
    let a = match params.penalty {
        PenaltyPolicy::Auto => 10.0 * scale * params.l0 as f64,
        PenaltyPolicy::Fixed(a) => a,
    };
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("penalty A must be positive, got {a}")));
    }
    let w = match params.length_weight {
        LengthWeight::Hard => a,
        LengthWeight::Soft => {
            if !(params.p > 0.0) {
                return Err(Error::InvalidParameter("soft length weight needs a tolerance p > 0".into()));
            }
            let l0 = params.l0 as f64;
            a / (l0 * l0 * params.p * params.p)
        }
        LengthWeight::Fixed(w) => w,
    };
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::InvalidParameter(format!("length weight must be non-negative, got {w}")));
    }
    Ok((a, w))
}

fn check_inputs(lattice: &PocketLattice, field: &ExternalField, model: &InteractionModel, params: &Stage1Params) -> Result<(usize, usize)> {
    if lattice.is_empty() {
        return Err(Error::EmptyLattice);
    }
    let (s, t) = lattice.endpoints()?;
    if params.l0 == 0 {
        return Err(Error::InvalidParameter("target length L0 must be at least 1".into()));
    }
    if !(params.p >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance p must be non-negative, got {}", params.p)));
    }
    if field.energy.len() != lattice.len() || field.families() != model.families {
        return Err(Error::ShapeMismatch(format!(
            "field is {}x{}, lattice has {} points and model {} families",
            field.energy.len(),
            field.families(),
            lattice.len(),
            model.families
        )));
    }
    Ok((s, t))
}

pub fn build_stage1_qubo(
    lattice: &PocketLattice,
    field: &ExternalField,
    model: &InteractionModel,
    params: &Stage1Params,
) -> Result<QuboProblem> {
    let (s, t) = check_inputs(lattice, field, model, params)?;
    let d = model.families;
    let n = lattice.len();
    let reg = VariableRegistry::stage1(n, d, &lattice.adjacency);
    let (a, w) = resolve_weights(params, physical_scale(lattice, field, model))?;
    let mut b = QuboBuilder::new(reg.total());

    // external field
    for i in 0..n {
        for k in 0..d {
            b.add_linear(reg.site(i, k), field.shifted(i, k));
        }
    }

    // intra-chain pairs; the ancilla removes the bonded contribution
    for (i, j, r) in interacting_pairs(lattice, model.cutoff) {
        let bond = reg.bond_position(i, j);
        for k in 0..d {
            for l in 0..d {
                let u = model.pair_energy(k, l, r);
                if u == 0.0 {
                    continue;
                }
                b.add_quadratic(reg.site(i, k), reg.site(j, l), u);
                if let Some(bp) = bond {
                    b.add_quadratic(reg.ancilla(bp, k), reg.site(j, l), -u);
                }
            }
        }
    }

    // ancilla = site AND bond
    for (bp, &(i, _)) in lattice.adjacency.iter().enumerate() {
        let q_b = reg.bond(bp);
        for k in 0..d {
            let x = reg.site(i, k);
            let anc = reg.ancilla(bp, k);
            b.add_linear(anc, 3.0 * a);
            b.add_quadratic(x, q_b, a);
            b.add_quadratic(x, anc, -2.0 * a);
            b.add_quadratic(q_b, anc, -2.0 * a);
        }
    }

    // at most one family per site (ordered pairs k != l)
    for i in 0..n {
        for k in 0..d {
            for l in k + 1..d {
                b.add_quadratic(reg.site(i, k), reg.site(i, l), 2.0 * a);
            }
        }
    }

    // path topology
    let incident = incident_bonds(lattice);
    let endpoint_sign = if params.literal_signs { -1.0 } else { 1.0 };
    for i in 0..n {
        let sites: Vec<(usize, f64)> = (0..d).map(|k| (reg.site(i, k), 1.0)).collect();
        if i == s || i == t {
            b.add_squared(1.0, &sites.iter().map(|&(v, c)| (v, -c)).collect::<Vec<_>>(), endpoint_sign * a);
            let mut deg = sites.clone();
            deg.extend(incident[i].iter().map(|&bp| (reg.bond(bp), -1.0)));
            b.add_squared(0.0, &deg, a);
        } else {
            let mut deg: Vec<(usize, f64)> = sites.iter().map(|&(v, _)| (v, 2.0)).collect();
            deg.extend(incident[i].iter().map(|&bp| (reg.bond(bp), -1.0)));
            b.add_squared(0.0, &deg, a);
        }
    }

    // chain length
    let bonds: Vec<(usize, f64)> = (0..lattice.num_bonds()).map(|bp| (reg.bond(bp), -1.0)).collect();
    b.add_squared(params.l0 as f64, &bonds, w);

    let meta = QuboMeta {
        stage: 1,
        a,
        w,
        l0: params.l0,
        p: params.p,
        families: d,
        dims: lattice.dims,
        literal_signs: params.literal_signs,
        s: Some(s),
        t: Some(t),
        path: None,
    };
    b.finish(reg, meta)
}

/// Bond positions touching each point.
pub(crate) fn incident_bonds(lattice: &PocketLattice) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); lattice.len()];
    for (bp, &(i, j)) in lattice.adjacency.iter().enumerate() {
        out[i].push(bp);
        out[j].push(bp);
    }
    out
}

/// Evaluates each term directly from the meaning of the bits.
pub fn stage1_terms(
    bits: &[u8],
    lattice: &PocketLattice,
    field: &ExternalField,
    model: &InteractionModel,
    meta: &QuboMeta,
) -> Result<TermEnergies> {
    let d = model.families;
    let n = lattice.len();
    let reg = VariableRegistry::stage1(n, d, &lattice.adjacency);
    if bits.len() != reg.total() {
        return Err(Error::ShapeMismatch(format!("{} bits for {} variables", bits.len(), reg.total())));
    }
    let (s, t) = (meta.s.unwrap_or(usize::MAX), meta.t.unwrap_or(usize::MAX));
    let q = |v: usize| bits[v] as f64;
    let mut e = TermEnergies::default();
    for i in 0..n {
        for k in 0..d {
            e.external += field.shifted(i, k) * q(reg.site(i, k));
        }
    }
    for (i, j, r) in interacting_pairs(lattice, model.cutoff) {
        let bond = reg.bond_position(i, j);
        for k in 0..d {
            let xi = q(reg.site(i, k)) - bond.map_or(0.0, |bp| q(reg.ancilla(bp, k)));
            for l in 0..d {
                e.internal += model.pair_energy(k, l, r) * xi * q(reg.site(j, l));
            }
        }
    }
    for (bp, &(i, _)) in lattice.adjacency.iter().enumerate() {
        for k in 0..d {
            let (x, y, an) = (q(reg.site(i, k)), q(reg.bond(bp)), q(reg.ancilla(bp, k)));
            e.ancilla += meta.a * (3.0 * an + x * y - 2.0 * x * an - 2.0 * y * an);
        }
    }
    let incident = incident_bonds(lattice);
    let sign = if meta.literal_signs { -1.0 } else { 1.0 };
    for i in 0..n {
        let occ: f64 = (0..d).map(|k| q(reg.site(i, k))).sum();
        let deg: f64 = incident[i].iter().map(|&bp| q(reg.bond(bp))).sum();
        let pairs: f64 = (0..d)
            .flat_map(|k| (0..d).filter(move |&l| l != k).map(move |l| (k, l)))
            .map(|(k, l)| q(reg.site(i, k)) * q(reg.site(i, l)))
            .sum();
        e.occupancy += meta.a * pairs;
        if i == s || i == t {
            e.path += meta.a * (sign * (1.0 - occ).powi(2) + (occ - deg).powi(2));
        } else {
            e.path += meta.a * (2.0 * occ - deg).powi(2);
        }
    }
    let total_bonds: f64 = (0..lattice.num_bonds()).map(|bp| q(reg.bond(bp))).sum();
    e.length = meta.w * (meta.l0 as f64 - total_bonds).powi(2);
    Ok(e)
}
