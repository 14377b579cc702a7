//! Sequence-only refinement on a frozen lattice path.

use super::problem::{QuboBuilder, QuboMeta, QuboProblem};
use super::registry::VariableRegistry;
use crate::chem_model::InteractionModel;
use crate::error::{Error, Result};
use crate::geometry::dist;
use crate::pocket::{ExternalField, PocketLattice};

/// Checks that `path` is a self-avoiding chain of adjacent lattice points.
pub fn validate_path(lattice: &PocketLattice, path: &[usize]) -> Result<()> {
    if path.is_empty() {
        return Err(Error::InvalidPath("empty path".into()));
    }
    let mut seen = vec![false; lattice.len()];
    for &p in path {
        if p >= lattice.len() {
            return Err(Error::InvalidPath(format!("point {p} is outside the lattice")));
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPath(format!("point {p} is visited twice")));
        }
    }
    for w in path.windows(2) {
        if !lattice.are_adjacent(w[0], w[1]) {
            return Err(Error::InvalidPath(format!("points {} and {} are not adjacent", w[0], w[1])));
        }
    }
    Ok(())
}

/// Residue-type QUBO for a fixed geometry: external field, non-bonded
/// pairs (`|n - m| > 1`) and an exactly-one constraint per position.
///
/// With `penalty = None`, `A = 10 * max |physical coefficient| * positions`.
pub fn build_stage2_qubo(
    lattice: &PocketLattice,
    path: &[usize],
    field: &ExternalField,
    model: &InteractionModel,
    penalty: Option<f64>,
) -> Result<QuboProblem> {
    validate_path(lattice, path)?;
    let d = model.families;
    if field.energy.len() != lattice.len() || field.families() != d {
        return Err(Error::ShapeMismatch("field does not match lattice and model".into()));
    }
    let len = path.len();
    let reg = VariableRegistry::stage2(len, d);
    let mut pairs = Vec::new();
    for n in 0..len {
        for m in n + 2..len {
            let r = dist(lattice.points[path[n]], lattice.points[path[m]]);
            if r <= model.cutoff {
                pairs.push((n, m, r));
            }
        }
    }
    let mut scale: f64 = 1.0;
    for &p in path {
        for k in 0..d {
            scale = scale.max(field.shifted(p, k).abs());
        }
    }
    for &(_, _, r) in &pairs {
        for k in 0..d {
            for l in 0..d {
                scale = scale.max(model.pair_energy(k, l, r).abs());
            }
        }
    }
    let a = penalty.unwrap_or(10.0 * scale * len as f64);
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("penalty A must be positive, got {a}")));
    }

    let mut b = QuboBuilder::new(reg.total());
    for (n, &p) in path.iter().enumerate() {
        for k in 0..d {
            b.add_linear(reg.site(n, k), field.shifted(p, k));
        }
    }
    for &(n, m, r) in &pairs {
        for k in 0..d {
            for l in 0..d {
                let u = model.pair_energy(k, l, r);
                if u != 0.0 {
                    b.add_quadratic(reg.site(n, k), reg.site(m, l), u);
                }
            }
        }
    }
    for n in 0..len {
        let terms: Vec<(usize, f64)> = (0..d).map(|k| (reg.site(n, k), -1.0)).collect();
        b.add_squared(1.0, &terms, a);
    }
    let meta = QuboMeta {
        stage: 2,
        a,
        w: 0.0,
        l0: len - 1,
        p: 0.0,
        families: d,
        dims: lattice.dims,
        literal_signs: false,
        s: path.first().copied(),
        t: path.last().copied(),
        path: Some(path.to_vec()),
    };
    b.finish(reg, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem_model::{ModelParams, RawTables};

    fn setup() -> (PocketLattice, ExternalField, InteractionModel) {
        let model = InteractionModel::full(&RawTables::builtin(), &ModelParams::default()).unwrap();
        let l = PocketLattice::box_lattice([2, 2, 3], 3.8).unwrap();
        let mut f = ExternalField::zeros(l.len(), 20);
        for (i, row) in f.energy.iter_mut().enumerate() {
            for (k, e) in row.iter_mut().enumerate() {
                *e = ((i * 7 + k * 3) % 11) as f64 * 0.1 - 0.5;
            }
        }
        (l, f, model)
    }

    #[test]
    fn single_position_is_linear() {
        let (l, f, m) = setup();
        let p = build_stage2_qubo(&l, &[3], &f, &m, None).unwrap();
        assert_eq!(p.num_vars(), 20);
        // only the exactly-one couplings remain
        assert!(p.quadratic.iter().all(|&(_, _, c)| (c - 2.0 * p.meta.a).abs() < 1e-9));
        assert_eq!(p.quadratic.len(), 190);
    }

    #[test]
    fn bonded_pair_has_no_interaction() {
        let (l, f, m) = setup();
        let p = build_stage2_qubo(&l, &[0, 1], &f, &m, Some(100.0)).unwrap();
        for &(i, j, c) in &p.quadratic {
            assert_eq!(i / 20, j / 20, "cross-position coupling {i}-{j}");
            assert_eq!(c, 200.0);
        }
    }

    #[test]
    fn ten_positions_and_energy() {
        let (l, f, m) = setup();
        // snake through the 2x2x3 box
        let path = [0, 1, 2, 5, 4, 3, 9, 10, 11, 8];
        validate_path(&l, &path).unwrap();
        let p = build_stage2_qubo(&l, &path, &f, &m, None).unwrap();
        assert_eq!(p.num_vars(), 200);
        let seq = [3usize, 9, 0, 17, 4, 4, 12, 19, 1, 7];
        let mut bits = vec![0u8; 200];
        for (n, &k) in seq.iter().enumerate() {
            bits[n * 20 + k] = 1;
        }
        let mut want = 0.0;
        for n in 0..10 {
            want += f.shifted(path[n], seq[n]);
            for mm in n + 2..10 {
                let r = dist(l.points[path[n]], l.points[path[mm]]);
                want += m.pair_energy(seq[n], seq[mm], r);
            }
        }
        assert!((p.energy(&bits) - want).abs() < 1e-9);
    }

    #[test]
    fn invalid_paths() {
        let (l, f, m) = setup();
        assert!(matches!(build_stage2_qubo(&l, &[], &f, &m, None), Err(Error::InvalidPath(_))));
        assert!(validate_path(&l, &[0, 4]).is_err());
        assert!(validate_path(&l, &[0, 1, 0]).is_err());
        assert!(validate_path(&l, &[0, 99]).is_err());
    }
}
