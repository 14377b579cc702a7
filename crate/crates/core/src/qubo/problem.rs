use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::registry::VariableRegistry;
use crate::error::{Error, Result};

/// Construction parameters carried alongside the coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QuboMeta {
    /// 1 for the joint sequence/pose problem, 2 for the frozen-geometry one.
    #[serde(default)]
    pub stage: u8,
    #[serde(rename = "A", default)]
    pub a: f64,
    #[serde(default)]
    pub w: f64,
    #[serde(rename = "L0", default)]
    pub l0: usize,
    #[serde(default)]
    pub p: f64,
    #[serde(rename = "D", default)]
    pub families: usize,
    #[serde(default)]
    pub dims: [usize; 3],
    #[serde(default)]
    pub literal_signs: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    /// Frozen lattice path of a stage-2 problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<usize>>,
}

/// `E(q) = offset + sum_i linear[i] q_i + sum_{i<j} Q_ij q_i q_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboProblem {
    pub registry: VariableRegistry,
    /// Dense linear coefficients, one per variable.
    pub linear: Vec<f64>,
    /// Sorted `(i, j, c)` with `i < j` and no duplicates.
    pub quadratic: Vec<(usize, usize, f64)>,
    pub offset: f64,
    pub meta: QuboMeta,
}

impl QuboProblem {
    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn energy(&self, bits: &[u8]) -> f64 {
        debug_assert_eq!(bits.len(), self.num_vars());
        let mut e = self.offset;
        for (c, &b) in self.linear.iter().zip(bits) {
            if b != 0 {
                e += c;
            }
        }
        for &(i, j, c) in &self.quadratic {
            if bits[i] != 0 && bits[j] != 0 {
                e += c;
            }
        }
        e
    }

    pub fn check_bits(&self, bits: &[u8]) -> Result<()> {
        if bits.len() != self.num_vars() {
            return Err(Error::ShapeMismatch(format!(
                "assignment has {} bits, problem has {} variables",
                bits.len(),
                self.num_vars()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::ShapeMismatch("assignment bits must be 0 or 1".into()));
        }
        Ok(())
    }

    /// Largest absolute coefficient (linear or quadratic).
    pub fn max_abs_coefficient(&self) -> f64 {
        let l = self.linear.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        self.quadratic.iter().fold(l, |m, &(_, _, c)| m.max(c.abs()))
    }

    /// Adjacency lists `(neighbour, coefficient)` for local-field updates.
    pub fn neighbor_lists(&self) -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![Vec::new(); self.num_vars()];
        for &(i, j, c) in &self.quadratic {
            out[i].push((j, c));
            out[j].push((i, c));
        }
        out
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.registry.total() != n {
            return Err(Error::ShapeMismatch(format!("{} labels for {n} variables", self.registry.total())));
        }
        if !self.offset.is_finite() || self.linear.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite coefficient".into()));
        }
        let mut prev = None;
        for &(i, j, c) in &self.quadratic {
            if i >= j || j >= n || !c.is_finite() {
                return Err(Error::Domain(format!("invalid quadratic entry ({i}, {j}, {c})")));
            }
            if prev.is_some_and(|p| p >= (i, j)) {
                return Err(Error::Domain("quadratic entries must be sorted and unique".into()));
            }
            prev = Some((i, j));
        }
        Ok(())
    }
}

/// Accumulates QUBO coefficients. `q_i * q_i` folds into the linear term.
#[derive(Debug, Clone)]
pub struct QuboBuilder {
    linear: Vec<f64>,
    quadratic: HashMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboBuilder {
    pub fn new(num_vars: usize) -> Self {
        QuboBuilder {
            linear: vec![0.0; num_vars],
            quadratic: HashMap::new(),
            offset: 0.0,
        }
    }

    #[inline]
    pub fn add_offset(&mut self, c: f64) {
        self.offset += c;
    }

    #[inline]
    pub fn add_linear(&mut self, i: usize, c: f64) {
        self.linear[i] += c;
    }

    #[inline]
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) {
        if i == j {
            self.linear[i] += c;
        } else {
            *self.quadratic.entry((i.min(j), i.max(j))).or_insert(0.0) += c;
        }
    }

    /// Adds `scale * (constant + sum_t c_t q_t)^2`.
    pub fn add_squared(&mut self, constant: f64, terms: &[(usize, f64)], scale: f64) {
        self.offset += scale * constant * constant;
        for (a, &(i, ci)) in terms.iter().enumerate() {
            // q^2 = q
            self.linear[i] += scale * (2.0 * constant * ci + ci * ci);
            for &(j, cj) in &terms[a + 1..] {
                self.add_quadratic(i, j, 2.0 * scale * ci * cj);
            }
        }
    }

    pub fn finish(self, registry: VariableRegistry, meta: QuboMeta) -> Result<QuboProblem> {
        let mut quadratic: Vec<(usize, usize, f64)> = self
            .quadratic
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|((i, j), c)| (i, j, c))
            .collect();
        quadratic.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let problem = QuboProblem {
            registry,
            linear: self.linear,
            quadratic,
            offset: self.offset,
            meta,
        };
        problem.validate()?;
        Ok(problem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic(n: usize) -> VariableRegistry {
        VariableRegistry::from_labels(
            (0..n)
                .map(|i| super::super::VarLabel::Residue { position: 0, residue: i })
                .collect(),
        )
    }

    #[test]
    fn squared_form_matches_direct_expansion() {
        let terms = [(0, 1.0), (1, -2.0), (2, 1.0), (0, 0.5)];
        let mut b = QuboBuilder::new(3);
        b.add_squared(-1.5, &terms, 2.0);
        let p = b.finish(generic(3), QuboMeta::default()).unwrap();
        for x in 0..8u8 {
            let bits = [x & 1, (x >> 1) & 1, (x >> 2) & 1];
            let lin: f64 = -1.5 + terms.iter().map(|&(i, c)| c * bits[i] as f64).sum::<f64>();
            assert!((p.energy(&bits) - 2.0 * lin * lin).abs() < 1e-12);
        }
    }

    #[test]
    fn cancelled_couplings_are_dropped() {
        let mut b = QuboBuilder::new(2);
        b.add_quadratic(1, 0, 2.0);
        b.add_quadratic(0, 1, -2.0);
        let p = b.finish(generic(2), QuboMeta::default()).unwrap();
        assert!(p.quadratic.is_empty());
        assert!(p.check_bits(&[0, 2]).is_err());
        assert!(p.check_bits(&[0]).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        let mut b = QuboBuilder::new(1);
        b.add_linear(0, f64::NAN);
        assert!(b.finish(generic(1), QuboMeta::default()).is_err());
    }
}
