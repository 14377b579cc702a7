use serde::{Deserialize, Serialize};

use super::problem::{QuboBuilder, QuboMeta, QuboProblem};
use super::registry::{VarLabel, VariableRegistry};

/// `E(s) = offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j` over spins `±1`,
/// with `q = (s + 1) / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingProblem {
    pub h: Vec<f64>,
    pub j: Vec<(usize, usize, f64)>,
    pub offset: f64,
    pub labels: Vec<VarLabel>,
    pub meta: QuboMeta,
}

impl IsingProblem {
    pub fn num_vars(&self) -> usize {
        self.h.len()
    }

    pub fn energy(&self, spins: &[i8]) -> f64 {
        let mut e = self.offset;
        for (h, &s) in self.h.iter().zip(spins) {
            e += h * s as f64;
        }
        for &(a, b, c) in &self.j {
            e += c * (spins[a] * spins[b]) as f64;
        }
        e
    }
}

pub fn bits_to_spins(bits: &[u8]) -> Vec<i8> {
    bits.iter().map(|&b| if b != 0 { 1 } else { -1 }).collect()
}

pub fn spins_to_bits(spins: &[i8]) -> Vec<u8> {
    spins.iter().map(|&s| u8::from(s > 0)).collect()
}

pub fn to_ising(q: &QuboProblem) -> IsingProblem {
    let mut h = vec![0.0; q.num_vars()];
    let mut offset = q.offset;
    for (i, &c) in q.linear.iter().enumerate() {
        h[i] += c / 2.0;
        offset += c / 2.0;
    }
    let mut j = Vec::with_capacity(q.quadratic.len());
    for &(a, b, c) in &q.quadratic {
        j.push((a, b, c / 4.0));
        h[a] += c / 4.0;
        h[b] += c / 4.0;
        offset += c / 4.0;
    }
    IsingProblem {
        h,
        j,
        offset,
        labels: q.registry.labels().to_vec(),
        meta: q.meta.clone(),
    }
}

/// Inverse of [`to_ising`], substituting `s = 2q - 1`.
pub fn ising_to_qubo(p: &IsingProblem) -> crate::error::Result<QuboProblem> {
    let mut b = QuboBuilder::new(p.num_vars());
    b.add_offset(p.offset);
    for (i, &h) in p.h.iter().enumerate() {
        b.add_linear(i, 2.0 * h);
        b.add_offset(-h);
    }
    for &(a, c, j) in &p.j {
        b.add_quadratic(a, c, 4.0 * j);
        b.add_linear(a, -2.0 * j);
        b.add_linear(c, -2.0 * j);
        b.add_offset(j);
    }
    b.finish(VariableRegistry::from_labels(p.labels.clone()), p.meta.clone())
}
