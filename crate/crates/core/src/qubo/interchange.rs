//! JSON interchange format for handing problems to external solvers.
//!
//! ```text
//! { "kind": "qubo" | "ising", "num_vars": N,
//!   "var_labels": [{"type": "site", "point": 0, "family": 1}, ...],
//!   "linear": [[i, v], ...], "quadratic": [[i, j, v], ...],
//!   "offset": c, "meta": {"A": .., "w": .., "L0": .., "p": .., "D": .., "dims": [..], ...} }
//! ```
//!
//! For `ising`, `linear` holds the fields `h` and `quadratic` the couplings
//! `J`. Only nonzero linear entries are written.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ising::IsingProblem;
use super::problem::{QuboMeta, QuboProblem};
use super::registry::{VarLabel, VariableRegistry};
use crate::error::{read_to_string, write_string, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Qubo,
    Ising,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Interchange {
    kind: ProblemKind,
    num_vars: usize,
    var_labels: Vec<VarLabel>,
    linear: Vec<(usize, f64)>,
    quadratic: Vec<(usize, usize, f64)>,
    offset: f64,
    meta: QuboMeta,
}

/// A problem in either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyProblem {
    Qubo(QuboProblem),
    Ising(IsingProblem),
}

fn sparse(v: &[f64]) -> Vec<(usize, f64)> {
    v.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(i, &c)| (i, c)).collect()
}

fn dense(n: usize, entries: &[(usize, f64)]) -> Result<Vec<f64>> {
    let mut v = vec![0.0; n];
    for &(i, c) in entries {
        if i >= n {
            return Err(Error::ShapeMismatch(format!("linear index {i} out of range for {n} variables")));
        }
        v[i] += c;
    }
    Ok(v)
}

pub fn qubo_to_json(p: &QuboProblem) -> Result<String> {
    let doc = Interchange {
        kind: ProblemKind::Qubo,
        num_vars: p.num_vars(),
        var_labels: p.registry.labels().to_vec(),
        linear: sparse(&p.linear),
        quadratic: p.quadratic.clone(),
        offset: p.offset,
        meta: p.meta.clone(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn ising_to_json(p: &IsingProblem) -> Result<String> {
    let doc = Interchange {
        kind: ProblemKind::Ising,
        num_vars: p.num_vars(),
        var_labels: p.labels.clone(),
        linear: sparse(&p.h),
        quadratic: p.j.clone(),
        offset: p.offset,
        meta: p.meta.clone(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn problem_from_json(text: &str) -> Result<AnyProblem> {
    let doc: Interchange = serde_json::from_str(text)?;
    if doc.var_labels.len() != doc.num_vars {
        return Err(Error::ShapeMismatch(format!("{} labels for {} variables", doc.var_labels.len(), doc.num_vars)));
    }
    let linear = dense(doc.num_vars, &doc.linear)?;
    match doc.kind {
        ProblemKind::Qubo => {
            let p = QuboProblem {
                registry: VariableRegistry::from_labels(doc.var_labels),
                linear,
                quadratic: doc.quadratic,
                offset: doc.offset,
                meta: doc.meta,
            };
            p.validate()?;
            Ok(AnyProblem::Qubo(p))
        }
        ProblemKind::Ising => {
            if doc.quadratic.iter().any(|&(i, j, _)| i >= j || j >= doc.num_vars) {
                return Err(Error::ShapeMismatch("coupling indices out of range".into()));
            }
            Ok(AnyProblem::Ising(IsingProblem {
                h: linear,
                j: doc.quadratic,
                offset: doc.offset,
                labels: doc.var_labels,
                meta: doc.meta,
            }))
        }
    }
}

pub fn export_problem(problem: &AnyProblem, path: &Path) -> Result<()> {
    let text = match problem {
        AnyProblem::Qubo(q) => qubo_to_json(q)?,
        AnyProblem::Ising(i) => ising_to_json(i)?,
    };
    write_string(path, &text)
}

pub fn import_problem(path: &Path) -> Result<AnyProblem> {
    problem_from_json(&read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{to_ising, QuboBuilder};

    fn sample() -> QuboProblem {
        let mut b = QuboBuilder::new(3);
        b.add_linear(0, 0.1 + 0.2);
        b.add_linear(2, -1.0 / 3.0);
        b.add_quadratic(0, 2, std::f64::consts::PI);
        b.add_offset(1e-17);
        b.finish(VariableRegistry::stage2(1, 3), QuboMeta::default()).unwrap()
    }

    #[test]
    fn qubo_round_trip_is_exact() {
        let p = sample();
        let back = problem_from_json(&qubo_to_json(&p).unwrap()).unwrap();
        assert_eq!(back, AnyProblem::Qubo(p));
    }

    #[test]
    fn ising_round_trip_is_exact() {
        let i = to_ising(&sample());
        let back = problem_from_json(&ising_to_json(&i).unwrap()).unwrap();
        assert_eq!(back, AnyProblem::Ising(i));
    }

    #[test]
    fn malformed_documents_rejected() {
        let mut doc: serde_json::Value = serde_json::from_str(&qubo_to_json(&sample()).unwrap()).unwrap();
        doc["num_vars"] = 5.into();
        assert!(problem_from_json(&doc.to_string()).is_err());
        let mut doc: serde_json::Value = serde_json::from_str(&qubo_to_json(&sample()).unwrap()).unwrap();
        doc["quadratic"] = serde_json::json!([[2, 0, 1.0]]);
        assert!(problem_from_json(&doc.to_string()).is_err());
        assert!(problem_from_json("{").is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/problem.json");
        let p = AnyProblem::Qubo(sample());
        export_problem(&p, &path).unwrap();
        assert_eq!(import_problem(&path).unwrap(), p);
    }
}
