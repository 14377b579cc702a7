//! Exact and annealing solvers, restart campaigns.

mod anneal;
mod exact;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qubo::QuboProblem;

pub use crate::qubo::{export_problem, import_problem, AnyProblem};
pub use anneal::{solve_sa, solve_sa_from, AnnealSchedule, DEFAULT_SWEEPS};
pub use exact::{solve_exact, DEFAULT_MAX_VARS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Sa,
}

impl std::str::FromStr for SolverKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(SolverKind::Exact),
            "sa" | "anneal" => Ok(SolverKind::Sa),
            other => Err(crate::Error::InvalidParameter(format!("unknown solver {other:?}"))),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Exact => "exact",
            SolverKind::Sa => "sa",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub bits: Vec<u8>,
    /// Objective of `bits`, re-evaluated on the problem.
    pub energy: f64,
    pub solver: SolverKind,
    /// Seconds. Not serialized, so archives stay reproducible.
    #[serde(skip)]
    pub wall_time: f64,
    pub restart_id: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

// wall_time is a measurement, not part of the result's identity
impl PartialEq for SolveResult {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits
            && self.energy == other.energy
            && self.solver == other.solver
            && self.restart_id == other.restart_id
            && self.seed == other.seed
    }
}

/// Solver choice and settings for restart campaigns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub sweeps: usize,
    #[serde(default)]
    pub t_hot: Option<f64>,
    #[serde(default)]
    pub t_cold: Option<f64>,
    pub max_exact_vars: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            kind: SolverKind::Sa,
            sweeps: DEFAULT_SWEEPS,
            t_hot: None,
            t_cold: None,
            max_exact_vars: DEFAULT_MAX_VARS,
        }
    }
}

/// Seed for restart `i`: a splitmix64 step, distinct for distinct `i`.
pub fn derive_seed(base: u64, i: usize) -> u64 {
    let mut z = base.wrapping_add((i as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `n` independent runs in parallel, returned in restart order.
pub fn run_restarts(problem: &QuboProblem, config: &SolverConfig, n: usize, base_seed: u64) -> Result<Vec<SolveResult>> {
    if n == 0 {
        return Err(crate::Error::InvalidParameter("at least one restart is required".into()));
    }
    (0..n)
        .into_par_iter()
        .map(|id| {
            let seed = derive_seed(base_seed, id);
            let mut r = match config.kind {
                SolverKind::Exact => solve_exact(problem, config.max_exact_vars)?,
                SolverKind::Sa => solve_sa(
                    problem,
                    &AnnealSchedule {
                        sweeps: config.sweeps,
                        t_hot: config.t_hot,
                        t_cold: config.t_cold,
                        seed,
                    },
                )?,
            };
            r.restart_id = id;
            Ok(r)
        })
        .collect()
}

/// Sparse symmetric adjacency in compressed rows.
pub(crate) struct Csr {
    starts: Vec<usize>,
    entries: Vec<(usize, f64)>,
}

impl Csr {
    pub(crate) fn new(problem: &QuboProblem) -> Self {
        let n = problem.num_vars();
        let mut degree = vec![0usize; n + 1];
        for &(i, j, _) in &problem.quadratic {
            degree[i + 1] += 1;
            degree[j + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let mut fill = degree.clone();
        let mut entries = vec![(0, 0.0); degree[n]];
        for &(i, j, c) in &problem.quadratic {
            entries[fill[i]] = (j, c);
            fill[i] += 1;
            entries[fill[j]] = (i, c);
            fill[j] += 1;
        }
        Csr { starts: degree, entries }
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.entries[self.starts[i]..self.starts[i + 1]]
    }
}
