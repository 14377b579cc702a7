use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Csr, SolveResult, SolverKind};
use crate::error::{Error, Result};
use crate::qubo::QuboProblem;

pub const DEFAULT_SWEEPS: usize = 100_000;

/// Geometric cooling schedule for single-flip Metropolis annealing.
///
/// Unset temperatures default to `T_hot = max |coefficient|` and
/// `T_cold = 1e-3 * median |nonzero coefficient|`. Setting both to 0 gives a
/// greedy descent that accepts only non-increasing moves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub sweeps: usize,
    #[serde(default)]
    pub t_hot: Option<f64>,
    #[serde(default)]
    pub t_cold: Option<f64>,
    pub seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            sweeps: DEFAULT_SWEEPS,
            t_hot: None,
            t_cold: None,
            seed: 0,
        }
    }
}

impl AnnealSchedule {
    pub fn with_sweeps(sweeps: usize, seed: u64) -> Self {
        AnnealSchedule {
            sweeps,
            seed,
            ..Default::default()
        }
    }

    pub fn greedy(sweeps: usize, seed: u64) -> Self {
        AnnealSchedule {
            sweeps,
            t_hot: Some(0.0),
            t_cold: Some(0.0),
            seed,
        }
    }

    /// Resolved `(T_hot, T_cold)` for a problem.
    pub fn temperatures(&self, problem: &QuboProblem) -> Result<(f64, f64)> {
        let mut mags: Vec<f64> = problem
            .linear
            .iter()
            .copied()
            .chain(problem.quadratic.iter().map(|&(_, _, c)| c))
            .filter(|c| *c != 0.0)
            .map(f64::abs)
            .collect();
        mags.sort_unstable_by(f64::total_cmp);
        let max = mags.last().copied().unwrap_or(1.0);
        let median = if mags.is_empty() { 1.0 } else { mags[mags.len() / 2] };
        let hot = self.t_hot.unwrap_or(max);
        let cold = self.t_cold.unwrap_or((1e-3 * median).min(hot));
        if !(hot >= 0.0 && cold >= 0.0 && cold <= hot) || !hot.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "temperatures must satisfy 0 <= T_cold <= T_hot, got {cold} and {hot}"
            )));
        }
        if cold == 0.0 && hot > 0.0 {
            return Err(Error::InvalidParameter("geometric cooling needs T_cold > 0 unless T_hot = 0".into()));
        }
        Ok((hot, cold))
    }

    /// Temperature used during `sweep` (0-based).
    pub fn temperature_at(hot: f64, cold: f64, sweep: usize, sweeps: usize) -> f64 {
        if sweeps <= 1 || hot == cold {
            return cold;
        }
        hot * (cold / hot).powf(sweep as f64 / (sweeps - 1) as f64)
    }
}

/// Simulated annealing from a uniformly random start.
pub fn solve_sa(problem: &QuboProblem, schedule: &AnnealSchedule) -> Result<SolveResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let start: Vec<u8> = (0..problem.num_vars()).map(|_| rng.random_range(0..2u8)).collect();
    anneal(problem, schedule, start, rng)
}

/// Simulated annealing from a given assignment.
pub fn solve_sa_from(problem: &QuboProblem, schedule: &AnnealSchedule, initial: &[u8]) -> Result<SolveResult> {
    problem.check_bits(initial)?;
    anneal(problem, schedule, initial.to_vec(), ChaCha8Rng::seed_from_u64(schedule.seed))
}

fn anneal(problem: &QuboProblem, schedule: &AnnealSchedule, mut bits: Vec<u8>, mut rng: ChaCha8Rng) -> Result<SolveResult> {
    let (hot, cold) = schedule.temperatures(problem)?;
    let started = Instant::now();
    let n = problem.num_vars();
    let csr = Csr::new(problem);
    // field[i]: energy change from switching variable i on
    let mut field = problem.linear.clone();
    for i in 0..n {
        if bits[i] == 1 {
            for &(j, c) in csr.row(i) {
                field[j] += c;
            }
        }
    }
    let mut energy = problem.energy(&bits);
    let mut best = energy;
    let mut best_bits = bits.clone();
    for sweep in 0..schedule.sweeps {
        let t = AnnealSchedule::temperature_at(hot, cold, sweep, schedule.sweeps);
        let beta = if t > 0.0 { 1.0 / t } else { f64::INFINITY };
        for i in 0..n {
            let on = bits[i] == 1;
            let delta = if on { -field[i] } else { field[i] };
            let accept = delta <= 0.0 || (beta.is_finite() && rng.random::<f64>() < (-delta * beta).exp());
            if !accept {
                continue;
            }
            bits[i] ^= 1;
            energy += delta;
            let sign = if on { -1.0 } else { 1.0 };
            for &(j, c) in csr.row(i) {
                field[j] += sign * c;
            }
        }
        if energy < best {
            best = energy;
            best_bits.copy_from_slice(&bits);
        }
    }
    Ok(SolveResult {
        energy: problem.energy(&best_bits),
        bits: best_bits,
        solver: SolverKind::Sa,
        wall_time: started.elapsed().as_secs_f64(),
        restart_id: 0,
        seed: Some(schedule.seed),
    })
}
