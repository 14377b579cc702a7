use std::time::Instant;

use super::{Csr, SolveResult, SolverKind};
use crate::error::{Error, Result};
use crate::qubo::QuboProblem;

/// Enumeration limit used when none is given.
pub const DEFAULT_MAX_VARS: usize = 24;

/// Global minimum by Gray-code enumeration of all `2^n` assignments.
///
/// Energies within `1e-9 * max(1, |best|)` count as ties and resolve to the
/// lexicographically smallest bit vector (variable 0 most significant).
pub fn solve_exact(problem: &QuboProblem, max_vars: usize) -> Result<SolveResult> {
    let n = problem.num_vars();
    let limit = max_vars.min(63);
    if n > limit {
        return Err(Error::TooManyVariables { vars: n, limit });
    }
    let start = Instant::now();
    let csr = Csr::new(problem);
    let mut field = problem.linear.clone();
    let mut state = 0u64;
    let mut energy = problem.offset;
    // key reverses bit order so integer order is lexicographic order
    let key = |s: u64| if n == 0 { 0 } else { s.reverse_bits() >> (64 - n) };
    let mut best_state = 0u64;
    let mut best_key = 0u64;
    let mut best = energy;
    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        let on = state >> i & 1 == 1;
        let delta = if on { -field[i] } else { field[i] };
        energy += delta;
        state ^= 1 << i;
        let sign = if on { -1.0 } else { 1.0 };
        for &(j, c) in csr.row(i) {
            field[j] += sign * c;
        }
        let tol = 1e-9 * best.abs().max(1.0);
        if energy < best - tol {
            best = energy;
            best_state = state;
            best_key = key(state);
        } else if energy <= best + tol {
            let k = key(state);
            if k < best_key {
                best = best.min(energy);
                best_state = state;
                best_key = k;
            }
        }
    }
    let bits: Vec<u8> = (0..n).map(|i| (best_state >> i & 1) as u8).collect();
    Ok(SolveResult {
        energy: problem.energy(&bits),
        bits,
        solver: SolverKind::Exact,
        wall_time: start.elapsed().as_secs_f64(),
        restart_id: 0,
        seed: None,
    })
}
