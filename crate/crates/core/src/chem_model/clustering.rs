//! Reduced-alphabet clustering.
//!
//! The loss of an assignment `a` is `sum_ij (e_ij - e'_{a(i)a(j)})^2`, where
//! `e'` holds block means over ordered residue pairs. For a fixed assignment
//! block means are the least-squares optimum, so the loss can be written as
//! `sum e^2 - sum_IJ S_IJ^2 / (n_I n_J)` with `S_IJ` the block sums. The
//! search routines use that form; [`clustering_loss`] evaluates the
//! definition directly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AminoAcid, PairTable, RawTables, NUM_RESIDUES};
use crate::error::{Error, Result};

const RESTARTS: usize = 24;
const IMPROVEMENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    pub families: usize,
    /// Family of each residue, labelled in order of first appearance.
    pub assignment: Vec<usize>,
    pub loss: f64,
    /// Clustered contact energies `e'` (k_B T), `families x families`.
    pub e_prime: PairTable,
    /// Clustered diameters `sigma'` (Å).
    pub sigma_prime: Vec<f64>,
}

impl ClusteringResult {
    /// One family per residue.
    pub fn identity(raw: &RawTables) -> Self {
        Self::from_assignment(raw, &(0..NUM_RESIDUES).collect::<Vec<_>>()).expect("identity assignment is valid")
    }

    /// Builds the clustered tables for an arbitrary surjective assignment.
    pub fn from_assignment(raw: &RawTables, assignment: &[usize]) -> Result<Self> {
        if assignment.len() != NUM_RESIDUES {
            return Err(Error::InvalidParameter("assignment must cover 20 residues".into()));
        }
        let assignment = canonical_labels(assignment);
        let families = assignment.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![0usize; families];
        let mut sigma_sum = vec![0.0; families];
        for (r, &k) in assignment.iter().enumerate() {
            counts[k] += 1;
            sigma_sum[k] += raw.sigma[r];
        }
        let mut sums = PairTable::zeros(families);
        for i in 0..NUM_RESIDUES {
            for j in 0..NUM_RESIDUES {
                let (a, b) = (assignment[i], assignment[j]);
                sums.set(a, b, sums.get(a, b) + raw.e.get(i, j));
            }
        }
        // mirror the upper triangle so rounding cannot break symmetry
        let e_prime = PairTable::from_fn(families, |a, b| {
            let (a, b) = (a.min(b), a.max(b));
            sums.get(a, b) / (counts[a] * counts[b]) as f64
        });
        let sigma_prime = sigma_sum.iter().zip(&counts).map(|(s, &n)| s / n as f64).collect();
        let loss = clustering_loss(&raw.e, &assignment);
        Ok(ClusteringResult {
            families,
            assignment,
            loss,
            e_prime,
            sigma_prime,
        })
    }

    /// Families as sorted residue groups, independent of label order.
    pub fn partition(&self) -> Vec<Vec<AminoAcid>> {
        let mut groups = vec![Vec::new(); self.families];
        for (r, &k) in self.assignment.iter().enumerate() {
            groups[k].push(AminoAcid::ALL[r]);
        }
        groups.sort();
        groups
    }

    pub fn family_of(&self, aa: AminoAcid) -> usize {
        self.assignment[aa.index()]
    }
}

/// Relabels families in order of first appearance.
fn canonical_labels(assignment: &[usize]) -> Vec<usize> {
    let mut map: Vec<Option<usize>> = vec![None; assignment.iter().max().map_or(0, |m| m + 1)];
    let mut next = 0;
    assignment
        .iter()
        .map(|&k| {
            *map[k].get_or_insert_with(|| {
                next += 1;
                next - 1
            })
        })
        .collect()
}

/// Loss evaluated straight from its definition with block-mean `e'`.
pub fn clustering_loss(e: &PairTable, assignment: &[usize]) -> f64 {
    let d = assignment.iter().max().map_or(0, |m| m + 1);
    let n = e.dim();
    let mut sums = vec![0.0; d * d];
    let mut counts = vec![0.0; d * d];
    for i in 0..n {
        for j in 0..n {
            let b = assignment[i] * d + assignment[j];
            sums[b] += e.get(i, j);
            counts[b] += 1.0;
        }
    }
    let mut loss = 0.0;
    for i in 0..n {
        for j in 0..n {
            let b = assignment[i] * d + assignment[j];
            let diff = e.get(i, j) - sums[b] / counts[b];
            loss += diff * diff;
        }
    }
    loss
}

/// Block sums and sizes for incremental loss updates.
#[derive(Clone)]
struct BlockStats {
    d: usize,
    sums: Vec<f64>,
    sizes: Vec<usize>,
    total_sq: f64,
}

impl BlockStats {
    fn new(e: &PairTable, assignment: &[usize], d: usize) -> Self {
        let mut sums = vec![0.0; d * d];
        let mut sizes = vec![0; d];
        let mut total_sq = 0.0;
        for i in 0..NUM_RESIDUES {
            sizes[assignment[i]] += 1;
            for j in 0..NUM_RESIDUES {
                let v = e.get(i, j);
                sums[assignment[i] * d + assignment[j]] += v;
                total_sq += v * v;
            }
        }
        BlockStats { d, sums, sizes, total_sq }
    }

    fn loss(&self) -> f64 {
        let mut explained = 0.0;
        for a in 0..self.d {
            for b in 0..self.d {
                let n = self.sizes[a] * self.sizes[b];
                if n > 0 {
                    let s = self.sums[a * self.d + b];
                    explained += s * s / n as f64;
                }
            }
        }
        self.total_sq - explained
    }

    /// Moves residue `r` to family `to`, updating `assignment` too.
    fn move_residue(&mut self, e: &PairTable, assignment: &mut [usize], r: usize, to: usize) {
        let from = assignment[r];
        if from == to {
            return;
        }
        let d = self.d;
        for s in 0..NUM_RESIDUES {
            if s == r {
                continue;
            }
            let c = assignment[s];
            self.sums[from * d + c] -= e.get(r, s);
            self.sums[c * d + from] -= e.get(s, r);
            self.sums[to * d + c] += e.get(r, s);
            self.sums[c * d + to] += e.get(s, r);
        }
        let diag = e.get(r, r);
        self.sums[from * d + from] -= diag;
        self.sums[to * d + to] += diag;
        self.sizes[from] -= 1;
        self.sizes[to] += 1;
        assignment[r] = to;
    }
}

/// Exact two-family optimum over all bipartitions, enumerated in Gray-code
/// order with residue 0 pinned to family 0.
pub fn exhaustive_bipartition(e: &PairTable) -> (Vec<usize>, f64) {
    let mut assignment = vec![0usize; NUM_RESIDUES];
    // Gray-code steps 1..2^19 visit every non-zero mask exactly once.
    let mut stats = BlockStats::new(e, &assignment, 2);
    let mut best: Option<(f64, Vec<usize>)> = None;
    let free = NUM_RESIDUES - 1;
    for step in 1u32..(1 << free) {
        let bit = step.trailing_zeros() as usize;
        let r = bit + 1;
        let to = 1 - assignment[r];
        stats.move_residue(e, &mut assignment, r, to);
        if stats.sizes[1] == 0 {
            continue;
        }
        let loss = stats.loss();
        if best.as_ref().is_none_or(|(l, _)| loss < *l - IMPROVEMENT_TOL) {
            best = Some((loss, assignment.clone()));
        }
    }
    let (_, a) = best.expect("at least one bipartition");
    let loss = clustering_loss(e, &a);
    (a, loss)
}

/// Single-residue reassignment descent from each start, keeping every
/// family non-empty. Returns the best assignment and its loss.
pub fn local_search(e: &PairTable, d: usize, starts: &[Vec<usize>]) -> (Vec<usize>, f64) {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for start in starts {
        let mut assignment = start.clone();
        let mut stats = BlockStats::new(e, &assignment, d);
        let mut current = stats.loss();
        loop {
            let mut best_move: Option<(f64, usize, usize)> = None;
            for r in 0..NUM_RESIDUES {
                let from = assignment[r];
                if stats.sizes[from] <= 1 {
                    continue;
                }
                for to in (0..d).filter(|&c| c != from) {
                    let mut trial = stats.clone();
                    let mut trial_assignment = assignment.clone();
                    trial.move_residue(e, &mut trial_assignment, r, to);
                    let loss = trial.loss();
                    if loss < current - IMPROVEMENT_TOL && best_move.is_none_or(|(l, _, _)| loss < l) {
                        best_move = Some((loss, r, to));
                    }
                }
            }
            match best_move {
                Some((loss, r, to)) => {
                    stats.move_residue(e, &mut assignment, r, to);
                    current = loss;
                }
                None => break,
            }
        }
        if best.as_ref().is_none_or(|(l, _)| current < *l - IMPROVEMENT_TOL) {
            best = Some((current, assignment));
        }
    }
    let (_, a) = best.expect("at least one start");
    let loss = clustering_loss(e, &a);
    (a, loss)
}

fn random_start(d: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..NUM_RESIDUES).collect();
    order.shuffle(rng);
    let mut a = vec![0; NUM_RESIDUES];
    for (slot, &r) in order.iter().enumerate() {
        a[r] = if slot < d { slot } else { rng.random_range(0..d) };
    }
    a
}

/// Best split of a `d`-family assignment into `d + 1` families by moving a
/// single residue into the new family.
fn split_start(e: &PairTable, assignment: &[usize], d: usize) -> Vec<usize> {
    let stats = BlockStats::new(e, assignment, d + 1);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for r in 0..NUM_RESIDUES {
        if stats.sizes[assignment[r]] <= 1 {
            continue;
        }
        let mut trial = stats.clone();
        let mut a = assignment.to_vec();
        trial.move_residue(e, &mut a, r, d);
        let loss = trial.loss();
        if best.as_ref().is_none_or(|(l, _)| loss < *l) {
            best = Some((loss, a));
        }
    }
    best.expect("a family with two members exists while d < 20").1
}

/// Groups the 20 residues into `d` families minimising the clustering loss.
///
/// `d = 1` and `d = 20` are trivial, `d = 2` is solved exactly. Larger `d`
/// grow from the two-family optimum: each level warm-starts from the best
/// single-residue split of the previous level and adds random restarts, so
/// the returned loss never increases with `d`.
pub fn cluster_alphabet(raw: &RawTables, d: usize, seed: u64) -> Result<ClusteringResult> {
    if !(1..=NUM_RESIDUES).contains(&d) {
        return Err(Error::InvalidParameter(format!("alphabet size must be in 1..=20, got {d}")));
    }
    let assignment = match d {
        1 => vec![0; NUM_RESIDUES],
        NUM_RESIDUES => (0..NUM_RESIDUES).collect(),
        _ => {
            let (mut a, _) = exhaustive_bipartition(&raw.e);
            for k in 3..=d {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64));
                let mut starts = vec![split_start(&raw.e, &a, k - 1)];
                starts.extend((0..RESTARTS).map(|_| random_start(k, &mut rng)));
                a = local_search(&raw.e, k, &starts).0;
            }
            a
        }
    };
    ClusteringResult::from_assignment(raw, &assignment)
}
