//! Acceptance suite: one PASS/FAIL line per criterion. The oracles here are
//! written independently of the library code they check.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pepqubo::analysis::{
    f_nat, family_histogram, histogram_csv, mev_spectrum, native_contacts, pr_curve, top2_containment, PoseRecord,
};
use pepqubo::chem_model::{
    cluster_alphabet, exhaustive_bipartition, local_search, parse_sequence, reduce_model, AminoAcid, InteractionModel,
    ModelParams, RawTables,
};
use pepqubo::decode::{decode_bits, random_peptides, sequence_string};
use pepqubo::pipeline::{cmd_pipeline, RunConfig};
use pepqubo::pocket::{
    compute_external_field, contacts_per_residue, estimate_contacts, ContactOptions, ExternalField, PocketLattice,
    PosedResidue, ProteinStructure,
};
use pepqubo::qubo::{
    bits_to_spins, box_bonds, build_stage1_qubo, count_variables, stage1_terms, to_ising, LengthWeight, QuboBuilder,
    QuboMeta, QuboProblem, Stage1Params, VarLabel, VariableRegistry,
};
use pepqubo::solve::{run_restarts, solve_exact, solve_sa, AnnealSchedule, SolverConfig};
use pepqubo::synthetic::{helix_protein, toy_pocket};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(limit: Duration, started: Instant) -> Outcome {
    let t = started.elapsed();
    ensure!(t < limit, "took {t:?}, limit {limit:?}");
    Ok(format!("{:.2}s", t.as_secs_f64()))
}

/// Three-branch LJ written out from its definition.
fn oracle_lj(eps: f64, sigma: f64, r: f64) -> f64 {
    if r > 8.5 {
        return 0.0;
    }
    let x = (sigma / r).powi(6);
    let shape = 4.0 * (x * x - x);
    let r0 = 2f64.powf(1.0 / 6.0) * sigma;
    if eps < 0.0 {
        -eps * shape
    } else if r < r0 {
        eps * shape + 2.0 * eps
    } else {
        -eps * shape
    }
}

fn oracle_pair(model: &InteractionModel, k: usize, l: usize, r: f64) -> f64 {
    if r > model.cutoff {
        return 0.0;
    }
    oracle_lj(model.epsilon.get(k, l), model.sigma_pair.get(k, l), r)
}

// 1. potential
fn potential() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_jump: f64 = 0.0;
    let mut worst_min: f64 = 0.0;
    for _ in 0..1000 {
        let eps = rng.random_range(-2.0..2.0);
        let sigma = rng.random_range(3.0..7.5);
        let r = rng.random_range(0.5..20.0);
        let v = pepqubo::chem_model::lj(eps, sigma, r, 8.5);
        ensure!((v - oracle_lj(eps, sigma, r)).abs() <= 1e-9 * v.abs().max(1.0), "lj({eps}, {sigma}, {r}) = {v}");
        if r > 8.5 {
            ensure!(v == 0.0, "nonzero beyond cutoff at r = {r}");
        }
        let r0 = 2f64.powf(1.0 / 6.0) * sigma;
        let h = 1e-9 * r0;
        let jump = (pepqubo::chem_model::lj(eps, sigma, r0 - h, 8.5) - pepqubo::chem_model::lj(eps, sigma, r0 + h, 8.5)).abs();
        if r0 + h < 8.5 {
            worst_jump = worst_jump.max(jump);
        }
        if eps < 0.0 && r0 <= 8.5 {
            worst_min = worst_min.max((pepqubo::chem_model::lj(eps, sigma, r0, 8.5) + eps.abs()).abs());
        }
    }
    ensure!(worst_jump <= 1e-6, "branch discontinuity {worst_jump}");
    ensure!(worst_min <= 1e-9, "well depth off by {worst_min}");
    let t = within(Duration::from_secs(1), started)?;
    Ok(format!("max jump {worst_jump:.1e}, max depth error {worst_min:.1e}, {t}"))
}

struct Instance {
    lattice: PocketLattice,
    field: ExternalField,
    model: InteractionModel,
    params: Stage1Params,
}

fn line_instance(dims: [usize; 3], s: usize, t: usize, d: usize, l0: usize, nc: f64) -> Instance {
    let raw = RawTables::builtin();
    let clustering = cluster_alphabet(&raw, d, 0).unwrap();
    let model = reduce_model(&raw, &clustering, &ModelParams::default()).unwrap();
    let lattice = PocketLattice::box_lattice(dims, 3.8).unwrap().with_endpoints(s, t).unwrap();
    let protein = helix_protein(6, [2.0, 6.5, -3.0]);
    let field = compute_external_field(&lattice, &protein, &model, nc).unwrap();
    Instance {
        lattice,
        field,
        model,
        params: Stage1Params::new(l0),
    }
}

/// The stage-1 Hamiltonian evaluated term by term from variable labels.
fn oracle_stage1(inst: &Instance, labels: &[VarLabel], bits: &[u8]) -> (f64, f64) {
    let lat = &inst.lattice;
    let d = inst.model.families;
    let (s, t) = (lat.s.unwrap(), lat.t.unwrap());
    let l0 = inst.params.l0 as f64;
    let n = lat.len();
    let mut q = vec![vec![0.0; d]; n];
    let mut bond: HashMap<(usize, usize), f64> = HashMap::new();
    let mut anc: HashMap<(usize, usize, usize), f64> = HashMap::new();
    for (v, label) in labels.iter().enumerate() {
        let x = f64::from(bits[v]);
        match *label {
            VarLabel::Site { point, family } => q[point][family] = x,
            VarLabel::Bond { i, j } => {
                bond.insert((i, j), x);
            }
            VarLabel::Ancilla { i, j, family } => {
                anc.insert((i, j, family), x);
            }
            VarLabel::Residue { .. } => unreachable!(),
        }
    }
    let dist = |i: usize, j: usize| {
        let (a, b) = (lat.points[i], lat.points[j]);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    };
    let shifted = |i: usize, k: usize| inst.field.energy[i][k] - inst.field.offset[k];
    let mut scale: f64 = 1.0;
    for i in 0..n {
        for k in 0..d {
            scale = scale.max(shifted(i, k).abs());
        }
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let r = dist(i, j);
            if r <= inst.model.cutoff {
                pairs.push((i, j, r));
                for k in 0..d {
                    for l in 0..d {
                        scale = scale.max(oracle_pair(&inst.model, k, l, r).abs());
                    }
                }
            }
        }
    }
    let a = 10.0 * scale * l0;
    let w = match inst.params.length_weight {
        LengthWeight::Hard => a,
        LengthWeight::Soft => a / (l0 * l0 * inst.params.p * inst.params.p),
        LengthWeight::Fixed(w) => w,
    };
    let mut e = 0.0;
    for i in 0..n {
        for k in 0..d {
            e += shifted(i, k) * q[i][k];
        }
    }
    for &(i, j, r) in &pairs {
        for k in 0..d {
            for l in 0..d {
                let excluded = anc.get(&(i, j, k)).copied().unwrap_or(0.0);
                e += oracle_pair(&inst.model, k, l, r) * (q[i][k] - excluded) * q[j][l];
            }
        }
    }
    for (&(i, j, k), &av) in &anc {
        let (x, b) = (q[i][k], bond[&(i, j)]);
        e += a * (3.0 * av + x * b - 2.0 * x * av - 2.0 * b * av);
    }
    for row in &q {
        for k in 0..d {
            for l in 0..d {
                if k != l {
                    e += a * row[k] * row[l];
                }
            }
        }
    }
    let sign = if inst.params.literal_signs { -1.0 } else { 1.0 };
    for i in 0..n {
        let occ: f64 = q[i].iter().sum();
        let deg: f64 = bond.iter().filter(|(&(x, y), _)| x == i || y == i).map(|(_, v)| v).sum();
        if i == s || i == t {
            e += sign * a * (1.0 - occ).powi(2) + a * (occ - deg).powi(2);
        } else {
            e += a * (2.0 * occ - deg).powi(2);
        }
    }
    let total_bonds: f64 = bond.values().sum();
    e += w * (l0 - total_bonds).powi(2);
    (e, a)
}

// 2. QUBO against direct evaluation
fn qubo_semantics() -> Outcome {
    let started = Instant::now();
    let mut cases = Vec::new();
    for d in [1, 2] {
        cases.push(line_instance([1, 2, 1], 0, 1, d, 1, 0.0));
        let mut i = line_instance([1, 3, 1], 0, 2, d, 2, 1.5);
        i.params.literal_signs = d == 2;
        cases.push(i);
        let mut i = line_instance([1, 3, 1], 0, 2, d, 2, 0.0);
        i.params.p = 0.5;
        i.params.length_weight = LengthWeight::Soft;
        cases.push(i);
    }
    cases.push(line_instance([2, 2, 1], 0, 3, 1, 2, 0.7));
    cases.push(line_instance([1, 4, 1], 0, 3, 1, 3, 0.0));
    // energies reach ~1e6 through the penalty scale, so the bound scales with magnitude
    let mut worst: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    let mut assignments = 0usize;
    for inst in &cases {
        let q = build_stage1_qubo(&inst.lattice, &inst.field, &inst.model, &inst.params).map_err(|e| e.to_string())?;
        let n = q.num_vars();
        ensure!(n <= 16, "instance has {n} variables");
        let labels = q.registry.labels().to_vec();
        let (_, a) = oracle_stage1(inst, &labels, &vec![0; n]);
        ensure!((a - q.meta.a).abs() <= 1e-12 * a, "penalty {} vs oracle {a}", q.meta.a);
        for x in 0u32..(1 << n) {
            let bits: Vec<u8> = (0..n).map(|v| (x >> v & 1) as u8).collect();
            let (oracle, _) = oracle_stage1(inst, &labels, &bits);
            let direct = stage1_terms(&bits, &inst.lattice, &inst.field, &inst.model, &q.meta).map_err(|e| e.to_string())?.total();
            let e = q.energy(&bits);
            let dev = (e - oracle).abs().max((e - direct).abs());
            worst_abs = worst_abs.max(dev);
            worst = worst.max(dev / oracle.abs().max(1.0));
            assignments += 1;
        }
    }
    ensure!(worst <= 1e-9, "max scaled deviation {worst:e} (absolute {worst_abs:e})");
    let t = within(Duration::from_secs(10), started)?;
    Ok(format!(
        "{} instances, {assignments} assignments, max scaled deviation {worst:.1e} (absolute {worst_abs:.1e}), {t}",
        cases.len()
    ))
}

// 3. ground state of the smallest chain problem, AND gadget
fn ground_state() -> Outcome {
    let inst = line_instance([1, 3, 1], 0, 2, 1, 2, 0.0);
    let q = build_stage1_qubo(&inst.lattice, &inst.field, &inst.model, &inst.params).map_err(|e| e.to_string())?;
    let r = solve_exact(&q, 24).map_err(|e| e.to_string())?;
    let dec = decode_bits(&r.bits, &q, &inst.lattice).map_err(|e| e.to_string())?;
    ensure!(dec.report.is_feasible(), "ground state infeasible: {:?}", dec.report.violations);
    let p = dec.peptide.unwrap();
    ensure!(p.path == vec![0, 1, 2] && p.length == 2, "decoded path {:?}", p.path);
    for x in 0..2u8 {
        for y in 0..2u8 {
            for a in 0..2u8 {
                let (x, y, a) = (f64::from(x), f64::from(y), f64::from(a));
                let g = 3.0 * a + x * y - 2.0 * x * a - 2.0 * y * a;
                ensure!(g >= 0.0, "gadget negative at {x}{y}{a}");
                ensure!((g == 0.0) == (a == x * y), "gadget zero set wrong at {x}{y}{a}");
            }
        }
    }
    Ok(format!("ground state path {:?}, energy {:.4}; gadget checked on 8 triples", p.path, r.energy))
}

// 4. resource counts
fn counts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let dims = [rng.random_range(1..6), rng.random_range(1..6), rng.random_range(1..8)];
        let d = rng.random_range(1..11);
        let lat = PocketLattice::box_lattice(dims, 3.8).map_err(|e| e.to_string())?;
        let reg = VariableRegistry::stage1(lat.len(), d, &lat.adjacency);
        let c = count_variables(dims, d);
        ensure!(c.annealer == reg.total(), "{dims:?} D={d}: count {} vs registry {}", c.annealer, reg.total());
        ensure!(box_bonds(dims) == lat.num_bonds(), "{dims:?}: bond count");
    }
    let small = count_variables([2, 2, 2], 5).annealer;
    ensure!(small == 112, "(2,2,2) D=5 gives {small}");
    let mut prev = 0.0;
    for l in [5usize, 10, 20, 40] {
        let d = 5;
        let per_site = count_variables([l, l, l], d).annealer as f64 / (l * l * l) as f64;
        let target = (4 * d + 3) as f64;
        ensure!(per_site < target && per_site > prev, "per-site count {per_site} at L={l}");
        ensure!(target - per_site <= 3.0 * (d + 1) as f64 / l as f64 + 1e-12, "slow approach at L={l}");
        prev = per_site;
    }
    let big = count_variables([3, 3, 10], 5).annealer;
    ensure!((1500..=2100).contains(&big), "3x3x10 D=5 gives {big}");
    Ok(format!("5 random shapes match; (2,2,2,5) -> {small}; per-site -> 4D+3; 3x3x10 D=5 -> {big}"))
}

// 5. Ising equivalence
fn ising() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // dyadic coefficients keep every conversion exact in binary floating point
    let dyadic = |rng: &mut ChaCha8Rng| f64::from(rng.random_range(-64i32..=64)) / 16.0;
    for _ in 0..100 {
        let mut b = QuboBuilder::new(8);
        for i in 0..8 {
            b.add_linear(i, dyadic(&mut rng));
            for j in i + 1..8 {
                if rng.random_bool(0.6) {
                    b.add_quadratic(i, j, dyadic(&mut rng));
                }
            }
        }
        b.add_offset(dyadic(&mut rng));
        let q = b.finish(VariableRegistry::stage2(1, 8), QuboMeta::default()).map_err(|e| e.to_string())?;
        let is = to_ising(&q);
        for x in 0u32..256 {
            let bits: Vec<u8> = (0..8).map(|v| (x >> v & 1) as u8).collect();
            let (eq, ei) = (q.energy(&bits), is.energy(&bits_to_spins(&bits)));
            ensure!(eq == ei, "energies differ: {eq} vs {ei}");
        }
    }
    Ok("100 QUBOs x 256 assignments identical".into())
}

fn feasible_key(q: &QuboProblem, lat: &PocketLattice, bits: &[u8]) -> Option<String> {
    let dec = decode_bits(bits, q, lat).ok()?;
    if !dec.report.is_feasible() {
        return None;
    }
    let p = dec.peptide?;
    Some(p.families.iter().map(|k| k.to_string()).collect::<Vec<_>>().join("-"))
}

// 6. annealing quality and diversity
fn anneal_quality() -> Outcome {
    let started = Instant::now();
    let instances = [
        line_instance([1, 3, 1], 0, 2, 1, 2, 0.0),
        line_instance([1, 3, 1], 0, 2, 2, 2, 1.0),
        line_instance([1, 4, 1], 0, 3, 1, 3, 0.0),
        line_instance([2, 2, 1], 0, 3, 1, 2, 0.5),
        line_instance([2, 3, 1], 0, 5, 1, 3, 0.0),
    ];
    let mut rates = Vec::new();
    for inst in &instances {
        let q = build_stage1_qubo(&inst.lattice, &inst.field, &inst.model, &inst.params).map_err(|e| e.to_string())?;
        let exact = solve_exact(&q, 24).map_err(|e| e.to_string())?;
        let tol = 1e-9 * exact.energy.abs().max(1.0);
        let hits = (0..100u64)
            .filter(|&seed| {
                let r = solve_sa(&q, &AnnealSchedule { seed, ..Default::default() }).expect("valid schedule");
                r.energy <= exact.energy + tol
            })
            .count();
        ensure!(hits >= 80, "{} variables: {hits}/100 seeds reached the optimum", q.num_vars());
        rates.push(format!("{}v:{hits}", q.num_vars()));
    }

    let toy = toy_pocket();
    let raw = RawTables::builtin();
    let model = reduce_model(&raw, &cluster_alphabet(&raw, 3, 0).unwrap(), &ModelParams::default()).unwrap();
    let mut cfg = RunConfig::default();
    cfg.stage1.families = 3;
    let prep = pepqubo::pipeline::prepare(&cfg).map_err(|e| e.to_string())?;
    let field = compute_external_field(&prep.lattice, &toy.protein, &model, 0.0).map_err(|e| e.to_string())?;
    let q = build_stage1_qubo(&prep.lattice, &field, &model, &prep.params).map_err(|e| e.to_string())?;
    ensure!(q.num_vars() >= 200, "diversity instance has only {} variables", q.num_vars());
    let solver = SolverConfig {
        sweeps: 20_000,
        ..Default::default()
    };
    let results = run_restarts(&q, &solver, 100, 6).map_err(|e| e.to_string())?;
    let keys: Vec<Option<String>> = results.iter().map(|r| feasible_key(&q, &prep.lattice, &r.bits)).collect();
    let spectrum = mev_spectrum(&results, &keys, 50).map_err(|e| e.to_string())?;
    ensure!(spectrum.distinct_sequences >= 10, "only {} distinct sequences", spectrum.distinct_sequences);
    ensure!(spectrum.occupied_bins() > 1, "spectrum collapsed to one bin");
    let t = within(Duration::from_secs(300), started)?;
    Ok(format!(
        "exact hits per 100 seeds [{}]; {} vars x 100 restarts: {} distinct sequences; {t}",
        rates.join(" "),
        q.num_vars(),
        spectrum.distinct_sequences
    ))
}

// 7. clustering
fn clustering() -> Outcome {
    let raw = RawTables::builtin();
    let c20 = cluster_alphabet(&raw, 20, 0).map_err(|e| e.to_string())?;
    ensure!(c20.loss == 0.0, "D=20 loss {}", c20.loss);
    let (best, best_loss) = exhaustive_bipartition(&raw.e);
    let fam = |c: char| best[AminoAcid::from_code(c).unwrap().index()];
    ensure!("FLIMV".chars().all(|c| fam(c) == fam('F')), "hydrophobic residues split: {best:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let starts: Vec<Vec<usize>> = (0..30)
        .map(|_| {
            let mut a: Vec<usize> = (0..20).map(|_| rng.random_range(0..2)).collect();
            a[0] = 0;
            a[1] = 1;
            a
        })
        .collect();
    let (ls, ls_loss) = local_search(&raw.e, 2, &starts);
    ensure!((ls_loss - best_loss).abs() <= 1e-9 * best_loss.abs().max(1.0), "local search {ls_loss} vs exhaustive {best_loss}");
    let same = (0..20).all(|i| (0..20).all(|j| (ls[i] == ls[j]) == (best[i] == best[j])));
    ensure!(same, "local search partition differs");
    let group: String = AminoAcid::ALL.iter().filter(|a| best[a.index()] == fam('F')).map(|a| a.code()).collect();
    Ok(format!("D=20 loss 0; D=2 hydrophobic family {group}; local search matches ({best_loss:.4})"))
}

/// Contacts recomputed pair by pair with the oracle potential.
fn oracle_contacts(pose: &[PosedResidue], protein: &ProteinStructure, model: &InteractionModel) -> f64 {
    let mut total = 0.0;
    for bead in pose {
        for res in &protein.residues {
            let k = bead.family;
            let l = model.cluster_map[res.aa.index()];
            let eps = model.epsilon.get(k, l);
            let d = bead.position;
            let r = ((d[0] - res.ca[0]).powi(2) + (d[1] - res.ca[1]).powi(2) + (d[2] - res.ca[2]).powi(2)).sqrt();
            if eps < 0.0 && r <= model.cutoff {
                total += (oracle_pair(model, k, l, r) / eps).clamp(0.0, 1.0);
            }
        }
    }
    total / pose.len() as f64
}

// 8. contact-number iteration
fn contacts() -> Outcome {
    let mut cfg = RunConfig::default();
    cfg.stage1.families = 3;
    let prep = pepqubo::pipeline::prepare(&cfg).map_err(|e| e.to_string())?;
    let solver = SolverConfig {
        sweeps: 10_000,
        ..Default::default()
    };
    let mut last: Vec<PosedResidue> = Vec::new();
    let est = estimate_contacts(&prep.protein, &prep.reduced, &ContactOptions::default(), |nc| {
        let q = prep.stage1_problem(nc)?;
        let results = run_restarts(&q, &solver, 16, 8)?;
        let best = results
            .iter()
            .filter_map(|r| {
                let dec = decode_bits(&r.bits, &q, &prep.lattice).ok()?;
                dec.report.is_feasible().then(|| (r.energy, dec.peptide.unwrap()))
            })
            .min_by(|a, b| a.0.total_cmp(&b.0));
        last = best.map(|(_, p)| p.posed(&prep.lattice)).unwrap_or_default();
        Ok(last.clone())
    })
    .map_err(|e| e.to_string())?;
    ensure!(est.iterations <= 5, "took {} iterations", est.iterations);
    ensure!(!last.is_empty(), "final design produced no pose");
    let oracle = oracle_contacts(&last, &prep.protein, &prep.reduced);
    let library = contacts_per_residue(&last, &prep.protein, &prep.reduced);
    ensure!((est.nc - oracle).abs() <= 1e-9 && (library - oracle).abs() <= 1e-9, "Nc {} vs oracle {oracle}", est.nc);
    let trace: Vec<String> = est.trace.iter().map(|v| format!("{v:.4}")).collect();
    Ok(format!("converged in {} iterations, trace {}", est.iterations, trace.join(" -> ")))
}

/// Average precision by recounting every prefix from scratch.
fn brute_force_ap(labels: &[bool]) -> f64 {
    let total = labels.iter().filter(|&&l| l).count();
    if total == 0 {
        return 0.0;
    }
    let mut area = 0.0;
    for k in 1..=labels.len() {
        let tp = labels[..k].iter().filter(|&&l| l).count();
        let tp_prev = labels[..k - 1].iter().filter(|&&l| l).count();
        let recall = tp as f64 / total as f64;
        let recall_prev = tp_prev as f64 / total as f64;
        area += (recall - recall_prev) * (tp as f64 / k as f64);
    }
    area
}

// 9. precision-recall analysis
fn pr_analysis() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let labels: Vec<bool> = (0..10).map(|_| rng.random_bool(0.4)).collect();
        let c = pr_curve(&labels).map_err(|e| e.to_string())?;
        let oracle = brute_force_ap(&labels);
        ensure!(c.auc == oracle, "{labels:?}: {} vs {oracle}", c.auc);
    }
    let ranked = [true, true, true, false, false, false, false, false, false, false];
    let top = pr_curve(&ranked).map_err(|e| e.to_string())?.auc;
    ensure!(top == 1.0, "all-positives-first gives {top}");
    let protein = toy_pocket().protein;
    let reference = PoseRecord {
        rank: 1,
        coords: toy_pocket().seeds,
        label: "reference".into(),
    };
    let native = native_contacts(&reference, &protein, 8.5).map_err(|e| e.to_string())?;
    let self_fnat = f_nat(&reference, &native, &protein, 8.5).map_err(|e| e.to_string())?;
    ensure!(self_fnat == 1.0, "self f_nat {self_fnat}");
    Ok(format!("100 labelings match the prefix oracle; ordered AUC 1.0; self f_nat 1.0 ({} native contacts)", native.len()))
}

// 10. histogram tables
fn histograms() -> Outcome {
    let raw = RawTables::builtin();
    let c5 = cluster_alphabet(&raw, 5, 0).map_err(|e| e.to_string())?;
    // stand-in reference: 8-residue motifs drawn around a fixed consensus
    let consensus = parse_sequence("KSTQTAVD").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let reference: Vec<Vec<AminoAcid>> = (0..111)
        .map(|_| {
            consensus
                .iter()
                .map(|&a| if rng.random_bool(0.3) { AminoAcid::ALL[rng.random_range(0..20)] } else { a })
                .collect()
        })
        .collect();
    let designed = random_peptides(8, 50, 3).map_err(|e| e.to_string())?;
    let d = family_histogram(&designed, &c5, 8).map_err(|e| e.to_string())?;
    let r = family_histogram(&reference, &c5, 8).map_err(|e| e.to_string())?;
    for t in [&d, &r] {
        ensure!(t.rows.len() == 8 && t.rows.iter().all(|row| row.len() == 5), "table shape");
        ensure!(t.rows.iter().all(|row| (row.iter().sum::<f64>() - 1.0).abs() < 1e-12), "rows must sum to 1");
        ensure!(histogram_csv(t).lines().count() == 9, "csv rows");
    }
    let cross = top2_containment(&d, &r).map_err(|e| e.to_string())?;
    let own = top2_containment(&r, &r).map_err(|e| e.to_string())?;
    ensure!(own.count == 8, "self comparison passes {}/8", own.count);
    Ok(format!(
        "8x5 tables emitted; self comparison 8/8; random designs vs stand-in reference {}/8 (first design {})",
        cross.count,
        sequence_string(&designed[0])
    ))
}

// 11. determinism
fn determinism() -> Outcome {
    let mut cfg = RunConfig::default();
    cfg.stage1.families = 3;
    cfg.solver.sweeps = 10_000;
    cfg.solver.restarts = 8;
    cfg.solver.seed = 21;
    cfg.stage2_solver.sweeps = 500;
    cfg.stage2_solver.restarts = 8;
    let a = cmd_pipeline(&cfg).map_err(|e| e.to_string())?;
    let b = cmd_pipeline(&cfg).map_err(|e| e.to_string())?;
    ensure!(a.fasta.as_bytes() == b.fasta.as_bytes(), "FASTA outputs differ");
    ensure!(a.to_json().unwrap() == b.to_json().unwrap(), "archives differ");
    Ok(format!("identical FASTA ({} bytes) and archives; best design {}", a.fasta.len(), a.sequence))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("potential correctness", potential),
        ("QUBO matches direct evaluation", qubo_semantics),
        ("ground-state feasibility", ground_state),
        ("resource counts", counts),
        ("Ising equivalence", ising),
        ("annealing quality and diversity", anneal_quality),
        ("clustering", clustering),
        ("contact iteration", contacts),
        ("precision-recall analysis", pr_analysis),
        ("histogram analysis", histograms),
        ("end-to-end determinism", determinism),
    ];
    // the harness prints the verdicts; silence panic backtraces
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", n + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {reason}", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
