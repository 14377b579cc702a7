//! End-to-end design runs: configuration, the two-stage pipeline, run
//! archives and reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{mev_spectrum, spectrum_csv, MevSpectrum};
use crate::chem_model::{cluster_alphabet, ClusteringResult, load_raw_tables, reduce_model, InteractionModel, ModelParams, RawTables};
use crate::decode::{decode_bits, decode_stage2, pose_pdb, sequence_string, to_fasta, DecodedPeptide, FeasibilityReport};
use crate::error::{read_to_string, write_string, Error, Result};
use crate::geometry::Vec3;
use crate::pocket::{
    build_lattice, choose_endpoints, compute_external_field, estimate_contacts, parse_pdb_str, parse_structure,
    ContactOptions, ExternalField, LatticeParams, PocketLattice, ProteinStructure, DEFAULT_CLASH_FACTOR,
    DEFAULT_RADIUS, DEFAULT_SPACING,
};
use crate::qubo::{build_stage1_qubo, build_stage2_qubo, qubo_to_json, LengthWeight, PenaltyPolicy, QuboProblem, Stage1Params};
use crate::solve::{run_restarts, SolveResult, SolverConfig, SolverKind, DEFAULT_MAX_VARS, DEFAULT_SWEEPS};
use crate::synthetic::toy_pocket;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub spacing: f64,
    pub radius: f64,
    /// Clash distance as a multiple of the smallest residue diameter.
    pub clash_factor: f64,
    pub align_principal_axes: bool,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            spacing: DEFAULT_SPACING,
            radius: DEFAULT_RADIUS,
            clash_factor: DEFAULT_CLASH_FACTOR,
            align_principal_axes: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Stage1Config {
    /// Reduced alphabet size.
    pub families: usize,
    /// Target bond count; defaults to one less than the number of seeds.
    pub l0: Option<usize>,
    pub p: f64,
    pub penalty: PenaltyPolicy,
    pub length_weight: LengthWeight,
    pub literal_signs: bool,
    pub clustering_seed: u64,
}

impl Default for Stage1Config {
    fn default() -> Self {
        Stage1Config {
            families: 5,
            l0: None,
            p: 0.0,
            penalty: PenaltyPolicy::Auto,
            length_weight: LengthWeight::Hard,
            literal_signs: false,
            clustering_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub kind: SolverKind,
    pub sweeps: usize,
    pub t_hot: Option<f64>,
    pub t_cold: Option<f64>,
    pub max_exact_vars: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            kind: SolverKind::Sa,
            sweeps: DEFAULT_SWEEPS,
            t_hot: None,
            t_cold: None,
            max_exact_vars: DEFAULT_MAX_VARS,
            restarts: 100,
            seed: 0,
        }
    }
}

impl SolverSettings {
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            kind: self.kind,
            sweeps: self.sweeps,
            t_hot: self.t_hot,
            t_cold: self.t_cold,
            max_exact_vars: self.max_exact_vars,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContactConfig {
    /// Contact number used when not estimating.
    pub nc: f64,
    /// Iterate the contact number to self-consistency first.
    pub estimate: bool,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ContactConfig {
    fn default() -> Self {
        let o = ContactOptions::default();
        ContactConfig {
            nc: 0.0,
            estimate: false,
            tolerance: o.tolerance,
            max_iterations: o.max_iterations,
        }
    }
}

/// Everything a design run needs. Unset inputs fall back to the built-in
/// toy pocket and the bundled residue tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Receptor PDB file.
    pub structure: Option<PathBuf>,
    /// PDB file of a bound peptide; its C-alpha trace gives seeds and termini.
    pub reference_peptide: Option<PathBuf>,
    pub seeds: Vec<Vec3>,
    /// Coordinates the two chain ends should sit nearest to.
    pub endpoints: Option<[Vec3; 2]>,
    /// Directory with residue tables; overrides the environment variable.
    pub data_dir: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    /// Try boundary endpoint pairs and keep the best design.
    pub scan_endpoints: bool,
    pub scan_limit: usize,
    pub model: ModelParams,
    pub lattice: LatticeConfig,
    pub stage1: Stage1Config,
    /// Stage-2 penalty; automatic when unset.
    pub stage2_penalty: Option<f64>,
    pub solver: SolverSettings,
    pub stage2_solver: SolverSettings,
    pub contacts: ContactConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            structure: None,
            reference_peptide: None,
            seeds: Vec::new(),
            endpoints: None,
            data_dir: None,
            output_dir: None,
            scan_endpoints: false,
            scan_limit: 20,
            model: ModelParams::default(),
            lattice: LatticeConfig::default(),
            stage1: Stage1Config::default(),
            stage2_penalty: None,
            solver: SolverSettings::default(),
            stage2_solver: SolverSettings {
                sweeps: 2_000,
                restarts: 20,
                ..Default::default()
            },
            contacts: ContactConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    /// Reads a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml(&read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.structure, &mut cfg.reference_peptide, &mut cfg.data_dir, &mut cfg.output_dir]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Checks that referenced inputs exist and parameters are in range.
    pub fn validate(&self) -> Result<()> {
        for p in [&self.structure, &self.reference_peptide, &self.data_dir].into_iter().flatten() {
            if !p.exists() {
                return Err(Error::InvalidParameter(format!("{} does not exist", p.display())));
            }
        }
        if self.stage1.families == 0 || self.stage1.families > 20 {
            return Err(Error::InvalidParameter(format!("family count must be 1..=20, got {}", self.stage1.families)));
        }
        if self.solver.restarts == 0 || self.stage2_solver.restarts == 0 {
            return Err(Error::InvalidParameter("restart counts must be positive".into()));
        }
        if self.scan_endpoints && self.scan_limit == 0 {
            return Err(Error::InvalidParameter("scan_limit must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub problem: QuboProblem,
    pub results: Vec<SolveResult>,
    /// Decoded sequence key per result; `None` when it did not decode.
    pub sequences: Vec<Option<String>>,
    pub feasible: Vec<bool>,
}

impl StageRecord {
    pub fn feasible_count(&self) -> usize {
        self.feasible.iter().filter(|&&f| f).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointTrial {
    pub s: usize,
    pub t: usize,
    pub best_energy: Option<f64>,
}

/// Everything a run produced, sufficient to rerun it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArchive {
    pub tool_version: String,
    pub config: RunConfig,
    pub nc: f64,
    pub contact_trace: Vec<f64>,
    pub lattice: PocketLattice,
    pub family_labels: Vec<String>,
    pub field_stage1: ExternalField,
    pub field_stage2: ExternalField,
    pub endpoint_scan: Vec<EndpointTrial>,
    pub stage1: StageRecord,
    pub stage1_best: DecodedPeptide,
    pub stage2: StageRecord,
    pub peptide: DecodedPeptide,
    pub sequence: String,
    pub fasta: String,
    pub pose_pdb: String,
    pub spectrum: MevSpectrum,
}

impl RunArchive {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let a: RunArchive = serde_json::from_str(text).map_err(|e| Error::CorruptArchive(e.to_string()))?;
        let n = a.stage1.results.len();
        if a.stage1.sequences.len() != n || a.stage1.feasible.len() != n || n == 0 {
            return Err(Error::CorruptArchive("stage-1 records are inconsistent".into()));
        }
        if a.stage1.results.iter().any(|r| r.bits.len() != a.stage1.problem.num_vars()) {
            return Err(Error::CorruptArchive("stage-1 result size does not match its problem".into()));
        }
        Ok(a)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_string(path, &self.to_json()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_to_string(path)?)
    }
}

fn family_key(families: &[usize]) -> String {
    families.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join("-")
}

/// Lowest energy first, then lexicographic bits.
fn better(a: &SolveResult, b: &SolveResult) -> bool {
    a.energy.total_cmp(&b.energy).then_with(|| a.bits.cmp(&b.bits)).is_lt()
}

struct Inputs {
    raw: RawTables,
    protein: ProteinStructure,
    seeds: Vec<Vec3>,
    ends: [Vec3; 2],
    l0: usize,
}

fn load_inputs(cfg: &RunConfig) -> Result<Inputs> {
    let raw = match &cfg.data_dir {
        Some(dir) => load_raw_tables(dir)?,
        None => RawTables::from_env_or_builtin()?,
    };
    let toy = cfg.structure.is_none().then(toy_pocket);
    let protein = match (&cfg.structure, &toy) {
        (Some(path), _) => parse_structure(path)?,
        (None, Some(t)) => t.protein.clone(),
        (None, None) => unreachable!(),
    };
    let reference = match &cfg.reference_peptide {
        Some(path) => parse_pdb_str(&read_to_string(path)?)?.ca_positions(),
        None => Vec::new(),
    };
    let seeds = if !cfg.seeds.is_empty() {
        cfg.seeds.clone()
    } else if !reference.is_empty() {
        reference.clone()
    } else if let Some(t) = &toy {
        t.seeds.clone()
    } else {
        return Err(Error::InvalidParameter("a structure file needs seeds or a reference peptide".into()));
    };
    let ends = match cfg.endpoints {
        Some(e) => e,
        None if !reference.is_empty() => [reference[0], reference[reference.len() - 1]],
        None => [seeds[0], seeds[seeds.len() - 1]],
    };
    let l0 = match cfg.stage1.l0 {
        Some(l) => l,
        None if seeds.len() >= 2 => seeds.len() - 1,
        None => return Err(Error::InvalidParameter("set stage1.l0 or give at least two seeds".into())),
    };
    Ok(Inputs {
        raw,
        protein,
        seeds,
        ends,
        l0,
    })
}

struct Stage1Outcome {
    record: StageRecord,
    best: Option<(usize, DecodedPeptide)>,
    diagnostics: Option<FeasibilityReport>,
}

fn run_stage1(
    lattice: &PocketLattice,
    field: &ExternalField,
    model: &InteractionModel,
    params: &Stage1Params,
    solver: &SolverSettings,
) -> Result<Stage1Outcome> {
    let problem = build_stage1_qubo(lattice, field, model, params)?;
    log::info!("stage 1: {} variables, A = {}", problem.num_vars(), problem.meta.a);
    let results = run_restarts(&problem, &solver.solver_config(), solver.restarts, solver.seed)?;
    let mut sequences = Vec::with_capacity(results.len());
    let mut feasible = Vec::with_capacity(results.len());
    let mut best: Option<(usize, DecodedPeptide)> = None;
    let mut best_infeasible: Option<(usize, FeasibilityReport)> = None;
    for (i, r) in results.iter().enumerate() {
        let dec = decode_bits(&r.bits, &problem, lattice)?;
        let ok = dec.report.is_feasible();
        feasible.push(ok);
        sequences.push(dec.peptide.as_ref().filter(|_| ok).map(|p| family_key(&p.families)));
        if ok {
            let p = dec.peptide.expect("feasible decodes carry a peptide");
            if best.as_ref().is_none_or(|(b, _)| better(r, &results[*b])) {
                best = Some((i, p));
            }
        } else if best_infeasible.as_ref().is_none_or(|(b, _)| better(r, &results[*b])) {
            best_infeasible = Some((i, dec.report));
        }
    }
    log::info!("stage 1: {}/{} restarts feasible", feasible.iter().filter(|&&f| f).count(), results.len());
    Ok(Stage1Outcome {
        record: StageRecord {
            problem,
            results,
            sequences,
            feasible,
        },
        best,
        diagnostics: best_infeasible.map(|(_, r)| r),
    })
}

/// Boundary points: fewer than six lattice neighbours.
fn boundary_pairs(lattice: &PocketLattice, l0: usize, p: f64, limit: usize) -> Vec<(usize, usize)> {
    let nbrs = lattice.neighbors();
    let boundary: Vec<usize> = (0..lattice.len()).filter(|&i| nbrs[i].len() < 6).collect();
    let lo = (l0 as f64 * (1.0 - p) - 1e-9).ceil().max(1.0) as i64;
    let hi = (l0 as f64 * (1.0 + p) + 1e-9).floor() as i64;
    let mut pairs = Vec::new();
    for (a, &s) in boundary.iter().enumerate() {
        for &t in &boundary[a + 1..] {
            let g = (0..3).map(|x| (lattice.grid[s][x] - lattice.grid[t][x]).abs() as i64).sum::<i64>();
            // a walk of L steps needs L >= distance with matching parity
            if (lo..=hi).any(|l| l >= g && (l - g) % 2 == 0) {
                pairs.push((s, t));
                if pairs.len() == limit {
                    return pairs;
                }
            }
        }
    }
    pairs
}

/// Models, lattice and stage-1 parameters derived from a config.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub protein: ProteinStructure,
    pub clustering: ClusteringResult,
    pub reduced: InteractionModel,
    pub full: InteractionModel,
    /// Lattice with the default endpoints set.
    pub lattice: PocketLattice,
    pub params: Stage1Params,
}

impl Prepared {
    pub fn field(&self, nc: f64) -> Result<ExternalField> {
        compute_external_field(&self.lattice, &self.protein, &self.reduced, nc)
    }

    pub fn stage1_problem(&self, nc: f64) -> Result<QuboProblem> {
        build_stage1_qubo(&self.lattice, &self.field(nc)?, &self.reduced, &self.params)
    }

    pub fn dump(&self, nc: f64) -> Result<LatticeDump> {
        Ok(LatticeDump {
            lattice: self.lattice.clone(),
            field: self.field(nc)?,
            family_labels: (0..self.reduced.families).map(|k| self.reduced.family_label(k)).collect(),
            nc,
        })
    }
}

/// Serialized lattice with its stage-1 field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeDump {
    pub lattice: PocketLattice,
    pub field: ExternalField,
    pub family_labels: Vec<String>,
    pub nc: f64,
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    cfg.validate()?;
    let inputs = load_inputs(cfg)?;
    let clustering = cluster_alphabet(&inputs.raw, cfg.stage1.families, cfg.stage1.clustering_seed)?;
    let reduced = reduce_model(&inputs.raw, &clustering, &cfg.model)?;
    let full = InteractionModel::full(&inputs.raw, &cfg.model)?;
    let lparams = LatticeParams {
        spacing: cfg.lattice.spacing,
        radius: cfg.lattice.radius,
        clash_distance: cfg.lattice.clash_factor * inputs.raw.min_sigma(),
        align_principal_axes: cfg.lattice.align_principal_axes,
    };
    let base = build_lattice(&inputs.protein, &inputs.seeds, &lparams)?;
    let (s, t) = choose_endpoints(&base, inputs.ends[0], inputs.ends[1])?;
    let params = Stage1Params {
        l0: inputs.l0,
        p: cfg.stage1.p,
        penalty: cfg.stage1.penalty,
        length_weight: cfg.stage1.length_weight,
        literal_signs: cfg.stage1.literal_signs,
    };
    Ok(Prepared {
        protein: inputs.protein,
        clustering,
        reduced,
        full,
        lattice: base.with_endpoints(s, t)?,
        params,
    })
}

/// Stage 1 at the reduced alphabet, then stage 2 over the full alphabet on
/// the frozen chain. Writes outputs when `output_dir` is set.
pub fn cmd_pipeline(cfg: &RunConfig) -> Result<RunArchive> {
    let Prepared {
        protein,
        reduced,
        full,
        lattice: base,
        params,
        ..
    } = prepare(cfg)?;
    let l0 = params.l0;

    let (nc, contact_trace) = if cfg.contacts.estimate {
        let lattice = &base;
        let opts = ContactOptions {
            tolerance: cfg.contacts.tolerance,
            max_iterations: cfg.contacts.max_iterations,
        };
        let est = estimate_contacts(&protein, &reduced, &opts, |nc| {
            let field = compute_external_field(lattice, &protein, &reduced, nc)?;
            let out = run_stage1(lattice, &field, &reduced, &params, &cfg.solver)?;
            // a run without any feasible chain makes no contacts
            Ok(out.best.map(|(_, p)| p.posed(lattice)).unwrap_or_default())
        })?;
        (est.nc, est.trace)
    } else {
        (cfg.contacts.nc, vec![cfg.contacts.nc])
    };

    let candidates = if cfg.scan_endpoints {
        boundary_pairs(&base, l0, cfg.stage1.p, cfg.scan_limit)
    } else {
        vec![base.endpoints()?]
    };
    if candidates.is_empty() {
        return Err(Error::Infeasible("no boundary endpoint pair can host a chain of the target length".into()));
    }
    let mut scan = Vec::new();
    let mut chosen: Option<(PocketLattice, ExternalField, Stage1Outcome, DecodedPeptide, f64)> = None;
    let mut diagnostics = None;
    let mut restarts_tried = 0;
    for &(s, t) in &candidates {
        let lattice = base.clone().with_endpoints(s, t)?;
        let field = compute_external_field(&lattice, &protein, &reduced, nc)?;
        let out = run_stage1(&lattice, &field, &reduced, &params, &cfg.solver)?;
        restarts_tried += out.record.results.len();
        let Some((i, peptide)) = out.best.clone() else {
            scan.push(EndpointTrial { s, t, best_energy: None });
            diagnostics = diagnostics.or(out.diagnostics);
            continue;
        };
        let energy = out.record.results[i].energy;
        scan.push(EndpointTrial {
            s,
            t,
            best_energy: Some(energy),
        });
        if chosen.as_ref().is_none_or(|c| energy < c.4) {
            chosen = Some((lattice, field, out, peptide, energy));
        }
    }
    let Some((lattice, field1, stage1, stage1_best, _)) = chosen else {
        let detail = diagnostics.map(|r| r.violations.join("; ")).unwrap_or_default();
        return Err(Error::Infeasible(format!(
            "none of {restarts_tried} stage-1 restarts decoded to a valid chain; lowest-energy attempt: {detail}"
        )));
    };
    if !cfg.scan_endpoints {
        scan.clear();
    }

    let field2 = compute_external_field(&lattice, &protein, &full, nc)?;
    let problem2 = build_stage2_qubo(&lattice, &stage1_best.path, &field2, &full, cfg.stage2_penalty)?;
    let results2 = run_restarts(&problem2, &cfg.stage2_solver.solver_config(), cfg.stage2_solver.restarts, cfg.stage2_solver.seed)?;
    let mut sequences2 = Vec::with_capacity(results2.len());
    let mut ranked: Vec<(usize, String)> = Vec::new();
    for (i, r) in results2.iter().enumerate() {
        let seq = decode_stage2(&r.bits, &problem2)?.ok().map(|s| sequence_string(&s));
        if let Some(s) = &seq {
            ranked.push((i, s.clone()));
        }
        sequences2.push(seq);
    }
    let feasible2: Vec<bool> = sequences2.iter().map(Option::is_some).collect();
    ranked.sort_by(|a, b| {
        let (ra, rb) = (&results2[a.0], &results2[b.0]);
        ra.energy.total_cmp(&rb.energy).then_with(|| ra.bits.cmp(&rb.bits))
    });
    let mut seen = std::collections::BTreeSet::new();
    ranked.retain(|(_, s)| seen.insert(s.clone()));
    let Some((best2, sequence)) = ranked.first().cloned() else {
        return Err(Error::Infeasible("no stage-2 restart produced one residue per position".into()));
    };
    let peptide = DecodedPeptide {
        path: stage1_best.path.clone(),
        families: decode_stage2(&results2[best2].bits, &problem2)?
            .expect("ranked results decode")
            .iter()
            .map(|a| a.index())
            .collect(),
        length: stage1_best.length,
    };
    let records: Vec<(String, String)> = ranked
        .iter()
        .enumerate()
        .map(|(n, (i, s))| (format!("design_{} energy={:.6}", n + 1, results2[*i].energy), s.clone()))
        .collect();
    let fasta = to_fasta(&records);
    let pose = pose_pdb(&peptide, &lattice, true);
    let spectrum = mev_spectrum(&stage1.record.results, &stage1.record.sequences, 20)?;
    let family_labels = (0..reduced.families).map(|k| reduced.family_label(k)).collect();

    let archive = RunArchive {
        tool_version: TOOL_VERSION.to_string(),
        config: cfg.clone(),
        nc,
        contact_trace,
        lattice,
        family_labels,
        field_stage1: field1,
        field_stage2: field2,
        endpoint_scan: scan,
        stage1: stage1.record,
        stage1_best,
        stage2: StageRecord {
            problem: problem2,
            results: results2,
            sequences: sequences2,
            feasible: feasible2,
        },
        peptide,
        sequence,
        fasta,
        pose_pdb: pose,
        spectrum,
    };
    if let Some(dir) = &cfg.output_dir {
        write_outputs(&archive, dir)?;
    }
    Ok(archive)
}

/// `archive.json`, `designs.fasta`, `pose.pdb`, `stage1_pose.pdb` and the
/// two problem exports.
pub fn write_outputs(archive: &RunArchive, dir: &Path) -> Result<()> {
    archive.save(&dir.join("archive.json"))?;
    write_string(&dir.join("designs.fasta"), &archive.fasta)?;
    write_string(&dir.join("pose.pdb"), &archive.pose_pdb)?;
    write_string(&dir.join("stage1_pose.pdb"), &pose_pdb(&archive.stage1_best, &archive.lattice, false))?;
    write_string(&dir.join("stage1.qubo.json"), &qubo_to_json(&archive.stage1.problem)?)?;
    write_string(&dir.join("stage2.qubo.json"), &qubo_to_json(&archive.stage2.problem)?)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    /// One row per stage-1 restart.
    pub csv: String,
    pub spectrum_csv: String,
    pub spectrum: MevSpectrum,
}

pub fn cmd_report(archive: &RunArchive) -> Result<Report> {
    let s1 = &archive.stage1;
    if s1.results.is_empty() {
        return Err(Error::CorruptArchive("archive holds no stage-1 results".into()));
    }
    let spectrum = mev_spectrum(&s1.results, &s1.sequences, 20)?;
    let mut text = String::new();
    let _ = writeln!(text, "{}", archive.tool_version);
    let _ = writeln!(
        text,
        "lattice: {} points, {} bonds, endpoints {:?} -> {:?}",
        archive.lattice.len(),
        archive.lattice.num_bonds(),
        archive.lattice.s,
        archive.lattice.t
    );
    let trace: Vec<String> = archive.contact_trace.iter().map(|v| format!("{v:.4}")).collect();
    let _ = writeln!(text, "contact number: {:.4} (trace {})", archive.nc, trace.join(" -> "));
    let _ = writeln!(
        text,
        "stage 1: {} restarts, {} feasible ({:.1}%)",
        s1.results.len(),
        s1.feasible_count(),
        100.0 * s1.feasible_count() as f64 / s1.results.len() as f64
    );
    let _ = writeln!(
        text,
        "MEV spectrum: min {:.6}, mean {:.6}, max {:.6}, {} distinct sequences",
        spectrum.min, spectrum.mean, spectrum.max, spectrum.distinct_sequences
    );
    for (k, label) in archive.family_labels.iter().enumerate() {
        let _ = writeln!(text, "  family {}: {label}", k + 1);
    }
    let _ = writeln!(text, "stage-1 chain: {} (families {})", fmt_path(&archive.stage1_best.path), family_key(&archive.stage1_best.families));
    let _ = writeln!(text, "best sequence: {}", archive.sequence);
    let _ = writeln!(text, "top designs:");
    for line in archive.fasta.lines().filter(|l| l.starts_with('>')).take(5) {
        let _ = writeln!(text, "  {}", &line[1..]);
    }
    let mut csv = String::from("restart,energy,feasible,sequence\n");
    for ((r, f), seq) in s1.results.iter().zip(&s1.feasible).zip(&s1.sequences) {
        let _ = writeln!(csv, "{},{},{},{}", r.restart_id, r.energy, u8::from(*f), seq.as_deref().unwrap_or(""));
    }
    Ok(Report {
        text,
        csv,
        spectrum_csv: spectrum_csv(&spectrum),
        spectrum,
    })
}

fn fmt_path(path: &[usize]) -> String {
    path.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("-")
}
