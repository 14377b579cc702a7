use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use pepqubo::analysis::{
    family_histogram, histogram_csv, mev_spectrum, native_contacts, parse_poses, parse_sequences, pr_auc, pr_csv,
    spectrum_csv, top2_containment, DEFAULT_CONTACT_CUTOFF, DEFAULT_FNAT_THRESHOLD,
};
use pepqubo::chem_model::{cluster_alphabet, load_raw_tables, RawTables};
use pepqubo::decode::{decode_bits, decode_stage2, pose_pdb, sequence_string};
use pepqubo::geometry::Vec3;
use pepqubo::pipeline::{cmd_pipeline, cmd_report, prepare, LatticeDump, RunArchive, RunConfig};
use pepqubo::pocket::parse_structure;
use pepqubo::qubo::{count_for_lattice, export_problem, import_problem, ising_to_qubo, to_ising, AnyProblem, Layout, LengthWeight, PenaltyPolicy, QuboProblem};
use pepqubo::solve::{run_restarts, SolveResult, SolverKind};
use pepqubo::Error;

#[derive(Parser)]
#[command(name = "pepqubo", version, about = "Lattice QUBO design of peptide binders")]
struct Cli {
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the pocket lattice and its external field.
    Lattice {
        #[command(flatten)]
        input: InputArgs,
        /// Write the lattice and field as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the stage-1 QUBO and report its size.
    Qubo {
        #[command(flatten)]
        input: InputArgs,
        /// Write the problem in the interchange format.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Export the Ising form instead of the QUBO.
        #[arg(long)]
        ising: bool,
    },
    /// Solve a problem file, or the stage-1 problem built from the inputs.
    Solve {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Interchange file to solve instead of building from inputs.
        #[arg(long)]
        problem: Option<PathBuf>,
        #[arg(long)]
        export: Option<PathBuf>,
        #[arg(long)]
        ising: bool,
        /// Write all results as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode solver results against their problem.
    Decode {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        results: PathBuf,
        /// Lattice dump from `lattice --out`; required for stage-1 problems.
        #[arg(long)]
        lattice: Option<PathBuf>,
        /// Write the best feasible stage-1 pose as PDB.
        #[arg(long)]
        pdb: Option<PathBuf>,
    },
    /// Validation statistics.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Run both design stages end to end.
    Pipeline {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Output directory for the archive, FASTA, poses and problems.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Try boundary endpoint pairs and keep the best design.
        #[arg(long)]
        scan_endpoints: bool,
        /// Iterate the contact number to self-consistency first.
        #[arg(long)]
        estimate_contacts: bool,
    },
    /// Summarize a run archive.
    Report {
        #[arg(long)]
        archive: PathBuf,
        /// Per-restart CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        spectrum_csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Analyze {
    /// Precision-recall over ranked docking poses.
    Pr {
        /// Multi-model PDB or pose list, ranked.
        #[arg(long)]
        poses: PathBuf,
        /// Reference pose; its first model defines the native contacts.
        #[arg(long)]
        reference: PathBuf,
        /// Receptor structure.
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CONTACT_CUTOFF)]
        cutoff: f64,
        #[arg(long, default_value_t = DEFAULT_FNAT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Positional family histograms and top-2 containment.
    Hist {
        #[arg(long)]
        designed: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value_t = 5)]
        families: usize,
        #[arg(long, default_value_t = 0)]
        clustering_seed: u64,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// Directory for the two CSV tables.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum-energy spectrum of a result set or archive.
    Spectrum {
        /// JSON results from `solve --out`, or a run archive.
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct InputArgs {
    /// TOML run configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Receptor PDB file. The built-in toy pocket is used when absent.
    #[arg(long)]
    structure: Option<PathBuf>,
    /// Bound peptide PDB; its C-alpha trace seeds the lattice.
    #[arg(long)]
    reference_peptide: Option<PathBuf>,
    /// Seed point `x,y,z`; repeatable.
    #[arg(long = "point", value_parser = parse_point)]
    points: Vec<Vec3>,
    #[arg(long, value_parser = parse_point)]
    start: Option<Vec3>,
    #[arg(long, value_parser = parse_point)]
    end: Option<Vec3>,
    #[arg(long)]
    spacing: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long)]
    clash_factor: Option<f64>,
    #[arg(long)]
    align_axes: bool,
    /// Reduced alphabet size for stage 1.
    #[arg(long)]
    families: Option<usize>,
    /// Target number of bonds.
    #[arg(long)]
    l0: Option<usize>,
    /// Relative length tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Fixed constraint penalty instead of the automatic one.
    #[arg(long)]
    penalty: Option<f64>,
    /// Length weight: `hard`, `soft` or a number.
    #[arg(long)]
    length_weight: Option<String>,
    /// Use the endpoint penalty with its printed negative sign.
    #[arg(long)]
    paper_literal_signs: bool,
    /// Contact number for the mean-field offset.
    #[arg(long)]
    nc: Option<f64>,
    /// Residue table directory.
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct SolverArgs {
    #[arg(long)]
    solver: Option<SolverKind>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    t_hot: Option<f64>,
    #[arg(long)]
    t_cold: Option<f64>,
    #[arg(long)]
    max_exact_vars: Option<usize>,
}

fn parse_point(s: &str) -> Result<Vec3, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(v).map_err(|_| "expected x,y,z".to_string())
}

impl InputArgs {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if self.structure.is_some() {
            cfg.structure = self.structure.clone();
        }
        if self.reference_peptide.is_some() {
            cfg.reference_peptide = self.reference_peptide.clone();
        }
        if !self.points.is_empty() {
            cfg.seeds = self.points.clone();
        }
        match (self.start, self.end) {
            (Some(a), Some(b)) => cfg.endpoints = Some([a, b]),
            (None, None) => {}
            _ => bail!("--start and --end must be given together"),
        }
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut cfg.lattice.spacing, self.spacing);
        set(&mut cfg.lattice.radius, self.radius);
        set(&mut cfg.model.cutoff, self.cutoff);
        set(&mut cfg.lattice.clash_factor, self.clash_factor);
        set(&mut cfg.stage1.p, self.tolerance);
        set(&mut cfg.contacts.nc, self.nc);
        cfg.lattice.align_principal_axes |= self.align_axes;
        cfg.stage1.literal_signs |= self.paper_literal_signs;
        if let Some(d) = self.families {
            cfg.stage1.families = d;
        }
        if self.l0.is_some() {
            cfg.stage1.l0 = self.l0;
        }
        if let Some(a) = self.penalty {
            cfg.stage1.penalty = PenaltyPolicy::Fixed(a);
        }
        if let Some(w) = &self.length_weight {
            cfg.stage1.length_weight = match w.as_str() {
                "hard" => LengthWeight::Hard,
                "soft" => LengthWeight::Soft,
                x => LengthWeight::Fixed(x.parse().with_context(|| format!("bad length weight {x:?}"))?),
            };
        }
        if self.data_dir.is_some() {
            cfg.data_dir = self.data_dir.clone();
        }
        Ok(cfg)
    }
}

impl SolverArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let s = &mut cfg.solver;
        if let Some(k) = self.solver {
            s.kind = k;
        }
        if let Some(n) = self.restarts {
            s.restarts = n;
        }
        if let Some(n) = self.sweeps {
            s.sweeps = n;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
            cfg.stage2_solver.seed = seed;
        }
        if self.t_hot.is_some() {
            s.t_hot = self.t_hot;
        }
        if self.t_cold.is_some() {
            s.t_cold = self.t_cold;
        }
        if let Some(n) = self.max_exact_vars {
            s.max_exact_vars = n;
        }
    }
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn export(problem: &QuboProblem, path: &Path, ising: bool) -> anyhow::Result<()> {
    let any = if ising {
        AnyProblem::Ising(to_ising(problem))
    } else {
        AnyProblem::Qubo(problem.clone())
    };
    export_problem(&any, path)?;
    println!("exported {} to {}", if ising { "Ising model" } else { "QUBO" }, path.display());
    Ok(())
}

fn load_qubo(path: &Path) -> anyhow::Result<QuboProblem> {
    Ok(match import_problem(path)? {
        AnyProblem::Qubo(q) => q,
        AnyProblem::Ising(i) => ising_to_qubo(&i)?,
    })
}

/// Solver results from `solve --out` or from a run archive's stage 1.
fn load_results(path: &Path) -> anyhow::Result<(Vec<SolveResult>, Vec<Option<String>>)> {
    let text = read(path)?;
    if let Ok(results) = serde_json::from_str::<Vec<SolveResult>>(&text) {
        return Ok((results, Vec::new()));
    }
    let archive = RunArchive::from_json(&text)?;
    Ok((archive.stage1.results, archive.stage1.sequences))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Lattice { input, out } => {
            let cfg = input.config()?;
            let prep = prepare(&cfg)?;
            let dump = prep.dump(cfg.contacts.nc)?;
            let l = &dump.lattice;
            println!("points {}  bonds {}  dims {:?}", l.len(), l.num_bonds(), l.dims);
            println!("endpoints s = {:?}  t = {:?}", l.s, l.t);
            for (k, label) in dump.family_labels.iter().enumerate() {
                let min = dump.field.energy.iter().map(|row| row[k]).fold(f64::INFINITY, f64::min);
                println!("family {} [{label}]: offset {:.4}, lowest field {:.4}", k + 1, dump.field.offset[k], min);
            }
            if let Some(path) = out {
                write(&path, &serde_json::to_string_pretty(&dump)?)?;
            }
        }
        Command::Qubo { input, export: target, ising } => {
            let cfg = input.config()?;
            let prep = prepare(&cfg)?;
            let q = prep.stage1_problem(cfg.contacts.nc)?;
            let counts = count_for_lattice(prep.lattice.len(), prep.lattice.num_bonds(), prep.reduced.families);
            println!("variables {}  linear {}  quadratic {}", q.num_vars(), q.linear.iter().filter(|c| **c != 0.0).count(), q.quadratic.len());
            println!("A = {}  w = {}  L0 = {}", q.meta.a, q.meta.w, q.meta.l0);
            println!("annealer count {}  gate-based count {}", counts.annealer, counts.gate_based);
            if let Some(path) = target {
                export(&q, &path, ising)?;
            }
        }
        Command::Solve {
            input,
            solver,
            problem,
            export: target,
            ising,
            out,
        } => {
            let mut cfg = input.config()?;
            solver.apply(&mut cfg);
            let (q, lattice) = match &problem {
                Some(path) => (load_qubo(path)?, None),
                None => {
                    let prep = prepare(&cfg)?;
                    (prep.stage1_problem(cfg.contacts.nc)?, Some(prep.lattice))
                }
            };
            if let Some(path) = target {
                export(&q, &path, ising)?;
            }
            let results = run_restarts(&q, &cfg.solver.solver_config(), cfg.solver.restarts, cfg.solver.seed)?;
            let best = results
                .iter()
                .min_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.bits.cmp(&b.bits)))
                .expect("at least one restart");
            println!("{} restarts with {}; best energy {:.6} (restart {})", results.len(), cfg.solver.kind, best.energy, best.restart_id);
            if let Some(lattice) = &lattice {
                let feasible = results
                    .iter()
                    .map(|r| decode_bits(&r.bits, &q, lattice).map(|d| d.report.is_feasible()))
                    .collect::<Result<Vec<_>, _>>()?;
                println!("feasible {}/{}", feasible.iter().filter(|&&f| f).count(), results.len());
            }
            if let Some(path) = out {
                write(&path, &serde_json::to_string_pretty(&results)?)?;
            }
        }
        Command::Decode {
            problem,
            results,
            lattice,
            pdb,
        } => {
            let q = load_qubo(&problem)?;
            let (results, _) = load_results(&results)?;
            let mut any = false;
            match q.registry.layout {
                Layout::Stage2 { .. } => {
                    for r in &results {
                        match decode_stage2(&r.bits, &q)? {
                            Ok(seq) => {
                                any = true;
                                println!("restart {}\t{:.6}\t{}", r.restart_id, r.energy, sequence_string(&seq));
                            }
                            Err(bad) => println!("restart {}\t{:.6}\tinvalid positions {bad:?}", r.restart_id, r.energy),
                        }
                    }
                }
                _ => {
                    let path = lattice.context("stage-1 problems need --lattice")?;
                    let dump: LatticeDump = serde_json::from_str(&read(&path)?)?;
                    let mut best: Option<(f64, _)> = None;
                    for r in &results {
                        let d = decode_bits(&r.bits, &q, &dump.lattice)?;
                        if d.report.is_feasible() {
                            any = true;
                            let p = d.peptide.expect("feasible decode");
                            let fam: Vec<String> = p.families.iter().map(|k| (k + 1).to_string()).collect();
                            println!("restart {}\t{:.6}\tfeasible\tpath {:?}\tfamilies {}", r.restart_id, r.energy, p.path, fam.join("-"));
                            if best.as_ref().is_none_or(|(e, _)| r.energy < *e) {
                                best = Some((r.energy, p));
                            }
                        } else {
                            println!("restart {}\t{:.6}\tinfeasible\t{}", r.restart_id, r.energy, d.report.violations.join("; "));
                        }
                    }
                    if let (Some(path), Some((_, p))) = (pdb, best) {
                        write(&path, &pose_pdb(&p, &dump.lattice, false))?;
                    }
                }
            }
            if !any {
                return Err(Error::Infeasible(format!("none of {} results decodes to a valid peptide", results.len())).into());
            }
        }
        Command::Analyze(a) => analyze(a)?,
        Command::Pipeline {
            input,
            solver,
            out,
            scan_endpoints,
            estimate_contacts,
        } => {
            let mut cfg = input.config()?;
            solver.apply(&mut cfg);
            cfg.scan_endpoints |= scan_endpoints;
            cfg.contacts.estimate |= estimate_contacts;
            if out.is_some() {
                cfg.output_dir = out;
            }
            let archive = cmd_pipeline(&cfg)?;
            print!("{}", cmd_report(&archive)?.text);
            if let Some(dir) = &cfg.output_dir {
                println!("outputs written to {}", dir.display());
            } else {
                print!("{}", archive.fasta);
            }
        }
        Command::Report {
            archive,
            csv,
            spectrum_csv: spectrum_out,
        } => {
            let archive = RunArchive::load(&archive)?;
            let report = cmd_report(&archive)?;
            print!("{}", report.text);
            if let Some(path) = csv {
                write(&path, &report.csv)?;
            }
            if let Some(path) = spectrum_out {
                write(&path, &report.spectrum_csv)?;
            }
        }
    }
    Ok(())
}

fn analyze(a: Analyze) -> anyhow::Result<()> {
    match a {
        Analyze::Pr {
            poses,
            reference,
            structure,
            cutoff,
            threshold,
            out,
        } => {
            let protein = parse_structure(&structure)?;
            let poses = parse_poses(&read(&poses)?)?;
            let native_pose = parse_poses(&read(&reference)?)?.remove(0);
            let native = native_contacts(&native_pose, &protein, cutoff)?;
            let curve = pr_auc(&poses, &native, &protein, cutoff, threshold)?;
            println!("poses\t{}", poses.len());
            println!("positives\t{}", curve.labels.iter().filter(|&&l| l).count());
            println!("auc\t{:.6}", curve.auc);
            if curve.degenerate {
                println!("warning\tno pose exceeds the f_nat threshold");
            }
            if let Some(path) = out {
                write(&path, &pr_csv(&curve))?;
            }
        }
        Analyze::Hist {
            designed,
            reference,
            families,
            clustering_seed,
            data_dir,
            out,
        } => {
            let raw = match data_dir {
                Some(d) => load_raw_tables(&d)?,
                None => RawTables::from_env_or_builtin()?,
            };
            let clustering = cluster_alphabet(&raw, families, clustering_seed)?;
            let designed: Vec<_> = parse_sequences(&read(&designed)?)?.into_iter().map(|(_, s)| s).collect();
            let reference: Vec<_> = parse_sequences(&read(&reference)?)?.into_iter().map(|(_, s)| s).collect();
            let positions = reference.first().map(Vec::len).context("reference set is empty")?;
            let d = family_histogram(&designed, &clustering, positions)?;
            let r = family_histogram(&reference, &clustering, positions)?;
            let top = top2_containment(&d, &r)?;
            println!("position\tdesigned_top2\treference_top\tpass");
            for (n, pass) in top.per_position.iter().enumerate() {
                let rank = |row: &[f64]| {
                    let mut idx: Vec<usize> = (0..row.len()).collect();
                    idx.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
                    idx
                };
                let dr = rank(&d.rows[n]);
                let rr = rank(&r.rows[n]);
                println!("{}\tF{},F{}\tF{}\t{}", n + 1, dr[0] + 1, dr[1.min(dr.len() - 1)] + 1, rr[0] + 1, if *pass { "yes" } else { "no" });
            }
            println!("top-2 containment: {}/{}", top.count, positions);
            if let Some(dir) = out {
                write(&dir.join("designed_hist.csv"), &histogram_csv(&d))?;
                write(&dir.join("reference_hist.csv"), &histogram_csv(&r))?;
            }
        }
        Analyze::Spectrum { results, bins, out } => {
            let (results, sequences) = load_results(&results)?;
            let s = mev_spectrum(&results, &sequences, bins)?;
            println!("results\t{}", s.n);
            println!("min\t{:.6}\nmean\t{:.6}\nmax\t{:.6}", s.min, s.mean, s.max);
            println!("distinct_sequences\t{}", s.distinct_sequences);
            println!("occupied_bins\t{}", s.occupied_bins());
            if let Some(path) = out {
                write(&path, &spectrum_csv(&s))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let infeasible = matches!(e.downcast_ref::<Error>(), Some(Error::Infeasible(_)));
            ExitCode::from(if infeasible { 1 } else { 2 })
        }
    }
}
