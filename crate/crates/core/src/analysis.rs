//! Validation statistics: native contacts and PR curves over docked poses,
//! positional family histograms, and minimum-energy spectra.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::chem_model::{parse_sequence, AminoAcid, ClusteringResult};
use crate::error::{Error, Result};
use crate::geometry::{dist, Vec3};
use crate::pocket::{parse_models, ProteinStructure};
use crate::solve::SolveResult;

/// Native-contact C-alpha distance cutoff (Å).
pub const DEFAULT_CONTACT_CUTOFF: f64 = 8.5;
/// Poses with `f_nat` above this are positives.
pub const DEFAULT_FNAT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    /// 1 is the best-scored pose.
    pub rank: usize,
    pub coords: Vec<Vec3>,
    #[serde(default)]
    pub label: String,
}

/// `(peptide position, protein residue index)` pairs in contact.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ContactSet {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl ContactSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Multi-model PDB (one MODEL per pose, ranked in file order) or the plain
/// list format: a `pose <rank> [label]` line followed by `x y z` lines.
pub fn parse_poses(text: &str) -> Result<Vec<PoseRecord>> {
    let has_atoms = text.lines().any(|l| l.starts_with("ATOM") || l.starts_with("MODEL"));
    let poses = if has_atoms {
        parse_models(text)?
            .into_iter()
            .enumerate()
            .map(|(i, m)| PoseRecord {
                rank: i + 1,
                coords: m.ca_positions(),
                label: m.sequence(),
            })
            .collect()
    } else {
        parse_pose_list(text)?
    };
    check_ranks(&poses)?;
    Ok(poses)
}

fn parse_pose_list(text: &str) -> Result<Vec<PoseRecord>> {
    let mut poses: Vec<PoseRecord> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0].eq_ignore_ascii_case("pose") {
            let rank = fields
                .get(1)
                .and_then(|r| r.parse().ok())
                .ok_or_else(|| Error::parse(n + 1, "pose header needs a rank"))?;
            poses.push(PoseRecord {
                rank,
                coords: Vec::new(),
                label: fields[2..].join(" "),
            });
            continue;
        }
        let pose = poses.last_mut().ok_or_else(|| Error::parse(n + 1, "coordinates before the first pose header"))?;
        if fields.len() != 3 {
            return Err(Error::parse(n + 1, "expected three coordinates"));
        }
        let mut p = [0.0; 3];
        for (slot, f) in p.iter_mut().zip(&fields) {
            *slot = f.parse().map_err(|_| Error::parse(n + 1, format!("bad coordinate {f:?}")))?;
        }
        pose.coords.push(p);
    }
    if poses.is_empty() {
        return Err(Error::parse(0, "no poses found"));
    }
    Ok(poses)
}

/// Ranks must be exactly `1..=n` in some order; poses are returned sorted.
fn check_ranks(poses: &[PoseRecord]) -> Result<()> {
    let ranks: BTreeSet<usize> = poses.iter().map(|p| p.rank).collect();
    if ranks.len() != poses.len() || ranks.first() != Some(&1) || ranks.last() != Some(&poses.len()) {
        return Err(Error::InvalidParameter("pose ranks must be unique and contiguous from 1".into()));
    }
    Ok(())
}

pub fn format_pose_list(poses: &[PoseRecord]) -> String {
    let mut out = String::new();
    for p in poses {
        let _ = writeln!(out, "pose {} {}", p.rank, p.label);
        for c in &p.coords {
            let _ = writeln!(out, "{} {} {}", c[0], c[1], c[2]);
        }
    }
    out
}

pub fn native_contacts(pose: &PoseRecord, protein: &ProteinStructure, cutoff: f64) -> Result<ContactSet> {
    if pose.coords.is_empty() {
        return Err(Error::InvalidParameter(format!("pose {} has no residues", pose.rank)));
    }
    let mut set = ContactSet::default();
    for (a, &p) in pose.coords.iter().enumerate() {
        for (b, res) in protein.residues.iter().enumerate() {
            if dist(p, res.ca) <= cutoff {
                set.pairs.insert((a, b));
            }
        }
    }
    Ok(set)
}

/// Fraction of `native` pairs also present in `pose`.
pub fn f_nat(pose: &PoseRecord, native: &ContactSet, protein: &ProteinStructure, cutoff: f64) -> Result<f64> {
    if native.is_empty() {
        return Err(Error::InvalidParameter("native contact set is empty".into()));
    }
    let own = native_contacts(pose, protein, cutoff)?;
    let shared = native.pairs.intersection(&own.pairs).count();
    Ok(shared as f64 / native.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    /// `(recall, precision)` after each prefix of the ranked list.
    pub points: Vec<(f64, f64)>,
    /// Step-wise area: `sum_k (R_k - R_{k-1}) P_k`.
    pub auc: f64,
    /// No positives at all; `auc` is reported as 0.
    pub degenerate: bool,
    pub labels: Vec<bool>,
}

/// PR curve of a ranked list of binary labels (index 0 is rank 1).
pub fn pr_curve(labels: &[bool]) -> Result<PrCurve> {
    if labels.is_empty() {
        return Err(Error::InvalidParameter("no poses to rank".into()));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    let mut points = Vec::with_capacity(labels.len());
    let mut tp = 0usize;
    let mut auc = 0.0;
    let mut prev_recall = 0.0;
    for (k, &l) in labels.iter().enumerate() {
        tp += usize::from(l);
        let precision = tp as f64 / (k + 1) as f64;
        let recall = if positives == 0 { 0.0 } else { tp as f64 / positives as f64 };
        auc += (recall - prev_recall) * precision;
        prev_recall = recall;
        points.push((recall, precision));
    }
    let degenerate = positives == 0;
    if degenerate {
        log::warn!("precision-recall input has no positive poses; AUC set to 0");
    }
    Ok(PrCurve {
        points,
        auc: if degenerate { 0.0 } else { auc },
        degenerate,
        labels: labels.to_vec(),
    })
}

/// Labels each pose by `f_nat > threshold` and sweeps the ranking.
pub fn pr_auc(
    poses: &[PoseRecord],
    native: &ContactSet,
    protein: &ProteinStructure,
    cutoff: f64,
    threshold: f64,
) -> Result<PrCurve> {
    if poses.is_empty() {
        return Err(Error::InvalidParameter("no poses to rank".into()));
    }
    let mut ranked: Vec<&PoseRecord> = poses.iter().collect();
    ranked.sort_by_key(|p| p.rank);
    let labels = ranked
        .iter()
        .map(|p| f_nat(p, native, protein, cutoff).map(|f| f > threshold))
        .collect::<Result<Vec<_>>>()?;
    pr_curve(&labels)
}

/// Per-position relative frequency of each family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub families: usize,
    /// `rows[position][family]`.
    pub rows: Vec<Vec<f64>>,
    pub family_labels: Vec<String>,
}

pub fn family_histogram(sequences: &[Vec<AminoAcid>], clustering: &ClusteringResult, positions: usize) -> Result<FrequencyTable> {
    if sequences.is_empty() {
        return Err(Error::InvalidParameter("no sequences".into()));
    }
    if let Some(s) = sequences.iter().find(|s| s.len() != positions) {
        return Err(Error::ShapeMismatch(format!("sequence of length {} where {positions} was expected", s.len())));
    }
    let d = clustering.families;
    let mut rows = vec![vec![0.0; d]; positions];
    for s in sequences {
        for (row, aa) in rows.iter_mut().zip(s) {
            row[clustering.family_of(*aa)] += 1.0;
        }
    }
    let n = sequences.len() as f64;
    rows.iter_mut().flatten().for_each(|v| *v /= n);
    let family_labels = clustering
        .partition()
        .iter()
        .map(|members| members.iter().map(|a| a.code()).collect())
        .collect();
    Ok(FrequencyTable {
        families: d,
        rows,
        family_labels,
    })
}

/// Families ordered by decreasing frequency, lower index first on ties.
fn ranked_families(row: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..row.len()).collect();
    idx.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
    idx
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Top2Result {
    pub per_position: Vec<bool>,
    pub count: usize,
}

/// Whether the reference's most frequent family is among the designed
/// set's two most frequent families, per position.
pub fn top2_containment(designed: &FrequencyTable, reference: &FrequencyTable) -> Result<Top2Result> {
    if designed.rows.len() != reference.rows.len() || designed.families != reference.families {
        return Err(Error::ShapeMismatch(format!(
            "tables are {}x{} and {}x{}",
            designed.rows.len(),
            designed.families,
            reference.rows.len(),
            reference.families
        )));
    }
    let per_position: Vec<bool> = designed
        .rows
        .iter()
        .zip(&reference.rows)
        .map(|(d, r)| {
            let top = ranked_families(r)[0];
            ranked_families(d).iter().take(2).any(|&k| k == top)
        })
        .collect();
    let count = per_position.iter().filter(|&&p| p).count();
    Ok(Top2Result { per_position, count })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MevSpectrum {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// `(lower edge, upper edge, count)`.
    pub bins: Vec<(f64, f64, usize)>,
    pub distinct_sequences: usize,
}

impl MevSpectrum {
    pub fn occupied_bins(&self) -> usize {
        self.bins.iter().filter(|b| b.2 > 0).count()
    }
}

/// Histogram of best energies. `sequences[i]` is the decoded sequence of
/// result `i`, or `None` when it did not decode.
pub fn mev_spectrum(results: &[SolveResult], sequences: &[Option<String>], bins: usize) -> Result<MevSpectrum> {
    if results.is_empty() {
        return Err(Error::InvalidParameter("no results".into()));
    }
    if bins == 0 {
        return Err(Error::InvalidParameter("bin count must be positive".into()));
    }
    let energies: Vec<f64> = results.iter().map(|r| r.energy).collect();
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let max = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = energies.iter().sum::<f64>() / energies.len() as f64;
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &e in &energies {
        let b = if width > 0.0 { (((e - min) / width) as usize).min(bins - 1) } else { 0 };
        counts[b] += 1;
    }
    let edges: Vec<(f64, f64, usize)> = counts
        .iter()
        .enumerate()
        .map(|(b, &c)| (min + b as f64 * width, min + (b + 1) as f64 * width, c))
        .collect();
    let distinct: HashSet<&String> = sequences.iter().flatten().collect();
    Ok(MevSpectrum {
        n: results.len(),
        min,
        max,
        mean,
        bins: edges,
        distinct_sequences: distinct.len(),
    })
}

/// FASTA or one sequence per line; returns `(name, sequence)` pairs.
pub fn parse_sequences(text: &str) -> Result<Vec<(String, Vec<AminoAcid>)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    let fasta = text.trim_start().starts_with('>');
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('>') {
            out.push((name.trim().to_string(), String::new()));
        } else if fasta {
            out.last_mut().ok_or_else(|| Error::parse(n + 1, "sequence before header"))?.1.push_str(line);
        } else {
            out.push((format!("seq{}", out.len() + 1), line.to_string()));
        }
    }
    out.into_iter()
        .map(|(name, s)| parse_sequence(&s).map(|seq| (name, seq)))
        .collect()
}

pub fn pr_csv(curve: &PrCurve) -> String {
    let mut out = String::from("rank,label,recall,precision\n");
    for (k, ((r, p), l)) in curve.points.iter().zip(&curve.labels).enumerate() {
        let _ = writeln!(out, "{},{},{r},{p}", k + 1, u8::from(*l));
    }
    out
}

pub fn histogram_csv(table: &FrequencyTable) -> String {
    let mut out = String::from("position");
    for (k, label) in table.family_labels.iter().enumerate() {
        let _ = write!(out, ",F{}:{label}", k + 1);
    }
    out.push('\n');
    for (n, row) in table.rows.iter().enumerate() {
        let _ = write!(out, "{}", n + 1);
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn spectrum_csv(s: &MevSpectrum) -> String {
    let mut out = String::from("lower,upper,count\n");
    for (lo, hi, c) in &s.bins {
        let _ = writeln!(out, "{lo},{hi},{c}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem_model::RawTables;
    use crate::solve::SolverKind;
    use crate::synthetic;

    fn pose(rank: usize, coords: Vec<Vec3>) -> PoseRecord {
        PoseRecord {
            rank,
            coords,
            label: String::new(),
        }
    }

    fn result(e: f64) -> SolveResult {
        SolveResult {
            bits: vec![],
            energy: e,
            solver: SolverKind::Sa,
            wall_time: 0.0,
            restart_id: 0,
            seed: None,
        }
    }

    #[test]
    fn contact_examples() {
        let protein = synthetic::helix_protein(1, [0.0; 3]);
        let far = pose(1, vec![[9.0, 0.0, 0.0]]);
        assert!(native_contacts(&far, &protein, 8.5).unwrap().is_empty());
        let near = pose(1, vec![[8.4, 0.0, 0.0]]);
        assert_eq!(native_contacts(&near, &protein, 8.5).unwrap().len(), 1);
        assert!(native_contacts(&pose(1, vec![]), &protein, 8.5).is_err());
    }

    #[test]
    fn fnat_examples() {
        let protein = synthetic::helix_protein(2, [0.0, 0.0, 0.0]);
        // residues at z = 0 and z = 1.5 region; peptide bead near each
        let reference = pose(1, vec![[0.0, 0.0, -7.0], [0.0, 0.0, 40.0]]);
        let native = native_contacts(&reference, &protein, 8.5).unwrap();
        assert_eq!(f_nat(&reference, &native, &protein, 8.5).unwrap(), 1.0);
        let away = pose(2, vec![[50.0, 0.0, 0.0], [0.0, 60.0, 0.0]]);
        assert_eq!(f_nat(&away, &native, &protein, 8.5).unwrap(), 0.0);
        assert!(f_nat(&away, &ContactSet::default(), &protein, 8.5).is_err());
    }

    #[test]
    fn pr_curve_examples() {
        let c = pr_curve(&[true, true, false, false]).unwrap();
        assert_eq!(c.auc, 1.0);
        let c = pr_curve(&[false, true]).unwrap();
        assert_eq!(c.auc, 0.5);
        let c = pr_curve(&[false, false]).unwrap();
        assert!(c.degenerate && c.auc == 0.0);
        assert!(pr_curve(&[]).is_err());
        assert!(c.points.windows(2).all(|w| w[1].0 >= w[0].0));
    }

    #[test]
    fn histogram_and_top2() {
        let raw = RawTables::builtin();
        let c = crate::chem_model::cluster_alphabet(&raw, 5, 0).unwrap();
        let seqs: Vec<Vec<AminoAcid>> = ["LKFEAVSD", "LKFEAVSE", "IKWEGVTD"].iter().map(|s| parse_sequence(s).unwrap()).collect();
        let t = family_histogram(&seqs, &c, 8).unwrap();
        for row in &t.rows {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let top = top2_containment(&t, &t).unwrap();
        assert_eq!(top.count, 8);
        let one = family_histogram(&seqs[..1], &c, 8).unwrap();
        assert!(one.rows.iter().all(|r| r.iter().filter(|&&v| v == 1.0).count() == 1));
        assert!(family_histogram(&seqs, &c, 7).is_err());
        assert!(histogram_csv(&t).lines().count() == 9);
    }

    #[test]
    fn top2_tie_break() {
        let uniform = FrequencyTable {
            families: 4,
            rows: vec![vec![0.25; 4]; 4],
            family_labels: vec![String::new(); 4],
        };
        let mut reference = uniform.clone();
        for (n, row) in reference.rows.iter_mut().enumerate() {
            *row = vec![0.0; 4];
            row[n] = 1.0;
        }
        // uniform designed rows rank families 0 and 1 first
        let r = top2_containment(&uniform, &reference).unwrap();
        assert_eq!(r.per_position, vec![true, true, false, false]);
        let mut short = uniform.clone();
        short.rows.pop();
        assert!(top2_containment(&short, &reference).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let same = vec![result(-3.0); 5];
        let s = mev_spectrum(&same, &vec![Some("AAA".to_string()); 5], 10).unwrap();
        assert_eq!((s.occupied_bins(), s.distinct_sequences, s.min), (1, 1, -3.0));
        let distinct: Vec<SolveResult> = (0..6).map(|i| result(i as f64 * 1.7 - 2.0)).collect();
        let s = mev_spectrum(&distinct, &[], 1000).unwrap();
        assert_eq!(s.occupied_bins(), 6);
        assert_eq!(s.min, -2.0);
        assert!(mev_spectrum(&[], &[], 3).is_err());
    }

    #[test]
    fn pose_formats() {
        let poses = vec![pose(1, vec![[1.0, 2.0, 3.0]]), pose(2, vec![[4.0, 5.5, -6.0], [0.0, 0.0, 0.0]])];
        assert_eq!(parse_poses(&format_pose_list(&poses)).unwrap(), poses);
        let bad = "pose 1\n1 2 3\npose 3\n1 2 3\n";
        assert!(parse_poses(bad).is_err());
        assert!(parse_poses("1 2 3\n").is_err());
    }

    #[test]
    fn sequence_files() {
        let fa = parse_sequences(">a\nLKF\nEA\n>b\nWWW\n").unwrap();
        assert_eq!(fa[0].0, "a");
        assert_eq!(fa[0].1.len(), 5);
        let plain = parse_sequences("LKF\n\nAAA\n").unwrap();
        assert_eq!(plain.len(), 2);
        assert!(parse_sequences("LKX\n").is_err());
    }
}
