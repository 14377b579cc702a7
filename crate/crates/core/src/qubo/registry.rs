use serde::{Deserialize, Serialize};

/// Meaning of one binary variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum VarLabel {
    /// Family `family` occupies lattice point `point`.
    Site { point: usize, family: usize },
    /// A chemical bond between adjacent points `i < j`.
    Bond { i: usize, j: usize },
    /// `Site{i, family} AND Bond{i, j}`, attached to the lower endpoint `i`.
    Ancilla { i: usize, j: usize, family: usize },
    /// Residue type `residue` (alphabet index) at chain position `position`.
    Residue { position: usize, residue: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Layout {
    /// Sites `point * D + k`, then bonds, then ancillas `(bond, k)`.
    Stage1 {
        points: usize,
        families: usize,
        bonds: Vec<(usize, usize)>,
    },
    /// Residue variables `position * residues + k`.
    Stage2 { positions: usize, residues: usize },
    /// Imported labels that follow neither layout.
    Generic,
}

/// Dense index assignment for every variable of a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableRegistry {
    pub layout: Layout,
    labels: Vec<VarLabel>,
}

impl VariableRegistry {
    /// `bonds` must be sorted unordered pairs `(i, j)` with `i < j`.
    pub fn stage1(points: usize, families: usize, bonds: &[(usize, usize)]) -> Self {
        let mut labels = Vec::with_capacity(points * families + bonds.len() * (families + 1));
        for point in 0..points {
            for family in 0..families {
                labels.push(VarLabel::Site { point, family });
            }
        }
        labels.extend(bonds.iter().map(|&(i, j)| VarLabel::Bond { i, j }));
        for &(i, j) in bonds {
            for family in 0..families {
                labels.push(VarLabel::Ancilla { i, j, family });
            }
        }
        VariableRegistry {
            layout: Layout::Stage1 {
                points,
                families,
                bonds: bonds.to_vec(),
            },
            labels,
        }
    }

    pub fn stage2(positions: usize, residues: usize) -> Self {
        let mut labels = Vec::with_capacity(positions * residues);
        for position in 0..positions {
            for residue in 0..residues {
                labels.push(VarLabel::Residue { position, residue });
            }
        }
        VariableRegistry {
            layout: Layout::Stage2 { positions, residues },
            labels,
        }
    }

    /// Recovers the structured layout when the labels match one exactly.
    pub fn from_labels(labels: Vec<VarLabel>) -> Self {
        let mut points = 0;
        let mut families = 0;
        let mut bonds = Vec::new();
        let mut positions = 0;
        let mut residues = 0;
        for l in &labels {
            match *l {
                VarLabel::Site { point, family } => {
                    points = points.max(point + 1);
                    families = families.max(family + 1);
                }
                VarLabel::Bond { i, j } => bonds.push((i, j)),
                VarLabel::Ancilla { .. } => {}
                VarLabel::Residue { position, residue } => {
                    positions = positions.max(position + 1);
                    residues = residues.max(residue + 1);
                }
            }
        }
        let candidates = [
            VariableRegistry::stage1(points, families, &bonds),
            VariableRegistry::stage2(positions, residues),
        ];
        for c in candidates {
            if !labels.is_empty() && c.labels == labels {
                return c;
            }
        }
        VariableRegistry {
            layout: Layout::Generic,
            labels,
        }
    }

    pub fn total(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[VarLabel] {
        &self.labels
    }

    pub fn families(&self) -> usize {
        match &self.layout {
            Layout::Stage1 { families, .. } => *families,
            Layout::Stage2 { residues, .. } => *residues,
            Layout::Generic => 0,
        }
    }

    /// Points (stage 1) or chain positions (stage 2).
    pub fn points(&self) -> usize {
        match &self.layout {
            Layout::Stage1 { points, .. } => *points,
            Layout::Stage2 { positions, .. } => *positions,
            Layout::Generic => 0,
        }
    }

    pub fn bonds(&self) -> &[(usize, usize)] {
        match &self.layout {
            Layout::Stage1 { bonds, .. } => bonds,
            _ => &[],
        }
    }

    /// Index of the site (or residue) variable for `(point, family)`.
    #[inline]
    pub fn site(&self, point: usize, family: usize) -> usize {
        point * self.families() + family
    }

    /// Index of the `b`-th bond variable.
    #[inline]
    pub fn bond(&self, b: usize) -> usize {
        self.points() * self.families() + b
    }

    #[inline]
    pub fn ancilla(&self, b: usize, family: usize) -> usize {
        let d = self.families();
        self.points() * d + self.bonds().len() + b * d + family
    }

    /// Position of the bond `{i, j}` in the bond list.
    pub fn bond_position(&self, i: usize, j: usize) -> Option<usize> {
        self.bonds().binary_search(&(i.min(j), i.max(j))).ok()
    }
}
