//! Cubic grid restricted to the binding pocket.

use std::collections::HashMap;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use super::pdb::ProteinStructure;
use crate::error::{Error, Result};
use crate::geometry::{add, dist2, scale, sub, Vec3};

/// Distance between adjacent grid points (Å), one peptide bond.
pub const DEFAULT_SPACING: f64 = 3.8;
/// Grid points farther than this from every seed are dropped (Å).
pub const DEFAULT_RADIUS: f64 = 7.6;
/// Clash threshold as a multiple of the smallest residue diameter.
pub const DEFAULT_CLASH_FACTOR: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub spacing: f64,
    pub radius: f64,
    /// Points closer than this to any protein C-alpha are discarded (Å).
    pub clash_distance: f64,
    /// Orient the grid along the principal axes of the seed cloud.
    pub align_principal_axes: bool,
}

impl LatticeParams {
    /// Defaults with the clash distance derived from the smallest diameter.
    pub fn with_min_sigma(min_sigma: f64) -> Self {
        LatticeParams {
            spacing: DEFAULT_SPACING,
            radius: DEFAULT_RADIUS,
            clash_distance: DEFAULT_CLASH_FACTOR * min_sigma,
            align_principal_axes: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PocketLattice {
    pub points: Vec<Vec3>,
    /// Integer grid coordinates of each point.
    pub grid: Vec<[i32; 3]>,
    /// Unordered neighbour pairs `(i, j)` with `i < j`, sorted.
    pub adjacency: Vec<(usize, usize)>,
    pub s: Option<usize>,
    pub t: Option<usize>,
    pub dims: [usize; 3],
    pub spacing: f64,
    pub origin: Vec3,
    /// Grid axes as unit vectors in the structure frame.
    pub axes: [Vec3; 3],
}

impl PocketLattice {
    /// Full `lx × ly × lz` box with the origin at zero, indexed x-major.
    pub fn box_lattice(dims: [usize; 3], spacing: f64) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::EmptyLattice);
        }
        if !(spacing > 0.0) {
            return Err(Error::InvalidParameter(format!("spacing must be positive, got {spacing}")));
        }
        let mut grid = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for x in 0..dims[0] as i32 {
            for y in 0..dims[1] as i32 {
                for z in 0..dims[2] as i32 {
                    grid.push([x, y, z]);
                }
            }
        }
        Ok(Self::from_grid(grid, spacing, [0.0; 3], IDENTITY))
    }

    /// Assembles a lattice from integer grid coordinates.
    pub fn from_grid(grid: Vec<[i32; 3]>, spacing: f64, origin: Vec3, axes: [Vec3; 3]) -> Self {
        let points = grid
            .iter()
            .map(|g| {
                let mut p = origin;
                for (a, &c) in axes.iter().zip(g) {
                    p = add(p, scale(*a, c as f64 * spacing));
                }
                p
            })
            .collect();
        let index: HashMap<[i32; 3], usize> = grid.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        let mut adjacency = Vec::new();
        for (i, g) in grid.iter().enumerate() {
            for axis in 0..3 {
                let mut n = *g;
                n[axis] += 1;
                if let Some(&j) = index.get(&n) {
                    adjacency.push((i.min(j), i.max(j)));
                }
            }
        }
        adjacency.sort_unstable();
        let mut dims = [0; 3];
        for (axis, d) in dims.iter_mut().enumerate() {
            let lo = grid.iter().map(|g| g[axis]).min().unwrap_or(0);
            let hi = grid.iter().map(|g| g[axis]).max().unwrap_or(-1);
            *d = (hi - lo + 1).max(0) as usize;
        }
        PocketLattice {
            points,
            grid,
            adjacency,
            s: None,
            t: None,
            dims,
            spacing,
            origin,
            axes,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn num_bonds(&self) -> usize {
        self.adjacency.len()
    }

    /// Neighbour lists, ascending.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for &(i, j) in &self.adjacency {
            out[i].push(j);
            out[j].push(i);
        }
        out.iter_mut().for_each(|v| v.sort_unstable());
        out
    }

    pub fn are_adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency.binary_search(&(i.min(j), i.max(j))).is_ok()
    }

    pub fn endpoints(&self) -> Result<(usize, usize)> {
        match (self.s, self.t) {
            (Some(s), Some(t)) if s != t && s < self.len() && t < self.len() => Ok((s, t)),
            _ => Err(Error::InvalidParameter("lattice endpoints are not set".into())),
        }
    }

    pub fn with_endpoints(mut self, s: usize, t: usize) -> Result<Self> {
        if s == t || s >= self.len() || t >= self.len() {
            return Err(Error::InvalidParameter(format!("invalid endpoints ({s}, {t}) for {} points", self.len())));
        }
        self.s = Some(s);
        self.t = Some(t);
        Ok(self)
    }

    /// Index of the point nearest to `p`, lowest index on ties.
    pub fn nearest(&self, p: Vec3) -> Option<usize> {
        self.ranked_by_distance(p).first().copied()
    }

    fn ranked_by_distance(&self, p: Vec3) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        // stable sort keeps index order among equal distances
        idx.sort_by(|&a, &b| dist2(self.points[a], p).total_cmp(&dist2(self.points[b], p)));
        idx
    }
}

const IDENTITY: [Vec3; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Principal axes of a point cloud, largest variance last so that the
/// long pocket direction maps to the grid z axis. The y and z axes have
/// their largest component positive; x completes a right-handed frame.
pub fn principal_axes(points: &[Vec3]) -> [Vec3; 3] {
    if points.len() < 2 {
        return IDENTITY;
    }
    let n = points.len() as f64;
    let mean = points.iter().fold([0.0; 3], |acc, p| add(acc, *p));
    let mean = scale(mean, 1.0 / n);
    let mut cov = Matrix3::<f64>::zeros();
    for p in points {
        let d = Vector3::from(sub(*p, mean));
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov / n);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut axes = [[0.0; 3]; 3];
    for (slot, &c) in axes.iter_mut().zip(&order) {
        let v = eig.eigenvectors.column(c);
        let mut a = [v[0], v[1], v[2]];
        let big = (0..3).max_by(|&x, &y| a[x].abs().total_cmp(&a[y].abs())).unwrap_or(0);
        if a[big] < 0.0 {
            a = scale(a, -1.0);
        }
        *slot = a;
    }
    let x = Vector3::from(axes[1]).cross(&Vector3::from(axes[2]));
    axes[0] = [x[0], x[1], x[2]];
    axes
}

/// Grid points within `radius` of a seed that do not clash with the protein.
///
/// The grid is anchored at the first seed point. Points are ordered by their
/// integer coordinates (x-major).
pub fn build_lattice(protein: &ProteinStructure, seeds: &[Vec3], params: &LatticeParams) -> Result<PocketLattice> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("at least one seed point is required".into()));
    }
    if !(params.radius > 0.0) || !(params.spacing > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius and spacing must be positive, got {} and {}",
            params.radius, params.spacing
        )));
    }
    if !(params.clash_distance >= 0.0) {
        return Err(Error::InvalidParameter(format!("clash distance must be non-negative, got {}", params.clash_distance)));
    }
    let origin = seeds[0];
    let axes = if params.align_principal_axes {
        principal_axes(seeds)
    } else {
        IDENTITY
    };
    let h = params.spacing;
    let reach = (params.radius / h).ceil() as i32 + 1;
    let mut lo = [i32::MAX; 3];
    let mut hi = [i32::MIN; 3];
    for p in seeds {
        let d = sub(*p, origin);
        for axis in 0..3 {
            let c = (d[0] * axes[axis][0] + d[1] * axes[axis][1] + d[2] * axes[axis][2]) / h;
            lo[axis] = lo[axis].min(c.floor() as i32 - reach);
            hi[axis] = hi[axis].max(c.ceil() as i32 + reach);
        }
    }
    let r2 = params.radius * params.radius * (1.0 + 1e-12);
    let clash2 = params.clash_distance * params.clash_distance;
    let cas = protein.ca_positions();
    let mut grid = Vec::new();
    for x in lo[0]..=hi[0] {
        for y in lo[1]..=hi[1] {
            for z in lo[2]..=hi[2] {
                let g = [x, y, z];
                let mut p = origin;
                for (a, &c) in axes.iter().zip(&g) {
                    p = add(p, scale(*a, c as f64 * h));
                }
                if !seeds.iter().any(|s| dist2(*s, p) <= r2) {
                    continue;
                }
                if cas.iter().any(|c| dist2(*c, p) < clash2) {
                    continue;
                }
                grid.push(g);
            }
        }
    }
    if grid.is_empty() {
        return Err(Error::EmptyLattice);
    }
    let lattice = PocketLattice::from_grid(grid, h, origin, axes);
    log::debug!("pocket lattice: {} points, {} bonds, dims {:?}", lattice.len(), lattice.num_bonds(), lattice.dims);
    Ok(lattice)
}

/// Nearest grid points to `a` and `b`. If both map to the same point, `t`
/// takes the next-nearest point to `b`.
pub fn choose_endpoints(lattice: &PocketLattice, a: Vec3, b: Vec3) -> Result<(usize, usize)> {
    if lattice.is_empty() {
        return Err(Error::EmptyLattice);
    }
    if lattice.len() < 2 {
        return Err(Error::InvalidParameter("cannot place two endpoints on a single-point lattice".into()));
    }
    let s = lattice.ranked_by_distance(a)[0];
    let ranked_b = lattice.ranked_by_distance(b);
    let t = if ranked_b[0] == s { ranked_b[1] } else { ranked_b[0] };
    Ok((s, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist;

    fn no_protein() -> ProteinStructure {
        ProteinStructure::default()
    }

    fn params(radius: f64) -> LatticeParams {
        LatticeParams {
            spacing: 3.8,
            radius,
            clash_distance: 0.0,
            align_principal_axes: false,
        }
    }

    #[test]
    fn single_seed_gives_plus_shape() {
        let l = build_lattice(&no_protein(), &[[1.0, 2.0, 3.0]], &params(4.0)).unwrap();
        assert_eq!(l.len(), 7);
        assert_eq!(l.num_bonds(), 6);
        assert_eq!(l.dims, [3, 3, 3]);
        let center = l.nearest([1.0, 2.0, 3.0]).unwrap();
        assert_eq!(l.points[center], [1.0, 2.0, 3.0]);
        assert!(l.adjacency.iter().all(|&(i, j)| i == center || j == center));
    }

    #[test]
    fn tiny_radius() {
        let l = build_lattice(&no_protein(), &[[0.0; 3]], &params(0.1)).unwrap();
        assert_eq!(l.len(), 1);
        let mut p = params(0.1);
        p.clash_distance = 1.0;
        let protein = crate::synthetic::helix_protein(1, [0.0; 3]);
        assert!(matches!(build_lattice(&protein, &[[0.0; 3]], &p), Err(Error::EmptyLattice)));
    }

    #[test]
    fn retained_points_and_adjacency_invariants() {
        let seeds = [[0.0, 0.0, 0.0], [0.5, 0.3, 3.8], [0.2, -0.4, 7.6], [0.0, 0.0, 11.4]];
        for align in [false, true] {
            let mut p = params(7.6);
            p.align_principal_axes = align;
            let l = build_lattice(&no_protein(), &seeds, &p).unwrap();
            for q in &l.points {
                assert!(seeds.iter().any(|s| dist(*s, *q) <= 7.6 + 1e-9));
            }
            for &(i, j) in &l.adjacency {
                assert!((dist(l.points[i], l.points[j]) - 3.8).abs() < 1e-9);
                let diff: Vec<i32> = (0..3).map(|a| (l.grid[i][a] - l.grid[j][a]).abs()).collect();
                assert_eq!(diff.iter().sum::<i32>(), 1);
            }
            // every pair of points one step apart is adjacent
            let mut count = 0;
            for i in 0..l.len() {
                for j in i + 1..l.len() {
                    if (dist(l.points[i], l.points[j]) - 3.8).abs() < 1e-6 {
                        count += 1;
                        assert!(l.are_adjacent(i, j));
                    }
                }
            }
            assert_eq!(count, l.num_bonds());
        }
    }

    #[test]
    fn principal_axes_follow_the_seed_line() {
        let seeds: Vec<Vec3> = (0..6).map(|i| [i as f64 * 2.0, i as f64 * 2.0, 0.1 * (i % 2) as f64]).collect();
        let axes = principal_axes(&seeds);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((axes[2][0] - s).abs() < 1e-2 && (axes[2][1] - s).abs() < 1e-2);
        let det = Matrix3::from_columns(&[Vector3::from(axes[0]), Vector3::from(axes[1]), Vector3::from(axes[2])]).determinant();
        assert!((det - 1.0).abs() < 1e-9);
    }

    #[test]
    fn clash_filter_removes_points_near_protein() {
        let protein = crate::synthetic::helix_protein(1, [3.8, 0.0, 0.0]);
        let mut p = params(4.0);
        p.clash_distance = 1.0;
        let l = build_lattice(&protein, &[[0.0; 3]], &p).unwrap();
        assert_eq!(l.len(), 6);
        assert!(l.points.iter().all(|q| dist(*q, [3.8, 0.0, 0.0]) >= 1.0));
    }

    #[test]
    fn box_lattice_counts() {
        let l = PocketLattice::box_lattice([3, 3, 10], 3.8).unwrap();
        assert_eq!(l.len(), 90);
        assert_eq!(l.num_bonds(), 2 * 3 * 10 + 3 * 2 * 10 + 3 * 3 * 9);
        assert_eq!(l.dims, [3, 3, 10]);
        assert!(PocketLattice::box_lattice([0, 1, 1], 3.8).is_err());
    }

    #[test]
    fn endpoint_selection() {
        let l = PocketLattice::box_lattice([1, 3, 1], 3.8).unwrap();
        assert_eq!(choose_endpoints(&l, [0.0; 3], [0.0, 7.6, 0.0]).unwrap(), (0, 2));
        // equidistant between points 0 and 1: lower index wins
        assert_eq!(l.nearest([0.0, 1.9, 0.0]), Some(0));
        // collision: t falls back to the next-nearest point to b
        assert_eq!(choose_endpoints(&l, [0.0; 3], [0.0, 0.5, 0.0]).unwrap(), (0, 1));
        let single = PocketLattice::box_lattice([1, 1, 1], 3.8).unwrap();
        assert!(choose_endpoints(&single, [0.0; 3], [1.0; 3]).is_err());
        assert!(l.clone().with_endpoints(1, 1).is_err());
        assert_eq!(l.with_endpoints(0, 2).unwrap().endpoints().unwrap(), (0, 2));
    }
}
