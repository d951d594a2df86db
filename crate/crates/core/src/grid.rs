// SPDX-License-Identifier: Apache-2.0

//! Finest-level lattices inside a root cube, and the set and function types
//! that live on them.
//!
//! Cells are addressed two ways. The row-major index (axis 0 fastest) is the
//! external address used by the JSON format and by [`GridFunction`] storage.
//! The Morton code interleaves the local coordinate bits so that every dyadic
//! subcube of the root owns a contiguous code range; the content solvers work
//! on Morton codes.

use std::cmp::Ordering;

use crate::cube::DyadicCube;
use crate::error::{Error, Result};

/// Largest number of cells a dense [`GridFunction`] may carry.
pub const MAX_DENSE_CELLS: u64 = 1 << 26;

const MAX_CODE_BITS: u32 = 60;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    root: DyadicCube,
    finest_level: i32,
    depth: u32,
}

impl Grid {
    pub fn new(root: DyadicCube, finest_level: i32) -> Result<Self> {
        let n = root.dim();
        if !(1..=3).contains(&n) {
            return Err(Error::Dimension(n));
        }
        if finest_level >= root.level {
            return Err(Error::Resolution {
                root: root.level,
                finest: finest_level,
            });
        }
        let depth = (root.level - finest_level) as u32;
        if depth > 30 || n as u32 * depth > MAX_CODE_BITS {
            return Err(Error::TooLarge { n, depth });
        }
        Ok(Self {
            root,
            finest_level,
            depth,
        })
    }

    /// Lattice on `[0, 2^root_level)^n`.
    pub fn unit(n: usize, root_level: i32, finest_level: i32) -> Result<Self> {
        Self::new(DyadicCube::unit(n, root_level), finest_level)
    }

    pub fn n(&self) -> usize {
        self.root.dim()
    }

    pub fn root(&self) -> &DyadicCube {
        &self.root
    }

    pub fn finest_level(&self) -> i32 {
        self.finest_level
    }

    /// Number of bisection levels between the root and the finest cells.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Cells per axis.
    pub fn side_cells(&self) -> u64 {
        1u64 << self.depth
    }

    pub fn cell_count(&self) -> u64 {
        1u64 << (self.depth * self.n() as u32)
    }

    pub fn cell_side(&self) -> f64 {
        f64::from(self.finest_level).exp2()
    }

    pub fn origin(&self) -> Vec<f64> {
        self.root.lower()
    }

    pub fn coords_of(&self, index: u64) -> [u64; 3] {
        let mut c = [0u64; 3];
        let mask = self.side_cells() - 1;
        for (a, slot) in c.iter_mut().enumerate().take(self.n()) {
            *slot = (index >> (a as u32 * self.depth)) & mask;
        }
        c
    }

    pub fn index_of(&self, coords: &[u64]) -> u64 {
        coords
            .iter()
            .take(self.n())
            .enumerate()
            .fold(0, |acc, (a, &c)| acc | (c << (a as u32 * self.depth)))
    }

    pub fn morton(&self, index: u64) -> u64 {
        let n = self.n();
        let c = self.coords_of(index);
        let mut code = 0u64;
        for b in 0..self.depth {
            for (a, &ca) in c.iter().enumerate().take(n) {
                code |= ((ca >> b) & 1) << (b as usize * n + a);
            }
        }
        code
    }

    pub fn index_from_morton(&self, code: u64) -> u64 {
        let c = self.demorton(code, self.depth);
        self.index_of(&c)
    }

    fn demorton(&self, code: u64, bits: u32) -> [u64; 3] {
        let n = self.n();
        let mut c = [0u64; 3];
        for b in 0..bits {
            for (a, slot) in c.iter_mut().enumerate().take(n) {
                *slot |= ((code >> (b as usize * n + a)) & 1) << b;
            }
        }
        c
    }

    /// The dyadic cube `height` levels above the finest level whose Morton
    /// code (relative to that level) is `code`.
    pub fn cube_at(&self, height: u32, code: u64) -> DyadicCube {
        let bits = self.depth - height;
        let local = self.demorton(code, bits);
        let level = self.finest_level + height as i32;
        let coords = self
            .root
            .coords
            .iter()
            .zip(local)
            .map(|(&m, l)| (m << bits) + l as i64)
            .collect();
        DyadicCube { level, coords }
    }

    pub fn cell_cube(&self, index: u64) -> DyadicCube {
        self.cube_at(0, self.morton(index))
    }

    pub fn cell_lower(&self, index: u64) -> Vec<f64> {
        let h = self.cell_side();
        let c = self.coords_of(index);
        self.origin().iter().zip(c).map(|(&o, ci)| o + ci as f64 * h).collect()
    }

    pub fn cell_center(&self, index: u64) -> Vec<f64> {
        let h = self.cell_side();
        let c = self.coords_of(index);
        self.origin()
            .iter()
            .zip(c)
            .map(|(&o, ci)| o + (ci as f64 + 0.5) * h)
            .collect()
    }

    /// Index of the half-open cell containing `x`, or `None` outside the root.
    pub fn cell_at(&self, x: &[f64]) -> Option<u64> {
        if x.len() != self.n() {
            return None;
        }
        let h = self.cell_side();
        let mut coords = [0u64; 3];
        for (a, (&o, &xi)) in self.origin().iter().zip(x).enumerate() {
            let k = ((xi - o) / h).floor();
            if !(k >= 0.0 && k < self.side_cells() as f64) {
                return None;
            }
            coords[a] = k as u64;
        }
        Some(self.index_of(&coords))
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::PointDimension {
                expected: self.n(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn check_index(&self, index: u64) -> Result<()> {
        if index < self.cell_count() {
            Ok(())
        } else {
            Err(Error::IndexOutOfBounds {
                index,
                count: self.cell_count(),
            })
        }
    }

    /// Face neighbours of a cell that lie inside the root.
    pub fn face_neighbors(&self, index: u64) -> impl Iterator<Item = u64> + '_ {
        let c = self.coords_of(index);
        let last = self.side_cells() - 1;
        (0..self.n()).flat_map(move |a| {
            let stride = 1u64 << (a as u32 * self.depth);
            let down = (c[a] > 0).then(|| index - stride);
            let up = (c[a] < last).then(|| index + stride);
            down.into_iter().chain(up)
        })
    }
}

/// A finite union of finest-level cells inside the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSet {
    grid: Grid,
    cells: Vec<u64>,
}

impl GridSet {
    pub fn new(grid: Grid, cells: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut cells: Vec<u64> = cells.into_iter().collect();
        for &c in &cells {
            grid.check_index(c)?;
        }
        cells.sort_unstable();
        cells.dedup();
        Ok(Self { grid, cells })
    }

    /// Caller guarantees sorted, unique, in-bounds indices.
    pub(crate) fn from_sorted(grid: Grid, cells: Vec<u64>) -> Self {
        debug_assert!(cells.windows(2).all(|w| w[0] < w[1]));
        Self { grid, cells }
    }

    pub fn empty(grid: Grid) -> Self {
        Self {
            grid,
            cells: Vec::new(),
        }
    }

    pub fn full(grid: Grid) -> Self {
        let cells = (0..grid.cell_count()).collect();
        Self { grid, cells }
    }

    /// Cells whose centre satisfies `pred`.
    pub fn from_centers(grid: Grid, mut pred: impl FnMut(&[f64]) -> bool) -> Self {
        let cells = (0..grid.cell_count()).filter(|&i| pred(&grid.cell_center(i))).collect();
        Self { grid, cells }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, index: u64) -> bool {
        self.cells.binary_search(&index).is_ok()
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        self.grid.cell_at(x).is_some_and(|i| self.contains(i))
    }

    /// Lebesgue measure: cell count times `cell_side^n`.
    pub fn measure(&self) -> f64 {
        self.cells.len() as f64 * self.grid.cell_side().powi(self.grid.n() as i32)
    }

    pub fn morton_codes(&self) -> Vec<u64> {
        let mut codes: Vec<u64> = self.cells.iter().map(|&c| self.grid.morton(c)).collect();
        codes.sort_unstable();
        codes
    }

    fn check_same(&self, other: &GridSet) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn union(&self, other: &GridSet) -> Result<GridSet> {
        self.check_same(other)?;
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.cells.len() && j < other.cells.len() {
            match self.cells[i].cmp(&other.cells[j]) {
                Ordering::Less => {
                    out.push(self.cells[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.cells[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(self.cells[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.cells[i..]);
        out.extend_from_slice(&other.cells[j..]);
        Ok(GridSet::from_sorted(self.grid.clone(), out))
    }

    pub fn intersection(&self, other: &GridSet) -> Result<GridSet> {
        self.check_same(other)?;
        let cells = self.cells.iter().copied().filter(|&c| other.contains(c)).collect();
        Ok(GridSet::from_sorted(self.grid.clone(), cells))
    }

    pub fn difference(&self, other: &GridSet) -> Result<GridSet> {
        self.check_same(other)?;
        let cells = self.cells.iter().copied().filter(|&c| !other.contains(c)).collect();
        Ok(GridSet::from_sorted(self.grid.clone(), cells))
    }

    pub fn is_subset(&self, other: &GridSet) -> bool {
        self.grid == other.grid && self.cells.iter().all(|&c| other.contains(c))
    }
}

/// A finite, piecewise-constant function on the finest cells, stored densely.
///
/// Values are non-negative unless the function was built with
/// [`GridFunction::signed`]; integrals reject negative values while norms take
/// absolute values first.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let f = Self::signed(grid, values)?;
        f.ensure_nonnegative()?;
        Ok(f)
    }

    /// Accepts negative (but finite) values.
    pub fn signed(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if grid.cell_count() > MAX_DENSE_CELLS {
            return Err(Error::TooLarge {
                n: grid.n(),
                depth: grid.depth(),
            });
        }
        if values.len() as u64 != grid.cell_count() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.cell_count(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i as u64 });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Result<Self> {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        let len = grid.cell_count();
        if len > MAX_DENSE_CELLS {
            return Err(Error::TooLarge {
                n: grid.n(),
                depth: grid.depth(),
            });
        }
        Self::new(grid, vec![c; len as usize])
    }

    pub fn indicator(set: &GridSet) -> Result<Self> {
        let mut f = Self::zeros(set.grid().clone())?;
        for &c in set.cells() {
            f.values[c as usize] = 1.0;
        }
        Ok(f)
    }

    /// Samples `g` at every cell centre.
    pub fn from_centers(grid: Grid, mut g: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        if grid.cell_count() > MAX_DENSE_CELLS {
            return Err(Error::TooLarge {
                n: grid.n(),
                depth: grid.depth(),
            });
        }
        let values = (0..grid.cell_count()).map(|i| g(&grid.cell_center(i))).collect();
        Self::signed(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, index: u64) -> f64 {
        self.values[index as usize]
    }

    /// Value of the cell containing `x`.
    pub fn value_at(&self, x: &[f64]) -> Result<f64> {
        self.grid.check_point(x)?;
        self.grid
            .cell_at(x)
            .map(|i| self.value(i))
            .ok_or_else(|| Error::Geometry(format!("point {x:?} lies outside the root")))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn ensure_nonnegative(&self) -> Result<()> {
        match self.values.iter().position(|&v| v < 0.0) {
            None => Ok(()),
            Some(i) => Err(Error::NegativeValue {
                index: i as u64,
                value: self.values[i],
            }),
        }
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, g: impl Fn(f64) -> f64) -> Result<Self> {
        Self::signed(self.grid.clone(), self.values.iter().map(|&v| g(v)).collect())
    }

    pub fn abs(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn scale(&self, a: f64) -> Result<Self> {
        self.map(|v| a * v)
    }

    pub fn zip_with(&self, other: &Self, g: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| g(a, b)).collect();
        Self::signed(self.grid.clone(), values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Cells carrying a non-zero value.
    pub fn support(&self) -> GridSet {
        let cells = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i as u64)
            .collect();
        GridSet::from_sorted(self.grid.clone(), cells)
    }

    /// `true` if every value is `<=` the matching value of `other`.
    pub fn le(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid2(finest: i32) -> Grid {
        Grid::unit(2, 0, finest).unwrap()
    }

    #[test]
    fn morton_round_trip() {
        for g in [grid2(-3), Grid::unit(3, 1, -2).unwrap(), Grid::unit(1, 0, -5).unwrap()] {
            let mut codes: Vec<u64> = (0..g.cell_count()).map(|i| g.morton(i)).collect();
            for i in 0..g.cell_count() {
                assert_eq!(g.index_from_morton(g.morton(i)), i);
            }
            codes.sort_unstable();
            codes.dedup();
            assert_eq!(codes.len() as u64, g.cell_count());
        }
    }

    #[test]
    fn subcube_codes_are_contiguous() {
        let g = grid2(-3);
        // every level -1 cube owns 16 consecutive codes
        for i in 0..g.cell_count() {
            let code = g.morton(i);
            let cube = g.cube_at(2, code >> 4);
            assert!(cube.contains_cube(&g.cell_cube(i)));
        }
    }

    #[test]
    fn cell_geometry() {
        let g = Grid::new(DyadicCube::new(1, vec![-1, 0]).unwrap(), -1).unwrap();
        assert_eq!(g.origin(), vec![-2.0, 0.0]);
        assert_eq!(g.cell_count(), 16);
        let i = g.cell_at(&[-0.1, 1.9]).unwrap();
        assert_eq!(g.coords_of(i)[..2], [3, 3]);
        assert_eq!(g.cell_center(i), vec![-0.25, 1.75]);
        assert!(g.cell_at(&[0.0, 1.0]).is_none());
        let cube = g.cell_cube(i);
        assert_eq!(cube.level, -1);
        assert_eq!(cube.coords, vec![-1, 3]);
    }

    #[test]
    fn face_neighbor_counts() {
        let g = grid2(-2);
        let corner = g.index_of(&[0, 0]);
        let inner = g.index_of(&[1, 2]);
        assert_eq!(g.face_neighbors(corner).count(), 2);
        assert_eq!(g.face_neighbors(inner).count(), 4);
    }

    #[test]
    fn set_algebra() {
        let g = grid2(-2);
        let a = GridSet::new(g.clone(), [0, 1, 2, 5]).unwrap();
        let b = GridSet::new(g.clone(), [2, 3, 5, 9]).unwrap();
        assert_eq!(a.union(&b).unwrap().cells(), &[0, 1, 2, 3, 5, 9]);
        assert_eq!(a.intersection(&b).unwrap().cells(), &[2, 5]);
        assert_eq!(a.difference(&b).unwrap().cells(), &[0, 1]);
        assert!(a.intersection(&b).unwrap().is_subset(&a));
        assert_eq!(GridSet::full(g.clone()).measure(), 1.0);
    }

    #[test]
    fn out_of_bounds_cell_rejected() {
        let g = grid2(-2);
        assert!(matches!(
            GridSet::new(g, [16]),
            Err(Error::IndexOutOfBounds { index: 16, count: 16 })
        ));
    }

    #[test]
    fn function_validation() {
        let g = grid2(-1);
        assert!(GridFunction::new(g.clone(), vec![0.0, 1.0, 2.0, -1.0]).is_err());
        assert!(GridFunction::signed(g.clone(), vec![0.0, 1.0, 2.0, -1.0]).is_ok());
        assert!(matches!(
            GridFunction::signed(g.clone(), vec![0.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(GridFunction::new(g, vec![0.0; 3]).is_err());
    }
}
