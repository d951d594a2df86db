// SPDX-License-Identifier: Apache-2.0

//! Dyadic Hausdorff content of grid sets.
//!
//! The content of `E` is the minimum of `Σ ℓ(Q)^δ` over covers of `E` by
//! dyadic cubes inside the root. On the cube tree this is the recursion
//! `C(Q) = 0` if `Q` misses `E`, else `min(ℓ(Q)^δ, Σ C(child))`, with finest
//! cells costing their own `ℓ^δ`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cube::DyadicCube;
use crate::error::{check_delta, Error, Result};
use crate::grid::{Grid, GridSet};

/// Largest leaf count accepted by [`brute_force_content`].
pub const BRUTE_FORCE_MAX_CELLS: u64 = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentResult {
    pub value: f64,
    pub delta: f64,
    #[serde(rename = "cover")]
    pub optimal_cover: Vec<DyadicCube>,
}

/// `ℓ^δ` for each height above the finest level, `0..=depth`.
pub(crate) fn cost_table(grid: &Grid, delta: f64) -> Vec<f64> {
    (0..=grid.depth())
        .map(|h| (f64::from(grid.finest_level() + h as i32) * delta).exp2())
        .collect()
}

/// Parent-versus-children choice. Ties keep the parent.
#[inline]
fn combine(parent: f64, children: f64) -> (f64, bool) {
    if parent <= children {
        (parent, true)
    } else {
        (children, false)
    }
}

struct Solved {
    value: f64,
    /// Per height, the sorted `(code, covered_by_self)` decisions.
    decisions: Vec<Vec<(u64, bool)>>,
}

fn solve(grid: &Grid, codes: &[u64], costs: &[f64], keep: bool) -> Solved {
    let n = grid.n() as u32;
    let mut decisions = Vec::new();
    let mut current: Vec<(u64, f64)> = codes.iter().map(|&c| (c, costs[0])).collect();
    if keep {
        decisions.push(codes.iter().map(|&c| (c, true)).collect());
    }
    for &parent_cost in &costs[1..] {
        let mut next = Vec::with_capacity(current.len() / 2 + 1);
        let mut flags = Vec::new();
        let mut i = 0;
        while i < current.len() {
            let p = current[i].0 >> n;
            let mut sum = 0.0;
            while i < current.len() && current[i].0 >> n == p {
                sum += current[i].1;
                i += 1;
            }
            let (cost, own) = combine(parent_cost, sum);
            next.push((p, cost));
            if keep {
                flags.push((p, own));
            }
        }
        current = next;
        if keep {
            decisions.push(flags);
        }
    }
    Solved {
        value: current.first().map_or(0.0, |c| c.1),
        decisions,
    }
}

fn reconstruct(grid: &Grid, decisions: &[Vec<(u64, bool)>]) -> Vec<DyadicCube> {
    let n = grid.n() as u32;
    let mut cover = Vec::new();
    let top = decisions.len() - 1;
    let mut stack: Vec<(usize, u64)> = decisions[top].iter().map(|d| (top, d.0)).collect();
    while let Some((h, code)) = stack.pop() {
        let level = &decisions[h];
        let own = level
            .binary_search_by_key(&code, |d| d.0)
            .map(|k| level[k].1)
            .unwrap_or(true);
        if own || h == 0 {
            cover.push(grid.cube_at(h as u32, code));
            continue;
        }
        let below = &decisions[h - 1];
        let start = below.partition_point(|d| d.0 < code << n);
        let end = below.partition_point(|d| d.0 < (code + 1) << n);
        // reversed so the stack pops children in Morton order
        stack.extend(below[start..end].iter().rev().map(|d| (h - 1, d.0)));
    }
    cover
}

/// Exact dyadic content with an optimal cover.
pub fn dyadic_content(set: &GridSet, delta: f64) -> Result<ContentResult> {
    let grid = set.grid();
    check_delta(delta, grid.n())?;
    if set.is_empty() {
        return Ok(ContentResult {
            value: 0.0,
            delta,
            optimal_cover: Vec::new(),
        });
    }
    let costs = cost_table(grid, delta);
    let solved = solve(grid, &set.morton_codes(), &costs, true);
    Ok(ContentResult {
        value: solved.value,
        delta,
        optimal_cover: reconstruct(grid, &solved.decisions),
    })
}

/// Content value only, skipping cover reconstruction.
pub fn content_value(set: &GridSet, delta: f64) -> Result<f64> {
    check_delta(delta, set.grid().n())?;
    Ok(content_of_codes(set.grid(), &set.morton_codes(), delta))
}

/// Content of a set given by sorted Morton codes. `delta` must already be valid.
pub(crate) fn content_of_codes(grid: &Grid, codes: &[u64], delta: f64) -> f64 {
    if codes.is_empty() {
        return 0.0;
    }
    let costs = cost_table(grid, delta);
    solve(grid, codes, &costs, false).value
}

/// Content of a growing set, updated one cell at a time.
///
/// Each insertion re-evaluates the cell's ancestors only, summing children in
/// Morton order so the result matches [`dyadic_content`] bit for bit.
#[derive(Debug, Clone)]
pub struct ContentAccumulator {
    n: u32,
    costs: Vec<f64>,
    levels: Vec<HashMap<u64, f64>>,
}

impl ContentAccumulator {
    pub fn new(grid: &Grid, delta: f64) -> Result<Self> {
        check_delta(delta, grid.n())?;
        Ok(Self::new_unchecked(grid, delta))
    }

    pub(crate) fn new_unchecked(grid: &Grid, delta: f64) -> Self {
        let costs = cost_table(grid, delta);
        Self {
            n: grid.n() as u32,
            levels: vec![HashMap::new(); costs.len()],
            costs,
        }
    }

    /// Adds the cell with Morton code `code`.
    pub fn insert(&mut self, code: u64) {
        if self.levels[0].contains_key(&code) {
            return;
        }
        self.levels[0].insert(code, self.costs[0]);
        let fan = 1u64 << self.n;
        let mut child = code;
        for h in 1..self.levels.len() {
            let parent = child >> self.n;
            let below = &self.levels[h - 1];
            let mut sum = 0.0;
            for j in 0..fan {
                if let Some(&c) = below.get(&(parent << self.n | j)) {
                    sum += c;
                }
            }
            let (cost, _) = combine(self.costs[h], sum);
            if self.levels[h].insert(parent, cost) == Some(cost) {
                break;
            }
            child = parent;
        }
    }

    pub fn value(&self) -> f64 {
        self.levels
            .last()
            .and_then(|top| top.values().next().copied())
            .unwrap_or(0.0)
    }
}

/// Exhaustive oracle: the minimum over every cut of the cube tree (every
/// antichain partitioning the root) of the summed cost of the cut's cubes
/// that meet `set`. Any cover can be shrunk to such a sub-antichain without
/// increasing its cost, so this equals the content.
pub fn brute_force_content(set: &GridSet, delta: f64) -> Result<f64> {
    let grid = set.grid();
    check_delta(delta, grid.n())?;
    if grid.cell_count() > BRUTE_FORCE_MAX_CELLS {
        return Err(Error::OracleTooLarge {
            max: BRUTE_FORCE_MAX_CELLS,
            got: grid.cell_count(),
        });
    }
    let n = grid.n() as u32;
    let depth = grid.depth();
    let cells: Vec<DyadicCube> = set.cells().iter().map(|&c| grid.cell_cube(c)).collect();
    let cuts = enumerate_cuts(n, depth, 0);
    let best = cuts
        .iter()
        .map(|cut| {
            cut.iter()
                .map(|&(h, code)| {
                    let cube = grid.cube_at(h, code);
                    if cells.iter().any(|c| cube.contains_cube(c)) {
                        cube.cost(delta)
                    } else {
                        0.0
                    }
                })
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

/// All cuts of the subtree rooted at `(height, code)`.
fn enumerate_cuts(n: u32, height: u32, code: u64) -> Vec<Vec<(u32, u64)>> {
    let mut cuts = vec![vec![(height, code)]];
    if height == 0 {
        return cuts;
    }
    let mut partial: Vec<Vec<(u32, u64)>> = vec![Vec::new()];
    for j in 0..1u64 << n {
        let child_cuts = enumerate_cuts(n, height - 1, code << n | j);
        partial = partial
            .iter()
            .flat_map(|p| {
                child_cuts.iter().map(move |c| {
                    let mut v = p.clone();
                    v.extend_from_slice(c);
                    v
                })
            })
            .collect();
    }
    cuts.extend(partial);
    cuts
}

/// Two-sided bounds `(c_low r^δ, c_high r^δ)` for the content of a ball of
/// radius `r` in dimension `n`, with `c_low = (2√n)^{-δ}` and
/// `c_high = 2^n 4^δ`.
pub fn ball_content_bounds(radius: f64, n: usize, delta: f64) -> (f64, f64) {
    let scale = radius.powf(delta);
    let c_low = (2.0 * (n as f64).sqrt()).powf(-delta);
    let c_high = (1u64 << n) as f64 * 4f64.powf(delta);
    (c_low * scale, c_high * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2(finest: i32) -> Grid {
        Grid::unit(2, 0, finest).unwrap()
    }

    #[test]
    fn single_level_zero_cube() {
        let g = Grid::unit(2, 1, 0).unwrap();
        let s = GridSet::new(g, [0]).unwrap();
        for delta in [0.3, 1.0, 2.0] {
            let r = dyadic_content(&s, delta).unwrap();
            assert_eq!(r.value, 1.0);
            assert_eq!(r.optimal_cover, vec![DyadicCube::unit(2, 0)]);
        }
    }

    #[test]
    fn full_quadrant_at_delta_one_uses_root() {
        let s = GridSet::full(g2(-1));
        let r = dyadic_content(&s, 1.0).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.optimal_cover, vec![DyadicCube::unit(2, 0)]);
    }

    #[test]
    fn diagonal_cells_at_delta_two() {
        let g = g2(-1);
        let s = GridSet::new(g.clone(), [g.index_of(&[0, 0]), g.index_of(&[1, 1])]).unwrap();
        let r = dyadic_content(&s, 2.0).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        assert_eq!(r.optimal_cover.len(), 2);
    }

    #[test]
    fn empty_set_has_zero_content() {
        let r = dyadic_content(&GridSet::empty(g2(-3)), 1.0).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.optimal_cover.is_empty());
    }

    #[test]
    fn tie_prefers_parent() {
        // δ = n: four children cost exactly the parent
        let s = GridSet::full(g2(-2));
        let r = dyadic_content(&s, 2.0).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.optimal_cover, vec![DyadicCube::unit(2, 0)]);
    }

    #[test]
    fn delta_out_of_range() {
        let s = GridSet::full(g2(-1));
        assert!(dyadic_content(&s, 0.0).is_err());
        assert!(dyadic_content(&s, 2.5).is_err());
        assert!(brute_force_content(&s, -1.0).is_err());
    }

    #[test]
    fn cover_matches_value() {
        let g = g2(-4);
        let s = GridSet::from_centers(g, |x| (x[0] - 0.4).hypot(x[1] - 0.55) < 0.3);
        for delta in [0.5, 1.0, 1.7] {
            let r = dyadic_content(&s, delta).unwrap();
            let total: f64 = r.optimal_cover.iter().map(|q| q.cost(delta)).sum();
            assert!((total - r.value).abs() < 1e-12);
            for &c in s.cells() {
                let cell = s.grid().cell_cube(c);
                assert!(r.optimal_cover.iter().any(|q| q.contains_cube(&cell)));
            }
        }
    }

    #[test]
    fn brute_force_singleton_and_full() {
        let g = g2(-2);
        let single = GridSet::new(g.clone(), [5]).unwrap();
        assert!((brute_force_content(&single, 1.3).unwrap() - 0.25f64.powf(1.3)).abs() < 1e-15);
        let full = GridSet::full(g);
        assert!((brute_force_content(&full, 2.0).unwrap() - 1.0).abs() < 1e-15);
        let big = GridSet::full(g2(-3));
        assert!(matches!(
            brute_force_content(&big, 1.0),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn cut_counts() {
        // c(0) = 1, c(h) = c(h-1)^(2^n) + 1
        assert_eq!(enumerate_cuts(2, 2, 0).len(), 17);
        assert_eq!(enumerate_cuts(1, 3, 0).len(), 26);
        assert_eq!(enumerate_cuts(3, 1, 0).len(), 2);
    }

    #[test]
    fn accumulator_matches_static_solver() {
        let g = g2(-5);
        let s = GridSet::from_centers(g.clone(), |x| (x[0] * 7.0).sin() + x[1] > 0.6);
        let mut acc = ContentAccumulator::new(&g, 1.25).unwrap();
        let mut seen = Vec::new();
        for (k, &c) in s.cells().iter().enumerate() {
            acc.insert(g.morton(c));
            seen.push(c);
            if k % 37 == 0 {
                let partial = GridSet::new(g.clone(), seen.iter().copied()).unwrap();
                assert_eq!(acc.value(), content_value(&partial, 1.25).unwrap());
            }
        }
        assert_eq!(acc.value(), content_value(&s, 1.25).unwrap());
    }

    #[test]
    fn ball_bounds_examples() {
        let (lo, hi) = ball_content_bounds(0.25, 1, 1.0);
        assert!((lo - 0.125).abs() < 1e-15);
        assert!((hi - 2.0).abs() < 1e-15);
        let (lo2, hi2) = ball_content_bounds(0.5, 1, 1.0);
        assert!((lo2 / lo - 2.0).abs() < 1e-12 && (hi2 / hi - 2.0).abs() < 1e-12);
    }
}
