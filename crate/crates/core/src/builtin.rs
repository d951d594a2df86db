// SPDX-License-Identifier: Apache-2.0

//! Named shapes and functions with documented defaults, and seeded random
//! sources.
//!
//! | name        | object                                                   |
//! |-------------|----------------------------------------------------------|
//! | `ball`      | ball at the root centre, radius `0.4 ·` root side         |
//! | `koch`      | Koch region, `s = 0.35`, depth 4                          |
//! | `staircase` | `k + 1` on the `k`-th of four slabs along axis 0          |
//! | `random(s)` | i.i.d. values from a ChaCha8 stream seeded with `s`       |

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cube::DyadicCube;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, GridSet};
use crate::raster::{koch_region, rasterize_ball, RasterMode};

pub const BALL_RADIUS_FRACTION: f64 = 0.4;
pub const KOCH_RATIO: f64 = 0.35;
pub const KOCH_DEPTH: u32 = 4;
pub const STAIRCASE_STEPS: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    Ball,
    Koch,
    Staircase,
    Random(u64),
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Ball => write!(f, "ball"),
            Builtin::Koch => write!(f, "koch"),
            Builtin::Staircase => write!(f, "staircase"),
            Builtin::Random(seed) => write!(f, "random({seed})"),
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" => Ok(Builtin::Ball),
            "koch" => Ok(Builtin::Koch),
            "staircase" => Ok(Builtin::Staircase),
            _ => {
                let seed = s
                    .strip_prefix("random(")
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| s.strip_prefix("random:"))
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown builtin `{s}`")))?;
                seed.parse()
                    .map(Builtin::Random)
                    .map_err(|_| Error::InvalidArgument(format!("bad seed in `{s}`")))
            }
        }
    }
}

impl Builtin {
    /// The builtin as a set. Functions become their support.
    pub fn set(&self, grid: &Grid) -> Result<GridSet> {
        match self {
            Builtin::Ball => ball_set(grid),
            Builtin::Koch => koch_region(KOCH_RATIO, KOCH_DEPTH, grid.root(), grid.finest_level()),
            Builtin::Staircase => Ok(staircase(grid)?.support()),
            Builtin::Random(seed) => Ok(random_set(grid, *seed, 0.5)),
        }
    }

    /// The builtin as a function. Shapes become their indicator.
    pub fn function(&self, grid: &Grid) -> Result<GridFunction> {
        match self {
            Builtin::Ball | Builtin::Koch => GridFunction::indicator(&self.set(grid)?),
            Builtin::Staircase => staircase(grid),
            Builtin::Random(seed) => random_function(grid, *seed, None),
        }
    }
}

pub fn ball_set(grid: &Grid) -> Result<GridSet> {
    let root = grid.root();
    rasterize_ball(
        &root.center(),
        BALL_RADIUS_FRACTION * root.side(),
        root,
        grid.finest_level(),
        RasterMode::Center,
    )
}

pub fn staircase(grid: &Grid) -> Result<GridFunction> {
    let per_step = (grid.side_cells() / STAIRCASE_STEPS).max(1);
    let values = (0..grid.cell_count())
        .map(|i| (grid.coords_of(i)[0] / per_step + 1) as f64)
        .collect();
    GridFunction::new(grid.clone(), values)
}

/// Independent values in `[0, 1)`, or on the lattice `{0, 1/q, …, 1}` when
/// `quantum = Some(q)`.
pub fn random_function(grid: &Grid, seed: u64, quantum: Option<u32>) -> Result<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.cell_count())
        .map(|_| match quantum {
            Some(q) => f64::from(rng.gen_range(0..=q)) / f64::from(q),
            None => rng.gen::<f64>(),
        })
        .collect();
    GridFunction::new(grid.clone(), values)
}

/// Each cell kept independently with probability `p`.
pub fn random_set(grid: &Grid, seed: u64, p: f64) -> GridSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells: Vec<u64> = (0..grid.cell_count()).filter(|_| rng.gen_bool(p)).collect();
    GridSet::new(grid.clone(), cells).expect("indices are in range")
}

/// Number of shapes in the [`corpus_function`] family.
pub const CORPUS_KINDS: u64 = 5;

/// Member `k` of a fixed family of test functions, cycling through five
/// shapes: uniform noise, noise quantized to eighths, the indicator of a
/// random ball, a few isolated unit cell masses, and a scaled random set.
pub fn corpus_function(grid: &Grid, k: u64) -> Result<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + k);
    match k % CORPUS_KINDS {
        0 => random_function(grid, rng.gen(), None),
        1 => random_function(grid, rng.gen(), Some(8)),
        2 => {
            let root = grid.root();
            let side = root.side();
            let lo = root.lower();
            let center: Vec<f64> = lo.iter().map(|&o| o + side * rng.gen_range(0.2..0.8)).collect();
            let radius = side * rng.gen_range(0.05..0.3);
            let ball = rasterize_ball(&center, radius, root, grid.finest_level(), RasterMode::Center)?;
            GridFunction::indicator(&ball)
        }
        3 => {
            let mut values = vec![0.0; grid.cell_count() as usize];
            for _ in 0..rng.gen_range(1..=6) {
                let i = rng.gen_range(0..grid.cell_count()) as usize;
                values[i] = rng.gen_range(1..=4) as f64;
            }
            GridFunction::new(grid.clone(), values)
        }
        _ => {
            let p = rng.gen_range(0.05..0.5);
            let scale = rng.gen_range(0.5..3.0);
            let set = random_set(grid, rng.gen(), p);
            GridFunction::indicator(&set)?.scale(scale)
        }
    }
}

/// Lattice on `[0, 4)^n`, which holds the unit ball centred at `(2, …, 2)`
/// together with every ball of radius up to 1 around its boundary points.
pub fn unit_ball_grid(n: usize, finest_level: i32) -> Result<Grid> {
    Grid::new(DyadicCube::unit(n, 2), finest_level)
}

pub fn unit_ball_center(n: usize) -> Vec<f64> {
    vec![2.0; n]
}

/// Indicator of the open unit ball, rasterized by cells lying entirely inside
/// it, so it vanishes on every cell that touches the unit sphere.
pub fn unit_ball_indicator(n: usize, finest_level: i32) -> Result<GridFunction> {
    let grid = unit_ball_grid(n, finest_level)?;
    let ball = rasterize_ball(&unit_ball_center(n), 1.0, grid.root(), finest_level, RasterMode::Inner)?;
    GridFunction::indicator(&ball)
}

/// `count` equally spaced points on the unit circle around the ball centre.
pub fn unit_circle_points(count: usize) -> Vec<Vec<f64>> {
    let c = unit_ball_center(2);
    (0..count)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
            vec![c[0] + theta.cos(), c[1] + theta.sin()]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for s in ["ball", "koch", "staircase", "random(17)"] {
            assert_eq!(s.parse::<Builtin>().unwrap().to_string(), s);
        }
        assert_eq!("random:5".parse::<Builtin>().unwrap(), Builtin::Random(5));
        assert!("disk".parse::<Builtin>().is_err());
        assert!("random(x)".parse::<Builtin>().is_err());
    }

    #[test]
    fn random_sources_are_seeded() {
        let g = Grid::unit(2, 0, -4).unwrap();
        assert_eq!(
            random_function(&g, 9, None).unwrap(),
            random_function(&g, 9, None).unwrap()
        );
        assert_ne!(
            random_function(&g, 9, None).unwrap(),
            random_function(&g, 10, None).unwrap()
        );
        let q = random_function(&g, 3, Some(8)).unwrap();
        assert!(q.values().iter().all(|v| (v * 8.0).fract() == 0.0));
    }

    #[test]
    fn corpus_is_deterministic_and_nonnegative() {
        let g = Grid::unit(2, 0, -4).unwrap();
        for k in 0..2 * CORPUS_KINDS {
            let f = corpus_function(&g, k).unwrap();
            assert_eq!(f, corpus_function(&g, k).unwrap());
            assert!(f.is_nonnegative());
            assert!(f.max_value() > 0.0);
        }
    }

    #[test]
    fn staircase_levels() {
        let g = Grid::unit(2, 0, -3).unwrap();
        let f = staircase(&g).unwrap();
        assert_eq!(f.min_value(), 1.0);
        assert_eq!(f.max_value(), 4.0);
        assert_eq!(f.value(g.index_of(&[5, 7])), 3.0);
    }

    #[test]
    fn unit_ball_vanishes_on_circle() {
        let f = unit_ball_indicator(2, -6).unwrap();
        for x in unit_circle_points(16) {
            assert_eq!(f.value_at(&x).unwrap(), 0.0);
        }
        assert_eq!(f.value_at(&[2.0, 2.0]).unwrap(), 1.0);
    }
}
