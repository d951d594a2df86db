// SPDX-License-Identifier: Apache-2.0

//! Empirical constants recorded on a fixed corpus.
//!
//! The corpus is members `0..CORPUS_SIZE` of [`corpus_function`] on the
//! planar unit square at finest level `-6`, averaged at radii `1/4, 1/8, 1/16`
//! from sample points with stride 2 and margin `1/4`. Each weak-type run uses
//! the threshold `t = max f / 2`.

use crate::builtin::corpus_function;
use crate::error::Result;
use crate::grid::{Grid, GridFunction};
use crate::lebesgue::{fstar_level_check, FstarLevelReport};
use crate::maximal::{weak_type_cross, weak_type_ratio, RadiiSpec, SampleGrid, WeakTypeReport};

pub const CORPUS_SIZE: u64 = 50;
pub const CORPUS_LEVEL: i32 = -6;
pub const CORPUS_DELTA: f64 = 1.0;

/// Largest `weak_type_ratio` over the corpus.
pub const WEAK_TYPE_MAX: f64 = 0.5049129722876362;
/// Largest `weak_type_cross` over the corpus.
pub const WEAK_CROSS_MAX: f64 = 0.5049129722876362;
/// Largest `fstar_level_check` ratio over the corpus and [`FSTAR_LEVELS`].
pub const FSTAR_LEVEL_MAX: f64 = 0.7368421052631579;
/// Largest domination ratio over 20000 random corpus pairs (seed 7).
pub const DOMINATION_MAX: f64 = 9.931034482758621;

/// Levels `λ`, as fractions of `max f`, used for the level-set constant.
pub const FSTAR_LEVELS: [f64; 5] = [0.05, 0.1, 0.25, 0.5, 1.0];

pub fn corpus_grid() -> Grid {
    Grid::unit(2, 0, CORPUS_LEVEL).expect("corpus grid")
}

pub fn corpus_radii() -> Vec<f64> {
    RadiiSpec::new(0.25, 3).radii(&corpus_grid())
}

pub fn corpus_sample_grid() -> SampleGrid {
    SampleGrid {
        stride: 2,
        margin: 0.25,
    }
}

pub fn corpus() -> Result<Vec<GridFunction>> {
    let grid = corpus_grid();
    (0..CORPUS_SIZE).map(|k| corpus_function(&grid, k)).collect()
}

/// Weak-type reports for every corpus member, `cross` selecting `M^n`.
pub fn weak_type_corpus(cross: bool) -> Result<Vec<WeakTypeReport>> {
    let radii = corpus_radii();
    let sg = corpus_sample_grid();
    corpus()?
        .iter()
        .map(|f| {
            let t = 0.5 * f.max_value();
            if cross {
                weak_type_cross(f, CORPUS_DELTA, t, &sg, &radii)
            } else {
                weak_type_ratio(f, CORPUS_DELTA, t, &sg, &radii)
            }
        })
        .collect()
}

pub fn fstar_level_corpus() -> Result<Vec<FstarLevelReport>> {
    let radii = corpus_radii();
    let sg = corpus_sample_grid();
    let mut out = Vec::new();
    for f in corpus()? {
        for frac in FSTAR_LEVELS {
            out.push(fstar_level_check(&f, CORPUS_DELTA, &sg, &radii, frac * f.max_value())?);
        }
    }
    Ok(out)
}
