// SPDX-License-Identifier: Apache-2.0

//! Content-normalized ball averages and the centred maximal operator
//!
//! ```text
//! M^δ f(x) = sup_r  (1 / H^δ(B(x, r))) ∫_{B(x, r)} |f| dH^δ
//! ```
//!
//! Balls are outer-rasterized and the denominator is the computed content of
//! that raster, so the average of a constant is the constant. The supremum
//! runs over an explicit radii list and is therefore a lower bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choquet::{layer_cake, nl1_norm};
use crate::content::content_of_codes;
use crate::error::{check_delta, Error, Result};
use crate::grid::{Grid, GridFunction, GridSet};
use crate::raster::{ball_cells, ball_within_root, RasterMode};

/// Smallest admissible radius, in cell sides.
pub const ADMISSIBLE_CELLS: f64 = 4.0;

pub fn admissible_floor(grid: &Grid) -> f64 {
    ADMISSIBLE_CELLS * grid.cell_side()
}

/// Geometric radii `r_max 2^{-j}`, `j < count`, truncated at the admissible
/// floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiiSpec {
    pub r_max: f64,
    pub count: usize,
}

impl RadiiSpec {
    pub fn new(r_max: f64, count: usize) -> Self {
        Self { r_max, count }
    }

    pub fn radii(&self, grid: &Grid) -> Vec<f64> {
        let floor = admissible_floor(grid);
        (0..self.count)
            .map(|j| self.r_max * (-(j as f64)).exp2())
            .take_while(|&r| r >= floor)
            .collect()
    }
}

/// Sample points at the centres of every `stride`-th cell per axis, keeping
/// those whose centre is at least `margin` away from the root boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub stride: u64,
    pub margin: f64,
}

impl SampleGrid {
    pub fn points(&self, grid: &Grid) -> Vec<Vec<f64>> {
        let stride = self.stride.max(1);
        let lo = grid.origin();
        let side = grid.root().side();
        (0..grid.cell_count())
            .filter(|&i| grid.coords_of(i)[..grid.n()].iter().all(|c| c % stride == stride / 2))
            .map(|i| grid.cell_center(i))
            .filter(|x| {
                x.iter()
                    .zip(&lo)
                    .all(|(&xi, &o)| xi - o >= self.margin && o + side - xi >= self.margin)
            })
            .collect()
    }
}

pub(crate) fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() || radii.windows(2).any(|w| !(w[0] > w[1])) || radii.iter().any(|&r| !(r > 0.0)) {
        Err(Error::Radii)
    } else {
        Ok(())
    }
}

pub(crate) fn check_ball(grid: &Grid, x: &[f64], r: f64) -> Result<()> {
    grid.check_point(x)?;
    let floor = admissible_floor(grid);
    if !(r >= floor) {
        return Err(Error::InadmissibleRadius { radius: r, floor });
    }
    if !ball_within_root(grid, x, r) {
        return Err(Error::Geometry(format!("ball B({x:?}, {r}) escapes the root cube")));
    }
    Ok(())
}

/// Average of `g(f)` over the outer-rasterized `B(x, r)`. `g` must map into
/// `[0, ∞)`. Arguments are assumed validated.
pub(crate) fn average_with(f: &GridFunction, x: &[f64], r: f64, delta: f64, g: impl Fn(f64) -> f64) -> f64 {
    let grid = f.grid();
    let cells = ball_cells(grid, x, r, RasterMode::Outer);
    let mut codes: Vec<u64> = cells.iter().map(|&c| grid.morton(c)).collect();
    let entries: Vec<(f64, u64)> = cells.iter().zip(&codes).map(|(&c, &m)| (g(f.value(c)), m)).collect();
    codes.sort_unstable();
    let denominator = content_of_codes(grid, &codes, delta);
    let dist = layer_cake(grid, entries, delta);
    // normalize each plateau first so a constant averages to itself exactly
    dist.breakpoints
        .windows(2)
        .zip(&dist.plateaus)
        .map(|(w, &v)| (w[1] - w[0]) * (v / denominator))
        .sum()
}

/// `∫_{B(x,r)} f dH^δ / H^δ(B(x,r))` for a non-negative `f`.
pub fn ball_average(f: &GridFunction, x: &[f64], r: f64, delta: f64) -> Result<f64> {
    check_delta(delta, f.grid().n())?;
    f.ensure_nonnegative()?;
    check_ball(f.grid(), x, r)?;
    Ok(average_with(f, x, r, delta, |v| v))
}

/// Numerator and denominator of [`ball_average`].
pub fn ball_integral(f: &GridFunction, x: &[f64], r: f64, delta: f64) -> Result<(f64, f64)> {
    check_delta(delta, f.grid().n())?;
    f.ensure_nonnegative()?;
    check_ball(f.grid(), x, r)?;
    let grid = f.grid();
    let cells = ball_cells(grid, x, r, RasterMode::Outer);
    let ball = GridSet::from_sorted(grid.clone(), cells);
    let integral = crate::choquet::choquet_integral(f, &ball, delta)?;
    let content = content_of_codes(grid, &ball.morton_codes(), delta);
    Ok((integral, content))
}

fn profile_with(
    f: &GridFunction,
    x: &[f64],
    delta: f64,
    radii: &[f64],
    g: impl Fn(f64) -> f64 + Copy,
) -> Result<Vec<f64>> {
    check_delta(delta, f.grid().n())?;
    check_radii(radii)?;
    for &r in radii {
        check_ball(f.grid(), x, r)?;
    }
    Ok(radii.iter().map(|&r| average_with(f, x, r, delta, g)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    pub averages: Vec<f64>,
    pub delta: f64,
}

impl RadialProfile {
    pub fn csv(&self) -> String {
        let mut out = String::from("r,average\n");
        for (r, a) in self.radii.iter().zip(&self.averages) {
            out.push_str(&format!("{r},{a}\n"));
        }
        out
    }
}

/// Averages of `|f|` at each radius.
pub fn radial_profile(f: &GridFunction, x: &[f64], delta: f64, radii: &[f64]) -> Result<RadialProfile> {
    let averages = profile_with(f, x, delta, radii, f64::abs)?;
    Ok(RadialProfile {
        center: x.to_vec(),
        radii: radii.to_vec(),
        averages,
        delta,
    })
}

/// `max_r` of the `|f|` averages over the given radii.
pub fn maximal(f: &GridFunction, x: &[f64], delta: f64, radii: &[f64]) -> Result<f64> {
    Ok(profile_with(f, x, delta, radii, f64::abs)?
        .into_iter()
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeReport {
    /// Exponent of the content measuring the superlevel set and the norm.
    pub delta: f64,
    /// Exponent used inside the maximal operator.
    pub average_delta: f64,
    pub t: f64,
    pub radii: Vec<f64>,
    pub sample_grid: SampleGrid,
    pub samples: usize,
    pub superlevel_cells: usize,
    pub content_est: f64,
    pub norm: f64,
    /// `t · content_est / ‖f‖₁`, zero when the norm vanishes.
    pub bound_ratio: f64,
}

fn weak_type(
    f: &GridFunction,
    delta: f64,
    average_delta: f64,
    t: f64,
    sample_grid: &SampleGrid,
    radii: &[f64],
) -> Result<WeakTypeReport> {
    let grid = f.grid();
    check_delta(delta, grid.n())?;
    check_delta(average_delta, grid.n())?;
    check_radii(radii)?;
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("threshold {t} must be positive")));
    }
    let points = sample_grid.points(grid);
    for x in &points {
        for &r in radii {
            check_ball(grid, x, r)?;
        }
    }
    let marked: Vec<u64> = points
        .par_iter()
        .filter(|x| {
            radii
                .iter()
                .map(|&r| average_with(f, x, r, average_delta, f64::abs))
                .fold(0.0, f64::max)
                > t
        })
        .filter_map(|x| grid.cell_at(x))
        .collect();
    let superlevel = GridSet::new(grid.clone(), marked)?;
    let content_est = content_of_codes(grid, &superlevel.morton_codes(), delta);
    let norm = nl1_norm(f, delta)?;
    let bound_ratio = if norm > 0.0 { t * content_est / norm } else { 0.0 };
    Ok(WeakTypeReport {
        delta,
        average_delta,
        t,
        radii: radii.to_vec(),
        sample_grid: *sample_grid,
        samples: points.len(),
        superlevel_cells: superlevel.len(),
        content_est,
        norm,
        bound_ratio,
    })
}

/// Empirical weak-type ratio for `M^δ` measured in `H^δ`.
pub fn weak_type_ratio(
    f: &GridFunction,
    delta: f64,
    t: f64,
    sample_grid: &SampleGrid,
    radii: &[f64],
) -> Result<WeakTypeReport> {
    weak_type(f, delta, delta, t, sample_grid, radii)
}

/// Empirical weak-type ratio for `M^n` measured in `H^δ`, `δ < n`.
pub fn weak_type_cross(
    f: &GridFunction,
    delta: f64,
    t: f64,
    sample_grid: &SampleGrid,
    radii: &[f64],
) -> Result<WeakTypeReport> {
    let n = f.grid().n();
    if !(delta < n as f64) {
        return Err(Error::Delta { delta, n });
    }
    weak_type(f, delta, n as f64, t, sample_grid, radii)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    /// `M^n f(x)`.
    pub lhs: f64,
    /// `(M^δ (f^{δ/n})(x))^{n/δ}`.
    pub rhs_core: f64,
    /// `lhs / rhs_core`, zero when both vanish.
    pub ratio: f64,
}

/// Both sides of `M^n f(x) ≤ c (M^δ(f^{δ/n})(x))^{n/δ}` at matched radii.
pub fn pointwise_domination(f: &GridFunction, x: &[f64], delta: f64, radii: &[f64]) -> Result<DominationReport> {
    let n = f.grid().n() as f64;
    if !(delta > 0.0 && delta < n) {
        return Err(Error::Delta { delta, n: f.grid().n() });
    }
    f.ensure_nonnegative()?;
    let lhs = maximal(f, x, n, radii)?;
    let power = delta / n;
    let inner = profile_with(f, x, delta, radii, |v| v.powf(power))?
        .into_iter()
        .fold(0.0, f64::max);
    let rhs_core = inner.powf(1.0 / power);
    let ratio = if rhs_core > 0.0 { lhs / rhs_core } else { 0.0 };
    Ok(DominationReport { lhs, rhs_core, ratio })
}
