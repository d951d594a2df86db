// SPDX-License-Identifier: Apache-2.0

//! Lebesgue-point defect `f*(x) = limsup_{r→0} avg_{B(x,r)} |f - f(x)|` and
//! point classification.
//!
//! The lim sup is replaced by the supremum over a tail window: the `m`
//! smallest admissible radii of the supplied list (default `m = 3`). Every
//! report carries the window it used.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choquet::{nl1_norm, CHECK_TOLERANCE};
use crate::content::{content_of_codes, ContentAccumulator};
use crate::error::{check_delta, Error, Result};
use crate::grid::{GridFunction, GridSet};
use crate::maximal::{average_with, check_ball, check_radii, SampleGrid};
use crate::raster::{ball_cells, RasterMode};

pub const DEFAULT_TAIL: usize = 3;

/// Default defect threshold as a fraction of `max f - min f`.
pub const DEFAULT_THRESHOLD_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FstarEstimate {
    pub value: f64,
    pub tail_radii: Vec<f64>,
    pub tail_averages: Vec<f64>,
}

fn tail_window(radii: &[f64], window: usize) -> Result<&[f64]> {
    check_radii(radii)?;
    if window == 0 || radii.len() < window {
        return Err(Error::TailWindow {
            needed: window.max(1),
            got: radii.len(),
        });
    }
    Ok(&radii[radii.len() - window..])
}

fn tail_averages(
    f: &GridFunction,
    x: &[f64],
    delta: f64,
    tail: &[f64],
    g: impl Fn(f64) -> f64 + Copy,
) -> Result<Vec<f64>> {
    check_delta(delta, f.grid().n())?;
    for &r in tail {
        check_ball(f.grid(), x, r)?;
    }
    Ok(tail.iter().map(|&r| average_with(f, x, r, delta, g)).collect())
}

/// `f*` with an explicit tail window. `f` may be signed.
pub fn fstar_window(f: &GridFunction, x: &[f64], delta: f64, radii: &[f64], window: usize) -> Result<FstarEstimate> {
    let tail = tail_window(radii, window)?;
    let fx = f.value_at(x)?;
    let tail_averages = tail_averages(f, x, delta, tail, |v| (v - fx).abs())?;
    Ok(FstarEstimate {
        value: tail_averages.iter().copied().fold(0.0, f64::max),
        tail_radii: tail.to_vec(),
        tail_averages,
    })
}

pub fn fstar(f: &GridFunction, x: &[f64], delta: f64, radii: &[f64]) -> Result<FstarEstimate> {
    fstar_window(f, x, delta, radii, DEFAULT_TAIL)
}

/// Tail supremum of the plain averages of a non-negative `f`.
pub fn average_limsup(f: &GridFunction, x: &[f64], delta: f64, radii: &[f64]) -> Result<f64> {
    f.ensure_nonnegative()?;
    let tail = tail_window(radii, DEFAULT_TAIL)?;
    Ok(tail_averages(f, x, delta, tail, |v| v)?.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FstarBoundsReport {
    pub fstar: f64,
    /// Maximal function over the same tail radii.
    pub maximal: f64,
    pub f_value: f64,
    pub holds: bool,
}

/// `f*(x) ≤ M^δ f(x) + |f(x)|` at matched radii.
pub fn fstar_bounds_check(f: &GridFunction, x: &[f64], delta: f64, radii: &[f64]) -> Result<FstarBoundsReport> {
    let est = fstar(f, x, delta, radii)?;
    let maximal = tail_averages(f, x, delta, &est.tail_radii, f64::abs)?
        .into_iter()
        .fold(0.0, f64::max);
    let f_value = f.value_at(x)?.abs();
    Ok(FstarBoundsReport {
        fstar: est.value,
        maximal,
        f_value,
        holds: est.value <= maximal + f_value + CHECK_TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FstarLevelReport {
    pub lambda: f64,
    pub content: f64,
    pub norm: f64,
    /// `λ · H^δ({f* > λ}) / ‖f‖₁`, zero when the norm vanishes.
    pub ratio: f64,
}

/// Content of the sampled level set `{f* > λ}` against `‖f‖₁ / λ`.
pub fn fstar_level_check(
    f: &GridFunction,
    delta: f64,
    sample_grid: &SampleGrid,
    radii: &[f64],
    lambda: f64,
) -> Result<FstarLevelReport> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("level {lambda} must be positive")));
    }
    let grid = f.grid();
    let points = sample_grid.points(grid);
    let values = points
        .par_iter()
        .map(|x| fstar(f, x, delta, radii).map(|e| e.value))
        .collect::<Result<Vec<_>>>()?;
    let cells = points
        .iter()
        .zip(values)
        .filter(|(_, v)| *v > lambda)
        .filter_map(|(x, _)| grid.cell_at(x));
    let set = GridSet::new(grid.clone(), cells)?;
    let content = content_of_codes(grid, &set.morton_codes(), delta);
    let norm = nl1_norm(f, delta)?;
    Ok(FstarLevelReport {
        lambda,
        content,
        norm,
        ratio: if norm > 0.0 { lambda * content / norm } else { 0.0 },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationReport {
    /// `(f - φ)*(x)`.
    pub shifted: f64,
    /// `f*(x)`.
    pub original: f64,
    pub equal: bool,
}

/// `(f - φ)*(x) = f*(x)` for `φ` constant on the largest ball.
pub fn translation_invariance_check(
    f: &GridFunction,
    phi: &GridFunction,
    x: &[f64],
    delta: f64,
    radii: &[f64],
) -> Result<TranslationReport> {
    if f.grid() != phi.grid() {
        return Err(Error::GridMismatch);
    }
    check_radii(radii)?;
    let grid = phi.grid();
    check_ball(grid, x, radii[0])?;
    let ball = ball_cells(grid, x, radii[0], RasterMode::Outer);
    if let Some(&first) = ball.first() {
        let c = phi.value(first);
        if ball.iter().any(|&i| phi.value(i) != c) {
            return Err(Error::InvalidArgument("phi is not constant on the largest ball".into()));
        }
    }
    let shifted = fstar(&f.sub(phi)?, x, delta, radii)?.value;
    let original = fstar(f, x, delta, radii)?.value;
    Ok(TranslationReport {
        shifted,
        original,
        equal: shifted == original,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Classification {
    Lebesgue,
    /// Every tail average is at least the threshold; carries their minimum.
    Defective {
        lower_bound: f64,
    },
    Inconclusive,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Lebesgue => "lebesgue",
            Classification::Defective { .. } => "defective",
            Classification::Inconclusive => "inconclusive",
        }
    }

    pub fn is_defective(&self) -> bool {
        matches!(self, Classification::Defective { .. })
    }
}

pub fn classify(tail_averages: &[f64], threshold: f64) -> Classification {
    let lo = tail_averages.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail_averages.iter().copied().fold(0.0, f64::max);
    if hi == 0.0 || hi < threshold {
        Classification::Lebesgue
    } else if lo >= threshold {
        Classification::Defective { lower_bound: lo }
    } else {
        Classification::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LebesguePointReport {
    pub point: Vec<f64>,
    pub delta: f64,
    pub f_value: f64,
    pub fstar_estimate: f64,
    pub tail_radii: Vec<f64>,
    pub tail_averages: Vec<f64>,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub delta: f64,
    pub radii: Vec<f64>,
    pub window: usize,
    pub threshold: f64,
    pub points: Vec<LebesguePointReport>,
    pub defective_cells: Vec<u64>,
    pub defective_content: f64,
}

impl ScanReport {
    pub fn defective_count(&self) -> usize {
        self.points.iter().filter(|p| p.classification.is_defective()).count()
    }

    /// `x,y[,z],f,fstar,classification` rows.
    pub fn csv(&self) -> String {
        let axes = ["x", "y", "z"];
        let n = self.points.first().map_or(2, |p| p.point.len());
        let mut out = axes[..n].join(",");
        out.push_str(",f,fstar,classification\n");
        for p in &self.points {
            for c in &p.point {
                out.push_str(&format!("{c},"));
            }
            out.push_str(&format!(
                "{},{},{}\n",
                p.f_value,
                p.fstar_estimate,
                p.classification.label()
            ));
        }
        out
    }
}

/// Classifies each sample point and reports the content of the cells holding
/// defective points. `threshold` defaults to 1% of the range of `f`.
pub fn lebesgue_scan(
    f: &GridFunction,
    delta: f64,
    points: &[Vec<f64>],
    radii: &[f64],
    threshold: Option<f64>,
) -> Result<ScanReport> {
    let grid = f.grid();
    check_delta(delta, grid.n())?;
    let window = DEFAULT_TAIL;
    tail_window(radii, window)?;
    let threshold = threshold.unwrap_or(DEFAULT_THRESHOLD_FRACTION * (f.max_value() - f.min_value()));
    let reports = points
        .par_iter()
        .map(|x| {
            let est = fstar_window(f, x, delta, radii, window)?;
            Ok(LebesguePointReport {
                point: x.clone(),
                delta,
                f_value: f.value_at(x)?,
                fstar_estimate: est.value,
                classification: classify(&est.tail_averages, threshold),
                tail_radii: est.tail_radii,
                tail_averages: est.tail_averages,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let defective = GridSet::new(
        grid.clone(),
        reports
            .iter()
            .filter(|r| r.classification.is_defective())
            .filter_map(|r| grid.cell_at(&r.point)),
    )?;
    let defective_content = content_of_codes(grid, &defective.morton_codes(), delta);
    Ok(ScanReport {
        delta,
        radii: radii.to_vec(),
        window,
        threshold,
        points: reports,
        defective_cells: defective.cells().to_vec(),
        defective_content,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiDefectReport {
    pub budget: f64,
    pub removed_cells: Vec<u64>,
    pub removed_content: f64,
    /// Largest jump between face neighbours that both survive.
    pub oscillation: f64,
}

/// Greedy quasicontinuity witness: removes cells in order of their largest
/// jump to a face neighbour (ties by index) while the content of the removed
/// set stays within `budget`, then measures the surviving discrete
/// oscillation. A larger budget removes a longer prefix of the same order.
pub fn quasicontinuity_defect(f: &GridFunction, delta: f64, budget: f64) -> Result<QuasiDefectReport> {
    let grid = f.grid();
    check_delta(delta, grid.n())?;
    if !(budget > 0.0) {
        return Err(Error::InvalidArgument(format!("budget {budget} must be positive")));
    }
    let jump = |c: u64| {
        let v = f.value(c);
        grid.face_neighbors(c)
            .map(|nb| (v - f.value(nb)).abs())
            .fold(0.0, f64::max)
    };
    let mut ranked: Vec<(f64, u64)> = (0..grid.cell_count())
        .map(|c| (jump(c), c))
        .filter(|r| r.0 > 0.0)
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut acc = ContentAccumulator::new_unchecked(grid, delta);
    let mut removed = Vec::new();
    let mut removed_content = 0.0;
    for &(_, c) in &ranked {
        acc.insert(grid.morton(c));
        if acc.value() > budget {
            break;
        }
        removed.push(c);
        removed_content = acc.value();
    }
    removed.sort_unstable();
    let removed = GridSet::from_sorted(grid.clone(), removed);

    let mut oscillation: f64 = 0.0;
    for c in 0..grid.cell_count() {
        if removed.contains(c) {
            continue;
        }
        for nb in grid.face_neighbors(c).filter(|&nb| nb > c) {
            if !removed.contains(nb) {
                oscillation = oscillation.max((f.value(c) - f.value(nb)).abs());
            }
        }
    }
    Ok(QuasiDefectReport {
        budget,
        removed_cells: removed.cells().to_vec(),
        removed_content,
        oscillation,
    })
}
