// SPDX-License-Identifier: Apache-2.0

//! Dyadic Hausdorff content and Choquet integration on dyadic grids.
//!
//! Sets and functions live on the finest-level lattice of a root dyadic cube
//! ([`Grid`], [`GridSet`], [`GridFunction`]). On top of that:
//!
//! * [`content`]: exact `δ`-dimensional dyadic content by tree recursion,
//!   with an exhaustive oracle for small lattices;
//! * [`choquet`]: distribution functions, the Choquet integral and the
//!   `nL¹` norm;
//! * [`maximal`]: content-normalized ball averages and centred maximal
//!   operators;
//! * [`lebesgue`]: the Lebesgue-point defect, scans and a quasicontinuity
//!   witness;
//! * [`raster`]: balls, generalized Koch snowflakes and discrete boundaries.

// negated comparisons are how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builtin;
pub mod calibration;
pub mod choquet;
pub mod content;
pub mod cube;
pub mod error;
pub mod grid;
pub mod io;
pub mod lebesgue;
pub mod maximal;
pub mod raster;

pub use choquet::{
    chebyshev_bound, check_fatou, check_monotone_convergence, check_sublinearity, choquet_integral,
    choquet_integral_root, distribution, lebesgue_comparability, nl1_norm, superlevel_content, StepFunction,
};
pub use content::{
    ball_content_bounds, brute_force_content, content_value, dyadic_content, ContentAccumulator, ContentResult,
};
pub use cube::DyadicCube;
pub use error::{Error, Result};
pub use grid::{Grid, GridFunction, GridSet};
pub use lebesgue::{
    average_limsup, fstar, fstar_bounds_check, lebesgue_scan, quasicontinuity_defect, translation_invariance_check,
    Classification, LebesguePointReport, ScanReport,
};
pub use maximal::{
    ball_average, maximal, pointwise_domination, radial_profile, weak_type_cross, weak_type_ratio, RadialProfile,
    RadiiSpec, SampleGrid,
};
pub use raster::{boundary_cells, koch_region, rasterize_ball, BoundaryLayer, RasterMode};
