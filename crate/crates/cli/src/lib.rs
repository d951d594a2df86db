// SPDX-License-Identifier: Apache-2.0

//! Argument parsing, configuration and report emission for the `choquet`
//! binary.

use std::fmt;
use std::path::{Path, PathBuf};

use choquet_core::builtin::{unit_ball_grid, unit_ball_indicator, unit_circle_points, Builtin, KOCH_DEPTH, KOCH_RATIO};
use choquet_core::io::{self, GridData};
use choquet_core::lebesgue::{fstar, DEFAULT_TAIL};
use choquet_core::raster::koch_dimension;
use choquet_core::*;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

/// Environment variable overriding the number of worker threads.
pub const WORKERS_ENV: &str = "CHOQUET_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "choquet",
    version,
    about = "Dyadic Hausdorff content, Choquet integrals and maximal functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dyadic content of a set, with an optimal cover.
    Content(CommonArgs),
    /// Choquet integral and distribution function of a function.
    Integrate {
        #[command(flatten)]
        common: CommonArgs,
        /// Set file restricting the domain of integration (default: root).
        #[arg(long)]
        omega: Option<PathBuf>,
    },
    /// Radial profile at a point, or weak-type ratios over a sample grid.
    Maximal(CommonArgs),
    /// Lebesgue-point classification over a sample grid.
    LebesgueScan(CommonArgs),
    /// Reproduces the disk and Koch snowflake counterexamples.
    Counterexample {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        which: Which,
        /// Number of circle points for the disk.
        #[arg(long, default_value_t = 16)]
        points: usize,
        /// Koch ratio `s` in (1/4, 1/2).
        #[arg(long, default_value_t = KOCH_RATIO)]
        ratio: f64,
        /// Koch construction depth.
        #[arg(long, default_value_t = KOCH_DEPTH)]
        depth: u32,
    },
    /// Greedy quasicontinuity witness under a content budget.
    Quasidefect(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Ball,
    Koch,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Dimension.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Content exponent in (0, n].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Finest dyadic level; cells have side 2^resolution.
    #[arg(long, allow_negative_numbers = true)]
    pub resolution: Option<i32>,
    /// Level of the root cube, anchored at the origin.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub root_level: i32,
    /// Builtin source: ball, koch, staircase, random or random(SEED).
    #[arg(long, conflicts_with = "input")]
    pub builtin: Option<String>,
    /// JSON file holding a set or a function.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Seed for a bare `random` builtin.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest radius (default: a quarter of the root side).
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Number of geometric radii before truncation at four cell sides.
    #[arg(long, default_value_t = 16)]
    pub radii_count: usize,
    /// Sample every `stride`-th cell along each axis.
    #[arg(long, default_value_t = 2)]
    pub stride: u64,
    /// Distance kept from the root boundary (default: the largest radius).
    #[arg(long)]
    pub margin: Option<f64>,
    /// Evaluation point, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub point: Option<Vec<f64>>,
    /// Level t for weak-type runs, or defect threshold for scans.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Content budget for quasidefect.
    #[arg(long)]
    pub budget: Option<f64>,
    /// JSON report path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV export path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Content,
    Integrate,
    Maximal,
    LebesgueScan,
    Counterexample,
    Quasidefect,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Builtin(String),
    File(PathBuf),
}

/// Fully resolved run configuration, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub n: usize,
    pub delta: f64,
    pub resolution: i32,
    pub root_level: i32,
    pub source: Source,
    pub radii: RadiiSpec,
    pub sample_grid: SampleGrid,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub which: Option<Which>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circle_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub koch_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub koch_depth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_infeasible() => EXIT_INFEASIBLE,
            CliError::Core(_) => EXIT_INVALID,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_INFEASIBLE => "infeasible",
            EXIT_INVALID => "invalid",
            _ => "internal",
        }
    }

    /// Machine-readable form written on failure.
    pub fn to_json(&self) -> String {
        let doc = json!({
            "error": {
                "kind": self.kind(),
                "exit_code": self.exit_code(),
                "message": self.to_string(),
            }
        });
        format!("{doc}\n")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Core(Error::InvalidArgument(msg.into()))
}

/// Report text plus optional CSV, as produced by [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub json: String,
    pub csv: Option<String>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> CliResult<Self> {
        let (command, common, extra) = match cli.command {
            Command::Content(c) => (CommandKind::Content, c, Extra::None),
            Command::Integrate { common, omega } => (CommandKind::Integrate, common, Extra::Omega(omega)),
            Command::Maximal(c) => (CommandKind::Maximal, c, Extra::None),
            Command::LebesgueScan(c) => (CommandKind::LebesgueScan, c, Extra::None),
            Command::Counterexample {
                common,
                which,
                points,
                ratio,
                depth,
            } => (
                CommandKind::Counterexample,
                common,
                Extra::Counterexample {
                    which,
                    points,
                    ratio,
                    depth,
                },
            ),
            Command::Quasidefect(c) => (CommandKind::Quasidefect, c, Extra::None),
        };
        let source = match (&common.builtin, &common.input) {
            (_, Some(path)) => Source::File(path.clone()),
            (Some(name), None) if name == "random" => Source::Builtin(Builtin::Random(common.seed).to_string()),
            (Some(name), None) => Source::Builtin(name.parse::<Builtin>()?.to_string()),
            (None, None) => match extra {
                Extra::Counterexample { which: Which::Ball, .. } => Source::Builtin("ball".into()),
                Extra::Counterexample { which: Which::Koch, .. } => Source::Builtin("koch".into()),
                _ => return Err(invalid("one of --builtin or --input is required")),
            },
        };
        let mut cfg = RunConfig {
            command,
            n: common.n,
            delta: common.delta.unwrap_or(1.0),
            resolution: common.resolution.unwrap_or(-6),
            root_level: common.root_level,
            source,
            radii: RadiiSpec::new(0.0, common.radii_count),
            sample_grid: SampleGrid {
                stride: common.stride,
                margin: 0.0,
            },
            point: common.point,
            threshold: common.threshold,
            budget: common.budget,
            omega: None,
            which: None,
            circle_points: None,
            koch_ratio: None,
            koch_depth: None,
            out: common.out,
            csv: common.csv,
        };
        match extra {
            Extra::None => {}
            Extra::Omega(o) => cfg.omega = o,
            Extra::Counterexample {
                which,
                points,
                ratio,
                depth,
            } => {
                cfg.which = Some(which);
                cfg.n = 2;
                cfg.resolution = common.resolution.unwrap_or(-7);
                match which {
                    Which::Ball => {
                        cfg.circle_points = Some(points);
                        cfg.root_level = 2;
                    }
                    Which::Koch => {
                        cfg.koch_ratio = Some(ratio);
                        cfg.koch_depth = Some(depth);
                        if common.delta.is_none() {
                            cfg.delta = koch_dimension(ratio);
                        }
                    }
                }
            }
        }
        if let Source::File(path) = &cfg.source {
            // the file fixes the lattice
            let grid = match io::load(path)? {
                GridData::Set(s) => s.grid().clone(),
                GridData::Function(f) => f.grid().clone(),
            };
            cfg.n = grid.n();
            cfg.resolution = grid.finest_level();
            cfg.root_level = grid.root().level;
        }
        let side = 2f64.powi(cfg.root_level);
        let r_max = common.r_max.unwrap_or(0.25 * side);
        cfg.radii = RadiiSpec::new(r_max, common.radii_count);
        cfg.sample_grid.margin = common.margin.unwrap_or(r_max);
        Ok(cfg)
    }
}

enum Extra {
    None,
    Omega(Option<PathBuf>),
    Counterexample {
        which: Which,
        points: usize,
        ratio: f64,
        depth: u32,
    },
}

/// Geometric radii, infeasible when even the largest falls below the
/// admissibility floor.
fn radii_of(cfg: &RunConfig, grid: &Grid) -> CliResult<Vec<f64>> {
    let radii = cfg.radii.radii(grid);
    if radii.is_empty() {
        return Err(CliError::Core(Error::InadmissibleRadius {
            radius: cfg.radii.r_max,
            floor: maximal::admissible_floor(grid),
        }));
    }
    Ok(radii)
}

fn sample_points(cfg: &RunConfig, grid: &Grid) -> CliResult<Vec<Vec<f64>>> {
    let points = cfg.sample_grid.points(grid);
    if points.is_empty() {
        return Err(CliError::Core(Error::Geometry(format!(
            "no sample points with stride {} keep margin {} from the root boundary",
            cfg.sample_grid.stride, cfg.sample_grid.margin
        ))));
    }
    Ok(points)
}

fn grid_of(cfg: &RunConfig) -> CliResult<Grid> {
    Ok(Grid::unit(cfg.n, cfg.root_level, cfg.resolution)?)
}

fn builtin_of(cfg: &RunConfig) -> CliResult<Option<Builtin>> {
    match &cfg.source {
        Source::Builtin(name) => Ok(Some(name.parse()?)),
        Source::File(_) => Ok(None),
    }
}

fn load_set(cfg: &RunConfig) -> CliResult<GridSet> {
    match builtin_of(cfg)? {
        Some(b) => Ok(b.set(&grid_of(cfg)?)?),
        None => match load_source(cfg)? {
            GridData::Set(s) => Ok(s),
            GridData::Function(f) => Ok(f.support()),
        },
    }
}

fn load_function(cfg: &RunConfig) -> CliResult<GridFunction> {
    match builtin_of(cfg)? {
        Some(b) => Ok(b.function(&grid_of(cfg)?)?),
        None => match load_source(cfg)? {
            GridData::Set(s) => Ok(GridFunction::indicator(&s)?),
            GridData::Function(f) => Ok(f),
        },
    }
}

fn load_source(cfg: &RunConfig) -> CliResult<GridData> {
    match &cfg.source {
        Source::File(p) => Ok(io::load(p)?),
        Source::Builtin(_) => Err(CliError::Internal("source is not a file".into())),
    }
}

fn report(cfg: &RunConfig, body: Value) -> CliResult<String> {
    let mut doc = json!({ "config": cfg });
    if let (Value::Object(out), Value::Object(fields)) = (&mut doc, body) {
        out.extend(fields);
    }
    serde_json::to_string_pretty(&doc)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Internal(e.to_string()))
}

/// Runs one command and returns its artifacts without touching the disk.
pub fn execute(cfg: &RunConfig) -> CliResult<Output> {
    match cfg.command {
        CommandKind::Content => {
            let set = load_set(cfg)?;
            let result = dyadic_content(&set, cfg.delta)?;
            let body = json!({ "cells": set.len(), "result": to_value(&result)? });
            Ok(Output {
                json: report(cfg, body)?,
                csv: None,
            })
        }
        CommandKind::Integrate => {
            let f = load_function(cfg)?;
            let omega = match &cfg.omega {
                Some(p) => match io::load(p)? {
                    GridData::Set(s) => s,
                    GridData::Function(_) => return Err(invalid("--omega must hold a set")),
                },
                None => GridSet::full(f.grid().clone()),
            };
            let dist = distribution(&f, &omega, cfg.delta)?;
            let body = json!({
                "integral": dist.integral(),
                "distribution": to_value(&dist)?,
            });
            Ok(Output {
                json: report(cfg, body)?,
                csv: Some(dist.csv()),
            })
        }
        CommandKind::Maximal => maximal_command(cfg),
        CommandKind::LebesgueScan => {
            let f = load_function(cfg)?;
            let grid = f.grid().clone();
            let radii = radii_of(cfg, &grid)?;
            let points = sample_points(cfg, &grid)?;
            let scan = lebesgue_scan(&f, cfg.delta, &points, &radii, cfg.threshold)?;
            let body = json!({
                "delta": scan.delta,
                "radii": scan.radii,
                "window": scan.window,
                "threshold": scan.threshold,
                "samples": scan.points.len(),
                "defective_count": scan.defective_count(),
                "defective_content": scan.defective_content,
            });
            Ok(Output {
                json: report(cfg, body)?,
                csv: Some(scan.csv()),
            })
        }
        CommandKind::Counterexample => match cfg.which {
            Some(Which::Ball) => disk_command(cfg),
            Some(Which::Koch) => koch_command(cfg),
            None => Err(CliError::Internal("counterexample without --which".into())),
        },
        CommandKind::Quasidefect => {
            let budget = cfg.budget.ok_or_else(|| invalid("--budget is required"))?;
            let f = load_function(cfg)?;
            let rep = quasicontinuity_defect(&f, cfg.delta, budget)?;
            let body = json!({ "report": to_value(&rep)? });
            Ok(Output {
                json: report(cfg, body)?,
                csv: None,
            })
        }
    }
}

fn maximal_command(cfg: &RunConfig) -> CliResult<Output> {
    let f = load_function(cfg)?;
    let grid = f.grid().clone();
    let radii = radii_of(cfg, &grid)?;
    if let Some(x) = &cfg.point {
        let profile = radial_profile(&f, x, cfg.delta, &radii)?;
        let sup = profile.averages.iter().copied().fold(0.0, f64::max);
        let domination = if cfg.delta < grid.n() as f64 {
            to_value(&pointwise_domination(&f, x, cfg.delta, &radii)?)?
        } else {
            Value::Null
        };
        let body = json!({
            "maximal": sup,
            "profile": to_value(&profile)?,
            "domination": domination,
        });
        return Ok(Output {
            json: report(cfg, body)?,
            csv: Some(profile.csv()),
        });
    }
    let t = match cfg.threshold {
        Some(t) => t,
        None if f.max_value() > 0.0 => 0.5 * f.max_value(),
        None => return Err(invalid("--threshold is required for a zero function")),
    };
    sample_points(cfg, &grid)?;
    let weak = weak_type_ratio(&f, cfg.delta, t, &cfg.sample_grid, &radii)?;
    let cross = if cfg.delta < grid.n() as f64 {
        to_value(&weak_type_cross(&f, cfg.delta, t, &cfg.sample_grid, &radii)?)?
    } else {
        Value::Null
    };
    let body = json!({ "weak_type": to_value(&weak)?, "weak_type_cross": cross });
    Ok(Output {
        json: report(cfg, body)?,
        csv: None,
    })
}

fn disk_command(cfg: &RunConfig) -> CliResult<Output> {
    let grid = unit_ball_grid(2, cfg.resolution)?;
    let f = unit_ball_indicator(2, cfg.resolution)?;
    let radii = radii_of(cfg, &grid)?;
    let count = cfg.circle_points.unwrap_or(16);
    let mut csv = String::from("point,x,y,r,average\n");
    let mut points = Vec::new();
    let mut floor = f64::INFINITY;
    for (k, x) in unit_circle_points(count).into_iter().enumerate() {
        let profile = radial_profile(&f, &x, cfg.delta, &radii)?;
        for (r, a) in profile.radii.iter().zip(&profile.averages) {
            csv.push_str(&format!("{k},{},{},{r},{a}\n", x[0], x[1]));
        }
        let est = fstar(&f, &x, cfg.delta, &radii)?;
        floor = est.tail_averages.iter().copied().fold(floor, f64::min);
        points.push(json!({
            "point": x,
            "f_value": f.value_at(&x)?,
            "fstar_estimate": est.value,
            "tail_radii": est.tail_radii,
            "tail_averages": est.tail_averages,
        }));
    }
    let body = json!({
        "center": builtin::unit_ball_center(2),
        "radii": radii,
        "window": DEFAULT_TAIL,
        "floor": floor,
        "points": points,
    });
    Ok(Output {
        json: report(cfg, body)?,
        csv: Some(csv),
    })
}

fn koch_command(cfg: &RunConfig) -> CliResult<Output> {
    let ratio = cfg.koch_ratio.unwrap_or(KOCH_RATIO);
    let depth = cfg.koch_depth.unwrap_or(KOCH_DEPTH);
    let root = DyadicCube::unit(2, cfg.root_level);
    let region = koch_region(ratio, depth, &root, cfg.resolution)?;
    let grid = region.grid().clone();
    let f = GridFunction::indicator(&region)?;
    let boundary = boundary_cells(&region, BoundaryLayer::Both);
    let points: Vec<Vec<f64>> = boundary.cells().iter().map(|&c| grid.cell_center(c)).collect();
    let radii = radii_of(cfg, &grid)?;
    let scan = lebesgue_scan(&f, cfg.delta, &points, &radii, cfg.threshold)?;
    let body = json!({
        "dimension": koch_dimension(ratio),
        "region_cells": region.len(),
        "boundary_cells": boundary.len(),
        "boundary_content": content_value(&boundary, cfg.delta)?,
        "radii": scan.radii,
        "window": scan.window,
        "threshold": scan.threshold,
        "defective_count": scan.defective_count(),
        "defective_content": scan.defective_content,
    });
    Ok(Output {
        json: report(cfg, body)?,
        csv: Some(scan.csv()),
    })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Core(e.into()))
}

/// Runs `cfg`, writing the CSV and JSON artifacts. Returns the JSON when it
/// has no file destination so the caller can print it.
pub fn run(cfg: &RunConfig) -> CliResult<Option<String>> {
    let out = execute(cfg)?;
    if let (Some(path), Some(csv)) = (&cfg.csv, &out.csv) {
        write(path, csv)?;
    }
    match &cfg.out {
        Some(path) => {
            write(path, &out.json)?;
            Ok(None)
        }
        None => Ok(Some(out.json)),
    }
}

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn workers_from_env() -> CliResult<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(invalid(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}
