// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported dimension {0}, expected 1, 2 or 3")]
    Dimension(usize),

    #[error("exponent delta = {delta} is outside (0, {n}]")]
    Delta { delta: f64, n: usize },

    #[error("finest level {finest} must lie strictly below root level {root}")]
    Resolution { root: i32, finest: i32 },

    #[error("lattice with {depth} levels in dimension {n} exceeds the supported size")]
    TooLarge { n: usize, depth: u32 },

    #[error("cell index {index} out of bounds for a lattice of {count} cells")]
    IndexOutOfBounds { index: u64, count: u64 },

    #[error("operands live on different lattices")]
    GridMismatch,

    #[error("value {value} at cell {index} is negative")]
    NegativeValue { index: u64, value: f64 },

    #[error("value at cell {index} is not finite")]
    NonFinite { index: u64 },

    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { expected: usize, got: usize },

    #[error("infeasible geometry: {0}")]
    Geometry(String),

    #[error("radius {radius} is below the admissible floor {floor}")]
    InadmissibleRadius { radius: f64, floor: f64 },

    #[error("radii must be non-empty and strictly decreasing")]
    Radii,

    #[error("tail window needs {needed} admissible radii, got {got}")]
    TailWindow { needed: usize, got: usize },

    #[error("exhaustive enumeration supports at most {max} leaf cells, got {got}")]
    OracleTooLarge { max: u64, got: u64 },

    #[error("chain is not monotone at step {step}, cell {index}")]
    NotMonotone { step: usize, index: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for errors caused by geometry or problem size rather than by a
    /// malformed request.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::Geometry(_)
                | Error::TooLarge { .. }
                | Error::OracleTooLarge { .. }
                | Error::InadmissibleRadius { .. }
                | Error::TailWindow { .. }
        )
    }
}

pub(crate) fn check_delta(delta: f64, n: usize) -> Result<()> {
    if delta.is_finite() && delta > 0.0 && delta <= n as f64 {
        Ok(())
    } else {
        Err(Error::Delta { delta, n })
    }
}
