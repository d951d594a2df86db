// SPDX-License-Identifier: Apache-2.0

//! Half-open dyadic cubes `Π [m_i 2^k, (m_i + 1) 2^k)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: i32,
    pub coords: Vec<i64>,
}

impl DyadicCube {
    pub fn new(level: i32, coords: Vec<i64>) -> Result<Self> {
        if !(1..=3).contains(&coords.len()) {
            return Err(Error::Dimension(coords.len()));
        }
        Ok(Self { level, coords })
    }

    /// The cube `[0, 2^level)^n`.
    pub fn unit(n: usize, level: i32) -> Self {
        Self {
            level,
            coords: vec![0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn side(&self) -> f64 {
        f64::from(self.level).exp2()
    }

    /// `side^delta`, the cost of this cube in a cover.
    pub fn cost(&self, delta: f64) -> f64 {
        (f64::from(self.level) * delta).exp2()
    }

    pub fn lower(&self) -> Vec<f64> {
        let s = self.side();
        self.coords.iter().map(|&m| m as f64 * s).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        let s = self.side();
        self.coords.iter().map(|&m| (m + 1) as f64 * s).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        let s = self.side();
        self.coords.iter().map(|&m| (m as f64 + 0.5) * s).collect()
    }

    /// The `2^n` children in Morton order: axis 0 varies fastest.
    pub fn children(&self) -> Vec<DyadicCube> {
        let n = self.dim();
        (0..1usize << n)
            .map(|j| DyadicCube {
                level: self.level - 1,
                coords: self
                    .coords
                    .iter()
                    .enumerate()
                    .map(|(a, &m)| 2 * m + ((j >> a) & 1) as i64)
                    .collect(),
            })
            .collect()
    }

    pub fn parent(&self) -> DyadicCube {
        DyadicCube {
            level: self.level + 1,
            coords: self.coords.iter().map(|&m| m.div_euclid(2)).collect(),
        }
    }

    /// Whether `other` is this cube or one of its descendants.
    pub fn contains_cube(&self, other: &DyadicCube) -> bool {
        if other.dim() != self.dim() || other.level > self.level {
            return false;
        }
        let shift = (self.level - other.level) as u32;
        self.coords
            .iter()
            .zip(&other.coords)
            .all(|(&m, &o)| o.div_euclid(1i64 << shift) == m)
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && self
                .lower()
                .iter()
                .zip(self.upper())
                .zip(x)
                .all(|((&lo, hi), &xi)| lo <= xi && xi < hi)
    }
}
