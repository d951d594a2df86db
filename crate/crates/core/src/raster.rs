// SPDX-License-Identifier: Apache-2.0

//! Rasterizers for balls and generalized Koch snowflakes, plus the discrete
//! boundary of a grid set.

use serde::{Deserialize, Serialize};

use crate::cube::DyadicCube;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RasterMode {
    /// Cells lying entirely inside the open ball.
    Inner,
    /// Cells whose closure meets the closed ball.
    Outer,
    /// Cells whose centre lies in the open ball.
    Center,
}

/// Inclusive per-axis cell ranges covering the box `center ± radius`,
/// clipped to the root. `None` if the box misses the root.
fn cell_box(grid: &Grid, center: &[f64], radius: f64) -> Option<Vec<(u64, u64)>> {
    let h = grid.cell_side();
    let last = grid.side_cells() as f64 - 1.0;
    let mut ranges = Vec::with_capacity(grid.n());
    for (&o, &c) in grid.origin().iter().zip(center) {
        // a cell whose upper face sits exactly on c - radius still touches
        let lo = (((c - radius - o) / h).ceil() - 1.0).max(0.0);
        let hi = ((c + radius - o) / h).floor().min(last);
        if lo > hi {
            return None;
        }
        ranges.push((lo as u64, hi as u64));
    }
    Some(ranges)
}

/// Visits every lattice point of the per-axis ranges, axis 0 fastest.
fn for_each_in_box(ranges: &[(u64, u64)], mut visit: impl FnMut(&[u64])) {
    let mut c: Vec<u64> = ranges.iter().map(|r| r.0).collect();
    loop {
        visit(&c);
        let mut a = 0;
        loop {
            if a == ranges.len() {
                return;
            }
            if c[a] < ranges[a].1 {
                c[a] += 1;
                break;
            }
            c[a] = ranges[a].0;
            a += 1;
        }
    }
}

/// Squared distance from `center` to the nearest and farthest points of the
/// closed cell with lower corner `lower` and side `h`.
fn cell_distances(center: &[f64], lower: &[f64], h: f64) -> (f64, f64) {
    let mut near = 0.0;
    let mut far = 0.0;
    for (&c, &lo) in center.iter().zip(lower) {
        let hi = lo + h;
        let d_near = if c < lo {
            lo - c
        } else if c > hi {
            c - hi
        } else {
            0.0
        };
        let d_far = (c - lo).abs().max((hi - c).abs());
        near += d_near * d_near;
        far += d_far * d_far;
    }
    (near, far)
}

/// Sorted row-major cells of the rasterized ball, clipped to the root.
pub(crate) fn ball_cells(grid: &Grid, center: &[f64], radius: f64, mode: RasterMode) -> Vec<u64> {
    let Some(ranges) = cell_box(grid, center, radius) else {
        return Vec::new();
    };
    let h = grid.cell_side();
    let origin = grid.origin();
    let r2 = radius * radius;
    let mut cells = Vec::new();
    let mut lower = vec![0.0; grid.n()];
    for_each_in_box(&ranges, |c| {
        for (a, l) in lower.iter_mut().enumerate() {
            *l = origin[a] + c[a] as f64 * h;
        }
        let keep = match mode {
            RasterMode::Inner => cell_distances(center, &lower, h).1 < r2,
            RasterMode::Outer => cell_distances(center, &lower, h).0 <= r2,
            RasterMode::Center => {
                let d2: f64 = lower.iter().zip(center).map(|(&l, &x)| (l + 0.5 * h - x).powi(2)).sum();
                d2 < r2
            }
        };
        if keep {
            cells.push(grid.index_of(c));
        }
    });
    // row-major order with axis 0 fastest means the box walk is already sorted
    debug_assert!(cells.windows(2).all(|w| w[0] < w[1]));
    cells
}

/// Rasterizes `B(center, radius)` onto the lattice of `root` at `finest_level`.
///
/// Cells outside the root are dropped, so a ball may stick out of the root as
/// long as its centre lies inside it.
pub fn rasterize_ball(
    center: &[f64],
    radius: f64,
    root: &DyadicCube,
    finest_level: i32,
    mode: RasterMode,
) -> Result<GridSet> {
    let grid = Grid::new(root.clone(), finest_level)?;
    grid.check_point(center)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius {radius} must be positive")));
    }
    if !root.contains_point(center) {
        return Err(Error::Geometry(format!(
            "ball centre {center:?} lies outside the root cube"
        )));
    }
    let cells = ball_cells(&grid, center, radius, mode);
    Ok(GridSet::from_sorted(grid, cells))
}

/// Whether the closed ball lies in the closure of the root.
pub fn ball_within_root(grid: &Grid, center: &[f64], radius: f64) -> bool {
    let side = grid.root().side();
    grid.origin()
        .iter()
        .zip(center)
        .all(|(&o, &c)| c - radius >= o && c + radius <= o + side)
}

/// Hausdorff dimension `log 4 / log(1/s)` of the generalized Koch curve.
pub fn koch_dimension(s: f64) -> f64 {
    4f64.ln() / (1.0 / s).ln()
}

fn check_koch_ratio(s: f64) -> Result<()> {
    if s > 0.25 && s < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "Koch ratio s = {s} must lie in (1/4, 1/2)"
        )))
    }
}

/// Replaces the segment `a -> b` by four segments of length `s |b - a|`.
/// The bump points to the right of the direction of travel, which is
/// outward for a counter-clockwise polygon.
fn koch_subdivide(a: [f64; 2], b: [f64; 2], s: f64) -> [[f64; 2]; 4] {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len = d[0].hypot(d[1]);
    let p1 = [a[0] + s * d[0], a[1] + s * d[1]];
    let p3 = [b[0] - s * d[0], b[1] - s * d[1]];
    let half_gap = 0.5 * (1.0 - 2.0 * s) * len;
    let height = ((s * len).powi(2) - half_gap * half_gap).sqrt();
    let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let normal = [d[1] / len, -d[0] / len];
    let apex = [mid[0] + height * normal[0], mid[1] + height * normal[1]];
    [a, p1, apex, p3]
}

/// Vertices of the depth-`depth` generalized Koch snowflake built on the
/// counter-clockwise equilateral triangle with the given centroid and side.
pub fn koch_polygon(s: f64, depth: u32, centroid: [f64; 2], side: f64) -> Result<Vec<[f64; 2]>> {
    check_koch_ratio(s)?;
    let circumradius = side / 3f64.sqrt();
    let mut poly: Vec<[f64; 2]> = (0..3)
        .map(|k| {
            let theta = std::f64::consts::FRAC_PI_2 + f64::from(k) * 2.0 * std::f64::consts::PI / 3.0;
            [
                centroid[0] + circumradius * theta.cos(),
                centroid[1] + circumradius * theta.sin(),
            ]
        })
        .collect();
    for _ in 0..depth {
        let m = poly.len();
        let mut next = Vec::with_capacity(4 * m);
        for i in 0..m {
            next.extend_from_slice(&koch_subdivide(poly[i], poly[(i + 1) % m], s));
        }
        poly = next;
    }
    Ok(poly)
}

/// Shoelace area of a simple polygon (positive for counter-clockwise order).
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let m = poly.len();
    0.5 * (0..m)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % m]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

/// Cells whose centre is inside the polygon under the even-odd rule.
pub fn rasterize_polygon(poly: &[[f64; 2]], grid: &Grid) -> Result<GridSet> {
    if grid.n() != 2 {
        return Err(Error::Dimension(grid.n()));
    }
    let h = grid.cell_side();
    let origin = grid.origin();
    let side_cells = grid.side_cells();
    let m = poly.len();
    let mut cells = Vec::new();
    let mut crossings = Vec::new();
    for row in 0..side_cells {
        let y = origin[1] + (row as f64 + 0.5) * h;
        crossings.clear();
        for i in 0..m {
            let (p, q) = (poly[i], poly[(i + 1) % m]);
            if (p[1] <= y && y < q[1]) || (q[1] <= y && y < p[1]) {
                let t = (y - p[1]) / (q[1] - p[1]);
                crossings.push(p[0] + t * (q[0] - p[0]));
            }
        }
        crossings.sort_by(f64::total_cmp);
        for pair in crossings.chunks_exact(2) {
            // centres strictly between the two crossings
            let first = ((pair[0] - origin[0]) / h - 0.5).floor() + 1.0;
            let last = ((pair[1] - origin[0]) / h - 0.5).ceil() - 1.0;
            let first = first.max(0.0);
            let last = last.min(side_cells as f64 - 1.0);
            let mut col = first;
            while col <= last {
                cells.push(grid.index_of(&[col as u64, row]));
                col += 1.0;
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();
    Ok(GridSet::from_sorted(grid.clone(), cells))
}

/// Placement of the snowflake inside a root cube: centroid at the root's
/// centre and triangle side equal to half the root side.
pub fn koch_placement(root: &DyadicCube) -> ([f64; 2], f64) {
    let c = root.center();
    ([c[0], c[1]], 0.5 * root.side())
}

/// The open region bounded by the depth-`depth` generalized Koch snowflake
/// with ratio `s`, rasterized by cell centres.
pub fn koch_region(s: f64, depth: u32, root: &DyadicCube, finest_level: i32) -> Result<GridSet> {
    check_koch_ratio(s)?;
    if root.dim() != 2 {
        return Err(Error::Dimension(root.dim()));
    }
    let grid = Grid::new(root.clone(), finest_level)?;
    let (centroid, side) = koch_placement(root);
    let poly = koch_polygon(s, depth, centroid, side)?;
    let (lo, hi) = (root.lower(), root.upper());
    if poly
        .iter()
        .any(|p| p[0] < lo[0] || p[0] > hi[0] || p[1] < lo[1] || p[1] > hi[1])
    {
        return Err(Error::Geometry("Koch polygon exceeds the root cube".into()));
    }
    rasterize_polygon(&poly, &grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryLayer {
    /// Cells of `E` with a face neighbour outside `E`.
    Inner,
    /// Cells outside `E` with a face neighbour in `E`.
    Outer,
    /// Union of both layers.
    Both,
}

/// Discrete boundary of `set`. Only neighbours inside the root count, so the
/// full root has an empty boundary.
pub fn boundary_cells(set: &GridSet, layer: BoundaryLayer) -> GridSet {
    let grid = set.grid();
    let mut cells = Vec::new();
    if matches!(layer, BoundaryLayer::Inner | BoundaryLayer::Both) {
        cells.extend(
            set.cells()
                .iter()
                .copied()
                .filter(|&c| grid.face_neighbors(c).any(|nb| !set.contains(nb))),
        );
    }
    if matches!(layer, BoundaryLayer::Outer | BoundaryLayer::Both) {
        for &c in set.cells() {
            cells.extend(grid.face_neighbors(c).filter(|&nb| !set.contains(nb)));
        }
    }
    cells.sort_unstable();
    cells.dedup();
    GridSet::from_sorted(grid.clone(), cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_covering_root_selects_everything() {
        let root = DyadicCube::unit(2, 0);
        let s = rasterize_ball(&[0.5, 0.5], 0.6, &root, -3, RasterMode::Outer).unwrap();
        assert_eq!(s.len(), 64);
    }

    #[test]
    fn tiny_inner_ball_is_empty() {
        let root = DyadicCube::unit(2, 0);
        let s = rasterize_ball(&[0.3, 0.3], 0.06, &root, -3, RasterMode::Inner).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn inner_center_outer_nest() {
        let root = DyadicCube::unit(3, 0);
        for &(r, x) in &[(0.3, [0.5, 0.5, 0.5]), (0.17, [0.3, 0.61, 0.2])] {
            let inner = rasterize_ball(&x, r, &root, -4, RasterMode::Inner).unwrap();
            let center = rasterize_ball(&x, r, &root, -4, RasterMode::Center).unwrap();
            let outer = rasterize_ball(&x, r, &root, -4, RasterMode::Outer).unwrap();
            assert!(inner.is_subset(&center));
            assert!(center.is_subset(&outer));
        }
    }

    #[test]
    fn centre_outside_root_is_rejected() {
        let root = DyadicCube::unit(2, 0);
        assert!(matches!(
            rasterize_ball(&[1.5, 0.5], 0.2, &root, -3, RasterMode::Outer),
            Err(Error::Geometry(_))
        ));
        assert!(rasterize_ball(&[0.5, 0.5], -1.0, &root, -3, RasterMode::Outer).is_err());
    }

    #[test]
    fn koch_depth_zero_is_triangle() {
        let poly = koch_polygon(0.35, 0, [0.5, 0.5], 0.5).unwrap();
        assert_eq!(poly.len(), 3);
        let area = polygon_area(&poly);
        assert!((area - 3f64.sqrt() / 4.0 * 0.25).abs() < 1e-12);
    }

    #[test]
    fn koch_dimension_value() {
        assert!((koch_dimension(0.35) - 1.320_504_044_227_386).abs() < 1e-12);
        assert!((koch_dimension(0.25) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn koch_ratio_range() {
        let root = DyadicCube::unit(2, 0);
        assert!(koch_region(0.25, 1, &root, -5).is_err());
        assert!(koch_region(0.5, 1, &root, -5).is_err());
        assert!(koch_region(0.3, 1, &root, -5).is_ok());
    }

    #[test]
    fn boundary_of_root_is_empty() {
        let g = Grid::unit(2, 0, -3).unwrap();
        assert!(boundary_cells(&GridSet::full(g), BoundaryLayer::Both).is_empty());
    }

    #[test]
    fn boundary_of_single_cell() {
        let g = Grid::unit(2, 0, -3).unwrap();
        let c = g.index_of(&[3, 4]);
        let s = GridSet::new(g.clone(), [c]).unwrap();
        assert_eq!(boundary_cells(&s, BoundaryLayer::Both).len(), 5);
        assert_eq!(boundary_cells(&s, BoundaryLayer::Outer).len(), 4);
        assert_eq!(boundary_cells(&s, BoundaryLayer::Inner).cells(), &[c]);
        let g3 = Grid::unit(3, 0, -2).unwrap();
        let c3 = g3.index_of(&[1, 2, 1]);
        let s3 = GridSet::new(g3, [c3]).unwrap();
        assert_eq!(boundary_cells(&s3, BoundaryLayer::Both).len(), 7);
    }
}
