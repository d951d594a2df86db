// SPDX-License-Identifier: Apache-2.0

//! JSON form of grid sets and grid functions.
//!
//! ```json
//! {"n":2,"root":{"level":0,"coords":[0,0]},"finest_level":-3,"cells":[0,5,9]}
//! {"n":2,"root":{"level":0,"coords":[0,0]},"finest_level":-3,"values":[[5,0.25],[9,1.0]]}
//! ```
//!
//! Indices are row-major over the finest lattice inside the root, axis 0
//! fastest. Canonical output sorts indices, omits zero values and prints
//! floats as shortest round-trip decimals.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cube::DyadicCube;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, GridSet};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RootJson {
    level: i32,
    coords: Vec<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetJson {
    n: usize,
    root: RootJson,
    finest_level: i32,
    cells: Vec<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionJson {
    n: usize,
    root: RootJson,
    finest_level: i32,
    values: Vec<(u64, f64)>,
}

fn schema(e: serde_json::Error) -> Error {
    Error::Schema(e.to_string())
}

fn grid_from(n: usize, root: RootJson, finest_level: i32) -> Result<Grid> {
    if root.coords.len() != n {
        return Err(Error::Schema(format!(
            "field `root.coords` has {} entries but `n` is {n}",
            root.coords.len()
        )));
    }
    Grid::new(DyadicCube::new(root.level, root.coords)?, finest_level)
}

fn root_of(grid: &Grid) -> RootJson {
    RootJson {
        level: grid.root().level,
        coords: grid.root().coords.clone(),
    }
}

pub fn grid_set_to_json(set: &GridSet) -> String {
    let doc = SetJson {
        n: set.grid().n(),
        root: root_of(set.grid()),
        finest_level: set.grid().finest_level(),
        cells: set.cells().to_vec(),
    };
    serde_json::to_string(&doc).expect("plain data serializes") + "\n"
}

pub fn grid_set_from_json(text: &str) -> Result<GridSet> {
    let doc: SetJson = serde_json::from_str(text).map_err(schema)?;
    let grid = grid_from(doc.n, doc.root, doc.finest_level)?;
    GridSet::new(grid, doc.cells)
}

pub fn grid_function_to_json(f: &GridFunction) -> String {
    let values = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, &v)| (i as u64, v))
        .collect();
    let doc = FunctionJson {
        n: f.grid().n(),
        root: root_of(f.grid()),
        finest_level: f.grid().finest_level(),
        values,
    };
    serde_json::to_string(&doc).expect("plain data serializes") + "\n"
}

/// Parses a function; negative values are kept (see [`GridFunction::signed`]).
pub fn grid_function_from_json(text: &str) -> Result<GridFunction> {
    let doc: FunctionJson = serde_json::from_str(text).map_err(schema)?;
    let grid = grid_from(doc.n, doc.root, doc.finest_level)?;
    let mut dense = GridFunction::zeros(grid.clone())?.values().to_vec();
    let mut seen = vec![false; dense.len()];
    for (index, value) in doc.values {
        grid.check_index(index)?;
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if std::mem::replace(&mut seen[index as usize], true) {
            return Err(Error::Schema(format!("duplicate index {index} in `values`")));
        }
        dense[index as usize] = value;
    }
    GridFunction::signed(grid, dense)
}

/// Either payload, told apart by the `cells` / `values` field.
#[derive(Debug, Clone, PartialEq)]
pub enum GridData {
    Set(GridSet),
    Function(GridFunction),
}

pub fn grid_data_from_json(text: &str) -> Result<GridData> {
    let probe: serde_json::Value = serde_json::from_str(text).map_err(schema)?;
    match (probe.get("cells"), probe.get("values")) {
        (Some(_), None) => grid_set_from_json(text).map(GridData::Set),
        (None, Some(_)) => grid_function_from_json(text).map(GridData::Function),
        _ => Err(Error::Schema(
            "expected exactly one of the fields `cells` or `values`".into(),
        )),
    }
}

pub fn load(path: &Path) -> Result<GridData> {
    grid_data_from_json(&std::fs::read_to_string(path)?)
}

pub fn store(path: &Path, data: &GridData) -> Result<()> {
    let text = match data {
        GridData::Set(s) => grid_set_to_json(s),
        GridData::Function(f) => grid_function_to_json(f),
    };
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_round_trip() {
        let g = Grid::unit(2, 0, -3).unwrap();
        let s = GridSet::new(g, [9, 0, 5]).unwrap();
        let text = grid_set_to_json(&s);
        assert_eq!(
            text,
            "{\"n\":2,\"root\":{\"level\":0,\"coords\":[0,0]},\"finest_level\":-3,\"cells\":[0,5,9]}\n"
        );
        assert_eq!(grid_set_from_json(&text).unwrap(), s);
    }

    #[test]
    fn missing_field_is_named() {
        let err = grid_set_from_json(r#"{"n":2,"root":{"level":0,"coords":[0,0]},"cells":[]}"#).unwrap_err();
        assert!(matches!(&err, Error::Schema(m) if m.contains("finest_level")), "{err}");
    }

    #[test]
    fn oversized_index_is_rejected() {
        let err =
            grid_set_from_json(r#"{"n":1,"root":{"level":0,"coords":[0]},"finest_level":-2,"cells":[4]}"#).unwrap_err();
        assert_eq!(err, Error::IndexOutOfBounds { index: 4, count: 4 });
        let err =
            grid_function_from_json(r#"{"n":1,"root":{"level":0,"coords":[0]},"finest_level":-2,"values":[[7,1.0]]}"#)
                .unwrap_err();
        assert_eq!(err, Error::IndexOutOfBounds { index: 7, count: 4 });
    }

    #[test]
    fn dimension_mismatch_and_ambiguity() {
        assert!(
            grid_set_from_json(r#"{"n":3,"root":{"level":0,"coords":[0,0]},"finest_level":-2,"cells":[]}"#).is_err()
        );
        assert!(grid_data_from_json(r#"{"n":1,"root":{"level":0,"coords":[0]},"finest_level":-2}"#).is_err());
        assert!(grid_function_from_json(
            r#"{"n":1,"root":{"level":0,"coords":[0]},"finest_level":-2,"values":[[1,1.0],[1,2.0]]}"#
        )
        .is_err());
    }
}
