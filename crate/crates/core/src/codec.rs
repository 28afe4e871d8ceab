//! JSON matrix files.
//!
//! ```json
//! {"name": "P", "rows": 2, "cols": 2, "data": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}
//! ```
//!
//! `data` is row-major with each entry a `[re, im]` pair. `name` is optional;
//! generated instances also carry `seed` and `norm_cap`. Integral values are
//! written as JSON integers, everything else in shortest round-trip form.

use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::linalg::{c64, zeros, ComplexMatrix};

/// A matrix with the metadata carried alongside it on disk.
#[derive(Debug, Clone)]
pub struct MatrixFile {
    pub name: Option<String>,
    pub seed: Option<u64>,
    pub norm_cap: Option<f64>,
    pub matrix: ComplexMatrix,
}

impl MatrixFile {
    pub fn new(matrix: ComplexMatrix) -> Self {
        Self {
            name: None,
            seed: None,
            norm_cap: None,
            matrix,
        }
    }

    pub fn named(name: impl Into<String>, matrix: ComplexMatrix) -> Self {
        Self {
            name: Some(name.into()),
            ..Self::new(matrix)
        }
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Largest magnitude below which every integer is exactly representable.
const EXACT_INT: f64 = 9_007_199_254_740_992.0;

fn number(x: f64, path: &str) -> Result<Value> {
    if !x.is_finite() {
        return Err(schema(path, format!("non-finite value {x}")));
    }
    if x.fract() == 0.0 && x.abs() < EXACT_INT && !(x == 0.0 && x.is_sign_negative()) {
        return Ok(Value::Number(Number::from(x as i64)));
    }
    Number::from_f64(x)
        .map(Value::Number)
        .ok_or_else(|| schema(path, format!("unrepresentable value {x}")))
}

pub fn to_value(file: &MatrixFile) -> Result<Value> {
    let m = &file.matrix;
    let mut obj = Map::new();
    if let Some(name) = &file.name {
        obj.insert("name".into(), Value::String(name.clone()));
    }
    obj.insert("rows".into(), Value::from(m.nrows()));
    obj.insert("cols".into(), Value::from(m.ncols()));
    let mut rows = Vec::with_capacity(m.nrows());
    for i in 0..m.nrows() {
        let mut row = Vec::with_capacity(m.ncols());
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            row.push(Value::Array(vec![
                number(z.re, &format!("data[{i}][{j}][0]"))?,
                number(z.im, &format!("data[{i}][{j}][1]"))?,
            ]));
        }
        rows.push(Value::Array(row));
    }
    obj.insert("data".into(), Value::Array(rows));
    if let Some(seed) = file.seed {
        obj.insert("seed".into(), Value::from(seed));
    }
    if let Some(cap) = file.norm_cap {
        obj.insert("norm_cap".into(), number(cap, "norm_cap")?);
    }
    Ok(Value::Object(obj))
}

/// Compact single-line JSON.
pub fn to_string(file: &MatrixFile) -> Result<String> {
    Ok(to_value(file)?.to_string())
}

fn count(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    let v = obj.get(key).ok_or_else(|| schema(key, "missing field"))?;
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| schema(key, format!("expected a non-negative integer, got {v}")))
}

fn finite(v: &Value, path: &str) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| schema(path, format!("expected a number, got {v}")))?;
    if !x.is_finite() {
        return Err(schema(path, "non-finite value"));
    }
    Ok(x)
}

pub fn from_value(value: &Value) -> Result<MatrixFile> {
    let obj = value
        .as_object()
        .ok_or_else(|| schema("$", "expected an object"))?;
    let rows = count(obj, "rows")?;
    let cols = count(obj, "cols")?;
    let data = obj
        .get("data")
        .ok_or_else(|| schema("data", "missing field"))?
        .as_array()
        .ok_or_else(|| schema("data", "expected an array of rows"))?;
    if data.len() != rows {
        return Err(schema("data", format!("expected {rows} rows, got {}", data.len())));
    }
    let mut m = zeros(rows, cols);
    for (i, row) in data.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| schema(format!("data[{i}]"), "expected an array of entries"))?;
        if row.len() != cols {
            return Err(schema(
                format!("data[{i}]"),
                format!("expected {cols} entries, got {}", row.len()),
            ));
        }
        for (j, entry) in row.iter().enumerate() {
            let path = format!("data[{i}][{j}]");
            let pair = entry
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| schema(&path, "expected a [re, im] pair"))?;
            let re = finite(&pair[0], &format!("{path}[0]"))?;
            let im = finite(&pair[1], &format!("{path}[1]"))?;
            m[(i, j)] = c64::new(re, im);
        }
    }
    let name = match obj.get("name") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(v) => return Err(schema("name", format!("expected a string, got {v}"))),
    };
    let seed = match obj.get("seed") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_u64()
                .ok_or_else(|| schema("seed", format!("expected a non-negative integer, got {v}")))?,
        ),
    };
    let norm_cap = match obj.get("norm_cap") {
        None | Some(Value::Null) => None,
        Some(v) => Some(finite(v, "norm_cap")?),
    };
    Ok(MatrixFile {
        name,
        seed,
        norm_cap,
        matrix: m,
    })
}

pub fn from_str(text: &str) -> Result<MatrixFile> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        schema(
            format!("line {} column {}", e.line(), e.column()),
            format!("malformed JSON: {e}"),
        )
    })?;
    from_value(&value)
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn read(path: &Path) -> Result<MatrixFile> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    from_str(&text).map_err(|e| match e {
        Error::Schema { path: field, message } => Error::Schema {
            path: format!("{}: {field}", path.display()),
            message,
        },
        other => other,
    })
}

pub fn write(path: &Path, file: &MatrixFile) -> Result<()> {
    let mut text = to_string(file)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist, identity};

    #[test]
    fn identity_has_integer_encoding() {
        let s = to_string(&MatrixFile::new(identity(2))).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":2,"data":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#);
    }

    #[test]
    fn roundtrip_is_lossless_and_stable() {
        let mut m = zeros(2, 3);
        m[(0, 1)] = c64::new(0.1, -1.0 / 3.0);
        m[(1, 2)] = c64::new(std::f64::consts::PI, 1e-300);
        m[(1, 0)] = c64::new(-0.0, 2.5e17);
        let mut f = MatrixFile::named("X", m.clone());
        f.seed = Some(9);
        f.norm_cap = Some(10.0);
        let text = to_string(&f).unwrap();
        let back = from_str(&text).unwrap();
        assert_eq!(dist(&back.matrix, &m), 0.0);
        assert!(back.matrix[(1, 0)].re.is_sign_negative());
        assert_eq!(back.name.as_deref(), Some("X"));
        assert_eq!((back.seed, back.norm_cap), (Some(9), Some(10.0)));
        assert_eq!(to_string(&back).unwrap(), text);
    }

    #[test]
    fn nan_is_rejected_both_ways() {
        let mut m = identity(2);
        m[(1, 0)] = c64::new(0.0, f64::NAN);
        let err = to_string(&MatrixFile::new(m)).unwrap_err();
        assert!(matches!(err, Error::Schema { ref path, .. } if path == "data[1][0][1]"));
        let err = from_str(r#"{"rows":1,"cols":1,"data":[[[NaN,0]]]}"#).unwrap_err();
        assert!(matches!(err, Error::Schema { .. }));
        let err = from_str(r#"{"rows":1,"cols":1,"data":[[["NaN",0]]]}"#).unwrap_err();
        assert!(matches!(err, Error::Schema { ref path, .. } if path == "data[0][0][0]"));
    }

    #[test]
    fn shape_errors_carry_field_paths() {
        let err = from_str(r#"{"rows":2,"cols":1,"data":[[[1,0]]]}"#).unwrap_err();
        assert!(matches!(err, Error::Schema { ref path, .. } if path == "data"));
        let err = from_str(r#"{"rows":1,"cols":2,"data":[[[1,0]]]}"#).unwrap_err();
        assert!(matches!(err, Error::Schema { ref path, .. } if path == "data[0]"));
        let err = from_str(r#"{"rows":1,"cols":1,"data":[[[1]]]}"#).unwrap_err();
        assert!(matches!(err, Error::Schema { ref path, .. } if path == "data[0][0]"));
        let err = from_str(r#"{"cols":1,"data":[]}"#).unwrap_err();
        assert!(matches!(err, Error::Schema { ref path, .. } if path == "rows"));
    }

    #[test]
    fn empty_matrix_roundtrips() {
        let text = to_string(&MatrixFile::new(zeros(0, 0))).unwrap();
        assert_eq!(from_str(&text).unwrap().matrix.nrows(), 0);
    }
}
