//! JSON model files.
//!
//! ```json
//! {"n": 2, "A": [[0, "1/2"], [1, 0]], "B": {"leaders": [1]},
//!  "metadata": {"name": "demo"}}
//! ```
//!
//! Rationals are JSON integers or strings `"p"` / `"p/q"`. Leader indices
//! are 1-based in files and 0-based everywhere else; this module and the
//! report writer are the only places that convert.

use herd_core::rational::parse_rational;
use herd_core::{Rational, RationalMatrix, SystemPair};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field(path: impl Into<String>, message: impl Into<String>) -> ModelError {
    ModelError::Field {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub pair: SystemPair,
    pub metadata: Metadata,
}

fn parse_json(text: &str) -> Result<Value, ModelError> {
    serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn parse_rational_value(value: &Value, path: &str) -> Result<Rational, ModelError> {
    match value {
        Value::Number(num) => num
            .as_i64()
            .map(|v| Rational::from_integer(v.into()))
            .ok_or_else(|| {
                field(path, format!("{num} is not an integer; write fractions as \"p/q\" strings"))
            }),
        Value::String(s) => parse_rational(s).map_err(|e| field(path, e.to_string())),
        other => Err(field(path, format!("expected a rational, found {other}"))),
    }
}

fn parse_count(value: Option<&Value>, path: &str) -> Result<usize, ModelError> {
    let value = value.ok_or_else(|| field(path, "missing"))?;
    value
        .as_u64()
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| field(path, format!("expected a nonnegative integer, found {value}")))
}

fn parse_matrix(value: &Value, path: &str, rows: usize, cols: Option<usize>) -> Result<RationalMatrix, ModelError> {
    let Value::Array(row_values) = value else {
        return Err(field(path, "expected an array of rows"));
    };
    if row_values.len() != rows {
        return Err(field(path, format!("expected {rows} rows, found {}", row_values.len())));
    }
    let mut width = cols;
    let mut out = Vec::with_capacity(rows);
    for (i, row) in row_values.iter().enumerate() {
        let row_path = format!("{path}[{i}]");
        let Value::Array(entries) = row else {
            return Err(field(row_path, "expected an array"));
        };
        let expected = *width.get_or_insert(entries.len());
        if entries.len() != expected {
            return Err(field(
                row_path,
                format!("expected {expected} entries, found {}", entries.len()),
            ));
        }
        out.push(
            entries
                .iter()
                .enumerate()
                .map(|(j, v)| parse_rational_value(v, &format!("{row_path}[{j}]")))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    let width = width.unwrap_or(0);
    if width == 0 {
        return Err(field(path, "matrix has no columns"));
    }
    RationalMatrix::new(rows, width, out.into_iter().flatten().collect())
        .map_err(|e| field(path, e.to_string()))
}

/// 1-based, strictly increasing, within `1..=n`; returned 0-based.
fn parse_leaders(value: &Value, path: &str, n: usize) -> Result<Vec<usize>, ModelError> {
    let Value::Array(items) = value else {
        return Err(field(path, "expected an array of 1-based node indices"));
    };
    if items.is_empty() {
        return Err(field(path, "at least one leader is required"));
    }
    let mut leaders = Vec::with_capacity(items.len());
    for (k, item) in items.iter().enumerate() {
        let item_path = format!("{path}[{k}]");
        let index = item
            .as_u64()
            .and_then(|v| usize::try_from(v).ok())
            .ok_or_else(|| field(&item_path, format!("expected a positive integer, found {item}")))?;
        if index == 0 || index > n {
            return Err(field(item_path, format!("leader {index} is outside 1..={n}")));
        }
        if leaders.last().is_some_and(|&prev| index - 1 <= prev) {
            return Err(field(item_path, "leader indices must be strictly increasing"));
        }
        leaders.push(index - 1);
    }
    Ok(leaders)
}

fn parse_metadata(value: Option<&Value>) -> Result<Metadata, ModelError> {
    let Some(value) = value else {
        return Ok(Metadata::default());
    };
    let Value::Object(map) = value else {
        return Err(field("metadata", "expected an object"));
    };
    let text = |key: &str| -> Result<Option<String>, ModelError> {
        match map.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(field(format!("metadata.{key}"), "expected a string")),
        }
    };
    if let Some(key) = map.keys().find(|k| !["name", "description"].contains(&k.as_str())) {
        return Err(field(format!("metadata.{key}"), "unknown field"));
    }
    Ok(Metadata {
        name: text("name")?,
        description: text("description")?,
    })
}

pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let root = parse_json(text)?;
    let Value::Object(map) = &root else {
        return Err(field("$", "expected a JSON object"));
    };
    if let Some(key) = map.keys().find(|k| !["n", "A", "B", "metadata"].contains(&k.as_str())) {
        return Err(field(key.as_str(), "unknown field"));
    }
    let n = parse_count(map.get("n"), "n")?;
    if n == 0 {
        return Err(field("n", "must be at least 1"));
    }
    let a = parse_matrix(map.get("A").ok_or_else(|| field("A", "missing"))?, "A", n, Some(n))?;

    let b_value = map.get("B").ok_or_else(|| field("B", "missing"))?;
    let Value::Object(b_map) = b_value else {
        return Err(field("B", "expected {\"leaders\": [...]} or {\"matrix\": [...]}"));
    };
    let pair = match (b_map.get("leaders"), b_map.get("matrix")) {
        (Some(leaders), None) if b_map.len() == 1 => {
            let leaders = parse_leaders(leaders, "B.leaders", n)?;
            SystemPair::with_leaders(a, &leaders).map_err(|e| field("B.leaders", e.to_string()))?
        }
        (None, Some(matrix)) if b_map.len() == 1 => {
            let b = parse_matrix(matrix, "B.matrix", n, None)?;
            SystemPair::new(a, b).map_err(|e| field("B.matrix", e.to_string()))?
        }
        _ => {
            return Err(field(
                "B",
                "expected exactly one of \"leaders\" or \"matrix\"",
            ))
        }
    };
    Ok(Model {
        pair,
        metadata: parse_metadata(map.get("metadata"))?,
    })
}

/// A JSON array of rationals, such as an initial state file.
pub fn parse_vector(text: &str, expected_len: usize) -> Result<Vec<Rational>, ModelError> {
    let root = parse_json(text)?;
    let Value::Array(items) = &root else {
        return Err(field("$", "expected an array of rationals"));
    };
    if items.len() != expected_len {
        return Err(field(
            "$",
            format!("expected {expected_len} entries, found {}", items.len()),
        ));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, v)| parse_rational_value(v, &format!("$[{i}]")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use herd_core::fixtures::example2;
    use herd_core::rational::{int, ratio};

    fn path_of(err: ModelError) -> String {
        match err {
            ModelError::Field { path, .. } => path,
            other => panic!("expected a field error, got {other}"),
        }
    }

    #[test]
    fn parses_small_model() {
        let m = parse_model(r#"{"n":2,"A":[[0,"1/2"],[1,0]],"B":{"leaders":[1]}}"#).unwrap();
        assert_eq!(m.pair.leaders(), Some(&[0][..]));
        assert_eq!(*m.pair.a().get(0, 1), ratio(1, 2));
        assert_eq!(*m.pair.a().get(1, 0), int(1));
    }

    #[test]
    fn example2_matches_fixture() {
        let text = r#"{
            "n": 6,
            "A": [[0,1,1,2,0,0],[1,0,0,0,0,0],[1,0,0,0,1,1],
                  [2,0,0,0,0,0],[0,0,1,0,0,0],[0,0,1,0,0,0]],
            "B": {"leaders": [1]},
            "metadata": {"name": "example2"}
        }"#;
        let m = parse_model(text).unwrap();
        assert_eq!(m.pair, example2(1, 1, 1));
        assert_eq!(m.metadata.name.as_deref(), Some("example2"));
    }

    #[test]
    fn rejects_decimals() {
        let err = parse_model(r#"{"n":1,"A":[["0.5"]],"B":{"leaders":[1]}}"#).unwrap_err();
        assert_eq!(path_of(err), "A[0][0]");
        let err = parse_model(r#"{"n":1,"A":[[0.5]],"B":{"leaders":[1]}}"#).unwrap_err();
        assert_eq!(path_of(err), "A[0][0]");
    }

    #[test]
    fn rejects_bad_shapes_and_leaders() {
        let cases = [
            (r#"{"n":2,"A":[[0,1]],"B":{"leaders":[1]}}"#, "A"),
            (r#"{"n":2,"A":[[0,1],[1]],"B":{"leaders":[1]}}"#, "A[1]"),
            (r#"{"n":2,"A":[[0,1],[1,0]],"B":{"leaders":[3]}}"#, "B.leaders[0]"),
            (r#"{"n":2,"A":[[0,1],[1,0]],"B":{"leaders":[2,1]}}"#, "B.leaders[1]"),
            (r#"{"n":2,"A":[[0,1],[1,0]],"B":{"leaders":[0]}}"#, "B.leaders[0]"),
            (r#"{"n":2,"A":[[0,1],[1,0]],"B":{"matrix":[[1],[1,2]]}}"#, "B.matrix[1]"),
            (r#"{"n":2,"A":[[0,1],[1,0]],"B":{}}"#, "B"),
            (r#"{"n":2,"A":[[0,"1/0"],[1,0]],"B":{"leaders":[1]}}"#, "A[0][1]"),
            (r#"{"n":2,"A":[[0,1],[1,0]],"B":{"leaders":[1]},"C":1}"#, "C"),
        ];
        for (text, path) in cases {
            assert_eq!(path_of(parse_model(text).unwrap_err()), path, "{text}");
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_model("{\n  \"n\": 2,\n  oops\n}").unwrap_err();
        assert!(matches!(err, ModelError::Syntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn matrix_input() {
        let m = parse_model(r#"{"n":2,"A":[[0,1],[1,0]],"B":{"matrix":[[1,"-2/3"],[0,1]]}}"#).unwrap();
        assert_eq!(m.pair.m(), 2);
        assert!(m.pair.leaders().is_none());
    }

    #[test]
    fn vectors() {
        assert_eq!(parse_vector(r#"[1, "-1/2"]"#, 2).unwrap(), vec![int(1), ratio(-1, 2)]);
        assert!(parse_vector("[1]", 2).is_err());
    }
}
