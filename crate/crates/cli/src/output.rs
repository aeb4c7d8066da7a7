//! Versioned CSV and JSON artifacts.
//!
//! A CSV artifact starts with three comment lines,
//!
//! ```text
//! # schema: 1
//! # config: {...}
//! # content_sha256: <hex>
//! ```
//!
//! followed by a header row and the data. The hash covers everything after
//! the comment lines. JSON artifacts carry the same three fields at top
//! level next to the report, whose compact serialization is hashed.
//! Numbers are written with 12 significant digits.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

const SIGNIFICANT_DIGITS: i32 = 12;

/// `x` with 12 significant digits in plain decimal notation where
/// practical, scientific otherwise. Trailing zeros are dropped.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..SIGNIFICANT_DIGITS).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS - 1 - exp).max(0) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        let s = format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, x);
        let (mantissa, exponent) = s.split_once('e').expect("scientific format");
        format!("{}e{exponent}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Rounds every number in a JSON tree to 12 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            format_number(x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// A file to be written at the end of a command.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: Vec<u8>,
}

impl Artifact {
    pub fn write_to(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let path = dir.join(&self.name);
        std::fs::write(&path, &self.contents).map_err(io(&path))?;
        Ok(path)
    }
}

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(usize),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format_number(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

pub fn csv_artifact(
    name: &str,
    config: &impl Serialize,
    header: &[&str],
    rows: &[Vec<Cell>],
) -> Result<Artifact, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(Cell::render))
            .map_err(csv_err)?;
    }
    let body = w
        .into_inner()
        .map_err(|e| CliError::Config(format!("csv: {e}")))?;
    let config = serde_json::to_string(&round_json(to_value(config)?))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut contents = format!(
        "# schema: {SCHEMA_VERSION}\n# config: {config}\n# content_sha256: {}\n",
        sha256_hex(&body)
    )
    .into_bytes();
    contents.extend_from_slice(&body);
    Ok(Artifact {
        name: name.into(),
        contents,
    })
}

pub fn json_artifact(
    name: &str,
    config: &impl Serialize,
    report: &impl Serialize,
) -> Result<Artifact, CliError> {
    let report = round_json(to_value(report)?);
    let compact = serde_json::to_vec(&report).map_err(|e| CliError::Config(e.to_string()))?;
    let doc = json!({
        "schema": SCHEMA_VERSION,
        "config": round_json(to_value(config)?),
        "content_sha256": sha256_hex(&compact),
        "report": report,
    });
    let mut contents =
        serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Config(e.to_string()))?;
    contents.push(b'\n');
    Ok(Artifact {
        name: name.into(),
        contents,
    })
}

fn to_value(v: &impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Config(e.to_string()))
}

/// Machine-readable failure record printed on stderr.
pub fn error_record(err: &CliError) -> String {
    json!({
        "schema": SCHEMA_VERSION,
        "error": {
            "kind": err.kind(),
            "message": err.to_string(),
            "exit_code": err.exit_code(),
        }
    })
    .to_string()
}

/// Splits a CSV artifact into its comment lines and body.
pub fn split_csv(contents: &str) -> (Vec<&str>, &str) {
    let mut comments = Vec::new();
    let mut rest = contents;
    while let Some(line) = rest.strip_prefix('#') {
        let end = line.find('\n').map_or(line.len(), |i| i + 1);
        comments.push(line[..end].trim());
        rest = &line[end..];
    }
    (comments, rest)
}
