//! Sampled-function files: CSV rows `index,weight,value` or JSON lines
//! `{"i": .., "w": .., "v": ..}`.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::ValueEnum;
use grand_amalgam::{MeasureSpace, SampledFunction};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum FunctionFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FunctionFormat {
    /// `.jsonl` and `.json` files are JSON lines; everything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => FunctionFormat::Jsonl,
            _ => FunctionFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Row {
    i: i64,
    w: f64,
    v: f64,
}

fn row_error(path: &Path, line: u64, message: impl Into<String>) -> CliError {
    CliError::Row {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: u64, name: &str, s: &str) -> CliResult<T> {
    s.trim()
        .parse()
        .map_err(|_| row_error(path, line, format!("cannot parse {name} {s:?}")))
}

fn csv_rows(path: &Path, text: &str) -> CliResult<Vec<(u64, Row)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            row_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if rows.is_empty() && record.get(0) == Some("index") {
            continue;
        }
        if record.len() != 3 {
            return Err(row_error(
                path,
                line,
                format!(
                    "expected 3 fields (index,weight,value), found {}",
                    record.len()
                ),
            ));
        }
        rows.push((
            line,
            Row {
                i: parse_field(path, line, "index", &record[0])?,
                w: parse_field(path, line, "weight", &record[1])?,
                v: parse_field(path, line, "value", &record[2])?,
            },
        ));
    }
    Ok(rows)
}

fn jsonl_rows(path: &Path, text: &str) -> CliResult<Vec<(u64, Row)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| {
            let line = k as u64 + 1;
            serde_json::from_str(l)
                .map(|row| (line, row))
                .map_err(|e| row_error(path, line, e.to_string()))
        })
        .collect()
}

/// Parses function rows. `path` is only used in error messages.
pub fn parse_function(
    path: &Path,
    text: &str,
    format: FunctionFormat,
) -> CliResult<SampledFunction> {
    let mut rows = match format {
        FunctionFormat::Csv => csv_rows(path, text)?,
        FunctionFormat::Jsonl => jsonl_rows(path, text)?,
    };
    if rows.is_empty() {
        return Err(CliError::NoRows {
            path: path.to_path_buf(),
        });
    }
    for (line, row) in &rows {
        if !(row.w.is_finite() && row.w > 0.0) {
            return Err(row_error(
                path,
                *line,
                format!("weight {} must be positive", row.w),
            ));
        }
        if !row.v.is_finite() {
            return Err(row_error(
                path,
                *line,
                format!("value {} is not finite", row.v),
            ));
        }
    }
    rows.sort_by_key(|(_, r)| r.i);
    if let Some(pair) = rows.windows(2).find(|p| p[0].1.i == p[1].1.i) {
        let line = pair[0].0.max(pair[1].0);
        return Err(row_error(
            path,
            line,
            format!("duplicate index {}", pair[1].1.i),
        ));
    }
    let label = path
        .file_name()
        .map_or_else(|| "input".to_string(), |n| n.to_string_lossy().into_owned());
    let space = MeasureSpace::new(
        rows.iter().map(|(_, r)| r.i).collect(),
        rows.iter().map(|(_, r)| r.w).collect(),
        label,
    )?;
    Ok(SampledFunction::new(
        Arc::new(space),
        rows.iter().map(|(_, r)| r.v).collect(),
    )?)
}

pub fn load_function(path: &Path, format: FunctionFormat) -> CliResult<SampledFunction> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_function(path, &text, format)
}

/// Serializes `f` so that [`parse_function`] reproduces it bit for bit.
pub fn write_function(f: &SampledFunction, format: FunctionFormat) -> String {
    let space = f.space();
    let rows = space
        .points()
        .iter()
        .zip(space.weights())
        .zip(f.values())
        .map(|((&i, &w), &v)| Row { i, w, v });
    match format {
        FunctionFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer
                .write_record(["index", "weight", "value"])
                .expect("write to memory");
            for r in rows {
                writer
                    .write_record([r.i.to_string(), r.w.to_string(), r.v.to_string()])
                    .expect("write to memory");
            }
            String::from_utf8(writer.into_inner().expect("flush to memory")).expect("ascii")
        }
        FunctionFormat::Jsonl => rows
            .map(|r| serde_json::to_string(&r).expect("finite row") + "\n")
            .collect(),
    }
}

pub fn save_function(path: &Path, f: &SampledFunction, format: FunctionFormat) -> CliResult<()> {
    write_text(path, &write_function(f, format))
}

pub(crate) fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: PathBuf::from(path),
        source,
    })
}
