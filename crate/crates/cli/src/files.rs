//! Reading JSON and CSV inputs with located errors, and writing outputs.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_path_to_error::{Path as DePath, Segment};
use vinelock_core::{CalibrationSample, Polyline};

use crate::error::{CliError, Result};

/// Renders a deserializer path as a JSON pointer (`""` for the root).
pub fn json_pointer(path: &DePath) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        let token = match seg {
            Segment::Seq { index } => index.to_string(),
            Segment::Map { key } => key.replace('~', "~0").replace('/', "~1"),
            Segment::Enum { variant } => variant.clone(),
            Segment::Unknown => continue,
        };
        out.push('/');
        out.push_str(&token);
    }
    out
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Parses JSON text, reporting failures with the pointer of the value that
/// failed to deserialize.
pub fn parse_json<T: DeserializeOwned>(text: &str, file: &Path) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = json_pointer(e.path());
        let pointer = if pointer.is_empty() { "/".to_string() } else { pointer };
        CliError::schema(file, pointer, e.inner())
    })?;
    Ok(value)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    parse_json(&read_text(path)?, path)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

pub fn finish(path: &Path, mut w: impl Write) -> Result<()> {
    w.flush().map_err(|e| CliError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let pointer = match e.position() {
        Some(pos) => format!("line {}", pos.line()),
        None => "csv".to_string(),
    };
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        kind => CliError::schema(path, pointer, format!("{kind:?}")),
    }
}

#[derive(Deserialize)]
struct PointRow {
    x_mm: f64,
    y_mm: f64,
}

/// Reads a polyline from a CSV with `x_mm` and `y_mm` columns; other
/// columns are ignored.
pub fn read_polyline_csv(path: &Path) -> Result<Polyline> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut points = Vec::new();
    for row in reader.deserialize::<PointRow>() {
        let row = row.map_err(|e| csv_error(path, e))?;
        points.push([row.x_mm, row.y_mm]);
    }
    Polyline::new(points).map_err(|e| CliError::schema(path, "rows", e))
}

/// Reads `theta_rad,p_sep_kpa` calibration samples.
pub fn read_samples_csv(path: &Path) -> Result<Vec<CalibrationSample>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    reader
        .deserialize::<CalibrationSample>()
        .map(|row| row.map_err(|e| csv_error(path, e)))
        .collect()
}
