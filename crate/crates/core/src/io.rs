//! CSV ingestion for distributions, risk tables, and metric graphs.
//!
//! * Distribution file: header `label,weight` and one row per atom, or a
//!   bare `label` header for unit-weight empirical atoms. Weights are
//!   normalized to total mass 1.
//! * Risk file: header row `w_label, <x label>, <x label>, ..` (the first
//!   header cell is a title and is ignored); each following row holds an
//!   output label and its non-negative risks.
//! * Graph file: header `u,v,length`; endpoints are labels resolved against
//!   the data space.
//!
//! Parse failures report the file line they occurred on.

use std::collections::HashSet;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::mechanism::RiskTable;
use crate::space::{Distribution, FiniteSpace};

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| convert_csv_error(path, e))
}

fn convert_csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!("is_io_error guarantees an io kind"),
        }
    } else {
        let line = e.position().map_or(0, |p| p.line());
        Error::Parse {
            path: path.display().to_string(),
            line,
            message: e.to_string(),
        }
    }
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_number(path: &Path, line: u64, field: &str, what: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| parse_error(path, line, format!("invalid {what} `{field}`")))
}

/// Reads a `label,weight` (or bare `label`) file into a normalized
/// distribution.
pub fn read_distribution_csv(path: &Path) -> Result<Distribution> {
    let mut rdr = reader(path)?;
    let headers = rdr
        .headers()
        .map_err(|e| convert_csv_error(path, e))?
        .clone();
    let with_weights = match headers.len() {
        1 => false,
        2 => true,
        n => {
            return Err(parse_error(
                path,
                1,
                format!("expected header `label,weight` or `label`, found {n} columns"),
            ))
        }
    };
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| convert_csv_error(path, e))?;
        let line = record_line(&record);
        let expected = if with_weights { 2 } else { 1 };
        if record.len() != expected {
            return Err(parse_error(
                path,
                line,
                format!("expected {expected} fields, found {}", record.len()),
            ));
        }
        let label = record[0].to_string();
        if label.is_empty() {
            return Err(parse_error(path, line, "empty label"));
        }
        if !seen.insert(label.clone()) {
            return Err(parse_error(path, line, format!("duplicate label `{label}`")));
        }
        let weight = if with_weights {
            parse_number(path, line, &record[1], "weight")?
        } else {
            1.0
        };
        labels.push(label);
        weights.push(weight);
    }
    let space = FiniteSpace::new(labels)?;
    Distribution::normalized(space, &weights)
}

/// Reads a dense risk table; the header names the data space, the first
/// column names the output space.
pub fn read_risk_csv(path: &Path) -> Result<RiskTable> {
    let mut rdr = reader(path)?;
    let headers = rdr
        .headers()
        .map_err(|e| convert_csv_error(path, e))?
        .clone();
    if headers.len() < 2 {
        return Err(parse_error(
            path,
            1,
            "expected header `w_label, <data label>, ..` with at least one data column",
        ));
    }
    let x_labels: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    {
        let mut seen = HashSet::new();
        for label in &x_labels {
            if !seen.insert(label.as_str()) {
                return Err(parse_error(path, 1, format!("duplicate data label `{label}`")));
            }
        }
    }
    let cols = x_labels.len();
    let mut w_labels = Vec::new();
    let mut rows: Vec<f64> = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| convert_csv_error(path, e))?;
        let line = record_line(&record);
        if record.len() != cols + 1 {
            return Err(parse_error(
                path,
                line,
                format!("expected {} fields, found {}", cols + 1, record.len()),
            ));
        }
        let label = record[0].to_string();
        if !seen.insert(label.clone()) {
            return Err(parse_error(path, line, format!("duplicate output label `{label}`")));
        }
        for field in record.iter().skip(1) {
            let value = parse_number(path, line, field, "risk value")?;
            if value < 0.0 {
                return Err(parse_error(path, line, format!("negative risk value `{field}`")));
            }
            rows.push(value);
        }
        w_labels.push(label);
    }
    if w_labels.is_empty() {
        return Err(parse_error(path, 1, "risk table has no rows"));
    }
    let outputs = FiniteSpace::new(w_labels)?;
    let data = FiniteSpace::new(x_labels)?;
    let values = DMatrix::from_row_slice(outputs.len(), data.len(), &rows);
    RiskTable::new(outputs, data, values)
}

/// Reads a `u,v,length` edge list, resolving endpoint labels against
/// `space`.
pub fn read_graph_csv(path: &Path, space: &FiniteSpace) -> Result<MetricGraph> {
    let mut rdr = reader(path)?;
    let headers = rdr
        .headers()
        .map_err(|e| convert_csv_error(path, e))?
        .clone();
    if headers.len() != 3 {
        return Err(parse_error(path, 1, "expected header `u,v,length`"));
    }
    let mut edges = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| convert_csv_error(path, e))?;
        let line = record_line(&record);
        if record.len() != 3 {
            return Err(parse_error(
                path,
                line,
                format!("expected 3 fields, found {}", record.len()),
            ));
        }
        let resolve = |label: &str| -> Result<usize> {
            space.index_of(label).ok_or_else(|| {
                parse_error(path, line, format!("unknown vertex label `{label}`"))
            })
        };
        let u = resolve(&record[0])?;
        let v = resolve(&record[1])?;
        let length = parse_number(path, line, &record[2], "edge length")?;
        edges.push((u, v, length));
    }
    MetricGraph::new(space.clone(), edges)
}
