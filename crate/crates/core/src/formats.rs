//! CSV readers and writers for metric streams, decision logs, behaviour
//! traces, boundary tables and element lists.
//!
//! Reals are written in Rust's shortest round-trip form, so reading a
//! written file gives back identical values.

use std::collections::BTreeSet;
use std::io::Read;

use serde::Deserialize;
use thiserror::Error;

use crate::model::ElementRef;
use crate::monitor::{Decision, MetricRecord};
use crate::scenario::{BehaviorTrace, BoundaryPoint, TraceSample};

pub const METRICS_HEADER: [&str; 4] = ["timestamp", "source", "metric", "value"];
pub const DECISIONS_HEADER: [&str; 5] = ["timestamp", "root", "state", "aggregated", "cause"];
pub const TRACE_HEADER: [&str; 4] = ["t", "x", "v", "a_cmd"];
pub const BOUNDARY_HEADER: [&str; 2] = ["d", "v_boundary"];
pub const ELEMENTS_HEADER: [&str; 2] = ["viewpoint", "element"];

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("expected header `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl FormatError {
    pub fn is_io(&self) -> bool {
        matches!(self, FormatError::Io(_))
    }
}

fn row_error(line: u64, message: impl ToString) -> FormatError {
    FormatError::Row {
        line,
        message: message.to_string(),
    }
}

fn from_csv(err: csv::Error) -> FormatError {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(e) => FormatError::Io(e),
        csv::ErrorKind::Deserialize { err, .. } => row_error(line, err),
        other => row_error(line, format!("{other:?}")),
    }
}

fn deserialize_error(line: u64, err: csv::Error) -> FormatError {
    match err.into_kind() {
        csv::ErrorKind::Deserialize { err, .. } => row_error(line, err),
        other => row_error(line, format!("{other:?}")),
    }
}

fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(
    reader: R,
    header: &[&str],
) -> Result<Vec<(u64, T)>, FormatError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let found = rdr.headers().map_err(from_csv)?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(FormatError::Header {
            expected: header.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut rows = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(from_csv)?;
        let line = record.position().map_or(0, |p| p.line());
        let row: T = record.deserialize(Some(&found)).map_err(|e| deserialize_error(line, e))?;
        rows.push((line, row));
    }
    Ok(rows)
}

#[derive(Deserialize)]
struct MetricRow {
    timestamp: f64,
    source: String,
    metric: String,
    value: f64,
}

pub fn read_metrics<R: Read>(reader: R) -> Result<Vec<MetricRecord>, FormatError> {
    read_rows::<_, MetricRow>(reader, &METRICS_HEADER)?
        .into_iter()
        .map(|(line, r)| {
            MetricRecord::new(r.timestamp, r.source, r.metric, r.value).map_err(|e| row_error(line, e))
        })
        .collect()
}

#[derive(Deserialize)]
struct TraceRow {
    t: f64,
    x: f64,
    v: f64,
    a_cmd: f64,
}

pub fn read_trace<R: Read>(reader: R) -> Result<BehaviorTrace, FormatError> {
    let samples = read_rows::<_, TraceRow>(reader, &TRACE_HEADER)?
        .into_iter()
        .map(|(_, r)| TraceSample {
            t: r.t,
            x: r.x,
            v: r.v,
            a_cmd: r.a_cmd,
        })
        .collect();
    BehaviorTrace::new(samples).map_err(|e| {
        let index = match e {
            crate::scenario::TraceError::NonIncreasingTime { index, .. }
            | crate::scenario::TraceError::NegativeSpeed { index, .. }
            | crate::scenario::TraceError::NonFinite { index } => index,
        };
        row_error(index as u64 + 2, e)
    })
}

fn real(v: f64) -> String {
    format!("{v:?}")
}

fn write_csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

pub fn write_metrics(records: &[MetricRecord]) -> String {
    write_csv(
        &METRICS_HEADER,
        records
            .iter()
            .map(|r| [real(r.timestamp), r.source.clone(), r.metric.clone(), real(r.value)]),
    )
}

pub fn cause_field(decision: &Decision) -> String {
    decision
        .cause
        .iter()
        .map(|(s, _)| s.as_str())
        .collect::<Vec<_>>()
        .join("|")
}

pub fn write_decisions(decisions: &[Decision]) -> String {
    write_csv(
        &DECISIONS_HEADER,
        decisions.iter().map(|d| {
            [
                real(d.timestamp),
                d.root.clone(),
                d.state.as_str().to_string(),
                real(d.aggregated),
                cause_field(d),
            ]
        }),
    )
}

pub fn write_trace(trace: &BehaviorTrace) -> String {
    write_csv(
        &TRACE_HEADER,
        trace
            .samples()
            .iter()
            .map(|s| [real(s.t), real(s.x), real(s.v), real(s.a_cmd)]),
    )
}

pub fn write_boundary(points: &[BoundaryPoint]) -> String {
    write_csv(&BOUNDARY_HEADER, points.iter().map(|p| [real(p.d), real(p.v_boundary)]))
}

pub fn write_elements<'a>(elements: impl IntoIterator<Item = &'a ElementRef>) -> String {
    let sorted: BTreeSet<&ElementRef> = elements.into_iter().collect();
    write_csv(
        &ELEMENTS_HEADER,
        sorted.into_iter().map(|e| [e.viewpoint.clone(), e.element.clone()]),
    )
}
