//! Greedy traces and effectivity reports as CSV and JSON.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greedy::{EffectivityReport, GreedyResult, IterationRecord, StopReason};
use crate::linalg::C64;
use crate::system::SamplePoint;

pub const TRACE_HEADER: [&str; 8] = [
    "iteration",
    "main_point",
    "alpha_point",
    "beta_point",
    "gamma_point",
    "max_estimate",
    "max_true_error",
    "rom_dim",
];

pub const EFFECTIVITY_HEADER: [&str; 4] = ["sample", "estimate", "true_error", "effectivity"];

/// One CSV trace line.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub main_point: SamplePoint,
    pub alpha_point: Option<SamplePoint>,
    pub beta_point: Option<SamplePoint>,
    pub gamma_point: Option<SamplePoint>,
    pub max_estimate: f64,
    pub max_true_error: Option<f64>,
    pub rom_dim: usize,
}

impl From<&IterationRecord> for TraceRow {
    fn from(r: &IterationRecord) -> Self {
        TraceRow {
            iteration: r.iteration,
            main_point: r.selected_main.clone(),
            alpha_point: r.selected_alpha.clone(),
            beta_point: r.selected_beta.clone(),
            gamma_point: r.selected_gamma.clone(),
            max_estimate: r.max_estimate,
            max_true_error: r.max_true_error,
            rom_dim: r.rom_dimension,
        }
    }
}

/// Full-precision JSON mirror of a greedy run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub parameters: Vec<String>,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub skipped_samples: Vec<usize>,
    pub records: Vec<IterationRecord>,
}

impl TraceDocument {
    pub fn new(result: &GreedyResult, parameters: &[String]) -> Self {
        TraceDocument {
            parameters: parameters.to_vec(),
            converged: result.converged,
            stop_reason: result.stop_reason,
            skipped_samples: result.skipped_samples.clone(),
            records: result.trace.clone(),
        }
    }
}

fn format_complex(z: C64) -> String {
    format!("{:e}{:+e}i", z.re, z.im)
}

fn parse_complex(s: &str) -> Option<C64> {
    let body = s.trim().strip_suffix('i')?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).find(|&k| {
        (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
    })?;
    let re = body[..split].parse().ok()?;
    let im = body[split..].parse().ok()?;
    Some(C64::new(re, im))
}

/// `re+imi` per parameter in `names` order, joined by `;`.
pub fn format_point(p: &SamplePoint, names: &[String]) -> String {
    names
        .iter()
        .map(|n| format_complex(p.get(n).unwrap_or(C64::new(f64::NAN, f64::NAN))))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn parse_point(text: &str, names: &[String]) -> Option<SamplePoint> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != names.len() {
        return None;
    }
    let mut p = SamplePoint::new();
    for (name, part) in names.iter().zip(parts) {
        p = p.with(name, parse_complex(part)?);
    }
    Some(p)
}

/// Writes the fixed-header CSV trace.
pub fn write_trace(path: &Path, trace: &[IterationRecord], names: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRACE_HEADER)?;
    let opt_point = |p: &Option<SamplePoint>| {
        p.as_ref()
            .map(|p| format_point(p, names))
            .unwrap_or_default()
    };
    for r in trace {
        w.write_record([
            r.iteration.to_string(),
            format_point(&r.selected_main, names),
            opt_point(&r.selected_alpha),
            opt_point(&r.selected_beta),
            opt_point(&r.selected_gamma),
            format!("{:e}", r.max_estimate),
            r.max_true_error
                .map(|e| format!("{e:e}"))
                .unwrap_or_default(),
            r.rom_dimension.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV trace written by [`write_trace`]; `names` gives the parameter
/// order used when writing.
pub fn read_trace(path: &Path, names: &[String]) -> Result<Vec<TraceRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != TRACE_HEADER {
        return Err(Error::parse(path, 1, "unexpected trace header"));
    }
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let bad = |what: &str| Error::parse(path, line, format!("bad {what}"));
        let point = |i: usize| -> Result<Option<SamplePoint>> {
            let t = &rec[i];
            if t.is_empty() {
                Ok(None)
            } else {
                parse_point(t, names)
                    .map(Some)
                    .ok_or_else(|| bad(TRACE_HEADER[i]))
            }
        };
        rows.push(TraceRow {
            iteration: rec[0].parse().map_err(|_| bad("iteration"))?,
            main_point: point(1)?.ok_or_else(|| bad("main_point"))?,
            alpha_point: point(2)?,
            beta_point: point(3)?,
            gamma_point: point(4)?,
            max_estimate: rec[5].parse().map_err(|_| bad("max_estimate"))?,
            max_true_error: if rec[6].is_empty() {
                None
            } else {
                Some(rec[6].parse().map_err(|_| bad("max_true_error"))?)
            },
            rom_dim: rec[7].parse().map_err(|_| bad("rom_dim"))?,
        });
    }
    Ok(rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

pub fn read_trace_json(path: &Path) -> Result<TraceDocument> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
}

/// Writes per-sample effectivities as CSV.
pub fn write_effectivity(path: &Path, report: &EffectivityReport, names: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(EFFECTIVITY_HEADER)?;
    for row in &report.rows {
        w.write_record([
            format_point(&row.sample, names),
            format!("{:e}", row.estimate),
            format!("{:e}", row.true_error),
            row.effectivity
                .map(|e| format!("{e:e}"))
                .unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
