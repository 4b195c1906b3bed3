//! Sample grids.
//!
//! A grid spec is a comma-separated list of per-parameter axes whose cross
//! product forms the sample set (first axis varies slowest):
//!
//! * `f:START:STOP:COUNT:log|lin`: frequencies in Hz, mapped to `s = 2πf·i`.
//! * `NAME:START:STOP:COUNT:log|lin`: a real-valued parameter.
//! * `NAME=V1;V2;...`: explicit real values.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::system::{SamplePoint, LAPLACE};

fn spaced(start: f64, stop: f64, count: usize, log: bool) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|k| {
                let t = k as f64 / (count - 1) as f64;
                if log {
                    10f64.powf(start.log10() + t * (stop.log10() - start.log10()))
                } else {
                    start + t * (stop - start)
                }
            })
            .collect(),
    }
}

/// `count` log-spaced frequencies in `[f_start, f_stop]` Hz as `s = 2πf·i`.
pub fn log_frequency_grid(f_start: f64, f_stop: f64, count: usize) -> Vec<SamplePoint> {
    spaced(f_start, f_stop, count, true)
        .into_iter()
        .map(SamplePoint::frequency)
        .collect()
}

struct Axis {
    name: String,
    values: Vec<C64>,
}

fn parse_axis(spec: &str) -> Result<Axis> {
    let bad = |m: &str| Error::InvalidConfig(format!("grid axis '{spec}': {m}"));
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad(&format!("bad number '{s}'")))
    };
    if let Some((name, list)) = spec.split_once('=') {
        let values = list
            .split(';')
            .map(|v| num(v).map(|x| C64::new(x, 0.0)))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Axis {
            name: name.trim().to_string(),
            values,
        });
    }
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 5 {
        return Err(bad("expected NAME:START:STOP:COUNT:log|lin or NAME=V1;V2"));
    }
    let (start, stop) = (num(parts[1])?, num(parts[2])?);
    let count: usize = parts[3].trim().parse().map_err(|_| bad("bad count"))?;
    let log = match parts[4].trim() {
        "log" => true,
        "lin" => false,
        _ => return Err(bad("spacing must be 'log' or 'lin'")),
    };
    if count == 0 {
        return Err(bad("count must be positive"));
    }
    if log && (start <= 0.0 || stop <= 0.0) {
        return Err(bad("log spacing needs positive bounds"));
    }
    let raw = spaced(start, stop, count, log);
    let name = parts[0].trim();
    if name == "f" {
        Ok(Axis {
            name: LAPLACE.to_string(),
            values: raw
                .into_iter()
                .map(|f| C64::new(0.0, 2.0 * PI * f))
                .collect(),
        })
    } else {
        Ok(Axis {
            name: name.to_string(),
            values: raw.into_iter().map(|x| C64::new(x, 0.0)).collect(),
        })
    }
}

/// Expands a grid spec into sample points.
pub fn parse_grid(spec: &str) -> Result<Vec<SamplePoint>> {
    let axes = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_axis)
        .collect::<Result<Vec<_>>>()?;
    if axes.is_empty() {
        return Err(Error::InvalidConfig("empty grid spec".into()));
    }
    let mut points = vec![SamplePoint::new()];
    for axis in &axes {
        let mut next = Vec::with_capacity(points.len() * axis.values.len());
        for p in &points {
            for &v in &axis.values {
                next.push(p.clone().with(&axis.name, v));
            }
        }
        points = next;
    }
    Ok(points)
}
