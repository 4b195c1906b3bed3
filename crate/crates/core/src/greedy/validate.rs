use log::warn;
use serde::{Deserialize, Serialize};

use super::par_map;
use crate::error::Result;
use crate::estimators::{evaluate_mimo, EstimatorKind, EstimatorWorkspace};
use crate::projection::reduced_primal_solve;
use crate::system::{ParametricSystem, SamplePoint};

/// True errors below this are treated as rounding noise in the filtered summary.
pub const FILTER_THRESHOLD: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivityRow {
    pub sample: SamplePoint,
    pub estimate: f64,
    pub true_error: f64,
    /// `estimate / true_error`; `None` when the true error is zero.
    pub effectivity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivitySummary {
    pub min_eff_all: Option<f64>,
    pub max_eff_all: Option<f64>,
    /// Over rows with `true_error >= filter_threshold`; `None` when no row qualifies.
    pub min_eff_filtered: Option<f64>,
    pub max_eff_filtered: Option<f64>,
    pub filter_threshold: f64,
    pub filtered_count: usize,
    pub max_true_error: f64,
    pub max_estimate: f64,
    pub skipped_singular: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivityReport {
    pub kind: EstimatorKind,
    pub rows: Vec<EffectivityRow>,
    pub summary: EffectivitySummary,
}

impl EffectivityReport {
    /// True when no sample passes the rounding-noise filter.
    pub fn filtered_set_empty(&self) -> bool {
        self.summary.filtered_count == 0
    }
}

fn min_max(it: impl Iterator<Item = f64>) -> (Option<f64>, Option<f64>) {
    it.fold((None, None), |(lo, hi): (Option<f64>, Option<f64>), v| {
        (
            Some(lo.map_or(v, |l| l.min(v))),
            Some(hi.map_or(v, |h| h.max(v))),
        )
    })
}

/// Compares estimate and true error (both maximized over channels) at every
/// validation sample. Samples where the full or reduced operator is singular are
/// skipped and counted.
pub fn validate(
    sys: &ParametricSystem,
    ws: &EstimatorWorkspace,
    validation_set: &[SamplePoint],
    kind: EstimatorKind,
) -> Result<EffectivityReport> {
    ws.check(kind)?;
    let results = par_map(
        validation_set.len(),
        |i| -> Result<Option<EffectivityRow>> {
            let p = &validation_set[i];
            let row = (|| -> Result<EffectivityRow> {
                let estimate = evaluate_mimo(kind, ws, sys, p)?;
                let h = sys.transfer_function(p)?;
                let (_, x) = reduced_primal_solve(&ws.rom_primal, p)?;
                let true_error = h.sub(&sys.c().assemble(p)?.matmul(&x)).max_abs();
                Ok(EffectivityRow {
                    sample: p.clone(),
                    estimate,
                    true_error,
                    effectivity: (true_error > 0.0).then(|| estimate / true_error),
                })
            })();
            match row {
                Ok(r) => Ok(Some(r)),
                Err(e) if e.is_singular() => {
                    warn!("validation sample {i} skipped: {e}");
                    Ok(None)
                }
                Err(e) => Err(e),
            }
        },
    );
    let mut rows = Vec::new();
    let mut skipped = 0;
    for r in results {
        match r? {
            Some(row) => rows.push(row),
            None => skipped += 1,
        }
    }
    let (min_all, max_all) = min_max(rows.iter().filter_map(|r| r.effectivity));
    let filtered: Vec<f64> = rows
        .iter()
        .filter(|r| r.true_error >= FILTER_THRESHOLD)
        .filter_map(|r| r.effectivity)
        .collect();
    let (min_f, max_f) = min_max(filtered.iter().copied());
    let summary = EffectivitySummary {
        min_eff_all: min_all,
        max_eff_all: max_all,
        min_eff_filtered: min_f,
        max_eff_filtered: max_f,
        filter_threshold: FILTER_THRESHOLD,
        filtered_count: filtered.len(),
        max_true_error: rows.iter().map(|r| r.true_error).fold(0.0, f64::max),
        max_estimate: rows.iter().map(|r| r.estimate).fold(0.0, f64::max),
        skipped_singular: skipped,
    };
    Ok(EffectivityReport {
        kind,
        rows,
        summary,
    })
}
